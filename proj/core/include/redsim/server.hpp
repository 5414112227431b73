#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <stdexcept>
#include <vector>

namespace redsim {

/// Remaining work below this at a departure evaluation counts as zero.
inline constexpr double kWorkEpsilon = 1e-12;

/// Identity of one replica as seen by a server. `seq` is globally monotone and
/// breaks ties between replicas that would finish at the same instant.
struct ReplicaRef {
    std::uint32_t id;
    std::uint64_t seq;
};

struct Departure {
    double time;
    ReplicaRef replica;
};

/// Bookkeeping shared by both disciplines: the clock of the last update, the
/// unfinished work, busy time, and a version that changes whenever the
/// server's next departure candidate changes.
class ServerBase {
public:
    double last_update() const noexcept { return last_; }
    double busy_time() const noexcept { return busy_; }
    std::uint64_t version() const noexcept { return version_; }

    /// Unfinished work as of last_update().
    double work() const noexcept { return work_; }

protected:
    void check_interval(double from, double to) const {
        if (to < from) throw std::invalid_argument("apply_elapsed: negative interval");
    }

    void drain(double from, double to, bool busy) {
        last_ = to;
        if (!busy) return;
        busy_ += to - from;
        work_ -= to - from;
    }

    double last_ = 0.0;
    double busy_ = 0.0;
    double work_ = 0.0;
    std::uint64_t version_ = 0;
};

/// Non-preemptive first-come first-served queue at rate 1. Queue entries live
/// in a pooled doubly linked list so a cancelled replica leaves in O(1).
class FcfsServer : public ServerBase {
public:
    using Handle = std::uint32_t;

    struct Enqueued {
        Handle handle;
        bool candidate_changed;
    };

    std::size_t size() const noexcept { return count_; }
    bool busy() const noexcept { return head_ != kNil; }

    /// Appends a replica. Caller must have advanced the server to `now`.
    Enqueued enqueue(ReplicaRef r, double work, double now) {
        sync(now);
        const Handle h = allocate(Node{r, work, tail_, kNil});
        if (tail_ == kNil) {
            head_ = h;
        } else {
            nodes_[tail_].next = h;
        }
        tail_ = h;
        ++count_;
        work_ += work;
        const bool changed = head_ == h;
        if (changed) ++version_;
        return {h, changed};
    }

    /// Removes a replica (queued or in service) without completing it.
    /// Returns true when the departure candidate changed.
    bool remove(Handle h, double now) {
        sync(now);
        const bool was_head = h == head_;
        work_ -= nodes_[h].work;
        unlink(h);
        if (count_ == 0) work_ = 0.0;
        if (was_head) ++version_;
        return was_head;
    }

    void apply_elapsed(double from, double to) {
        check_interval(from, to);
        if (head_ != kNil) nodes_[head_].work -= to - from;
        drain(from, to, head_ != kNil);
        if (count_ == 0) work_ = 0.0;
    }

    void advance_to(double now) { apply_elapsed(last_, now); }

    std::optional<Departure> next_departure(double now) const {
        if (head_ == kNil) return std::nullopt;
        return Departure{now + clamp(nodes_[head_].work), nodes_[head_].replica};
    }

    /// Removes the head at its departure instant and starts the next replica.
    ReplicaRef complete_departure(double now) {
        sync(now);
        const Node& n = nodes_[head_];
        const ReplicaRef r = n.replica;
        work_ -= clamp(n.work);
        unlink(head_);
        if (count_ == 0) work_ = 0.0;
        ++version_;
        return r;
    }

    double remaining_work(Handle h) const { return nodes_[h].work; }

    /// Unfinished work at time t >= last_update(), with no intervening events.
    double work_at(double t) const {
        if (head_ == kNil) return 0.0;
        return work_ - (t - last_);
    }

private:
    static constexpr Handle kNil = 0xffffffffu;

    struct Node {
        ReplicaRef replica;
        double work;  // remaining work; only the head's decreases
        Handle prev;
        Handle next;
    };

    static double clamp(double w) { return w < kWorkEpsilon ? 0.0 : w; }

    void sync(double now) {
        if (now != last_) advance_to(now);
    }

    Handle allocate(Node n) {
        if (!free_.empty()) {
            const Handle h = free_.back();
            free_.pop_back();
            nodes_[h] = n;
            return h;
        }
        nodes_.push_back(n);
        return static_cast<Handle>(nodes_.size() - 1);
    }

    void unlink(Handle h) {
        Node& n = nodes_[h];
        if (n.prev != kNil) nodes_[n.prev].next = n.next; else head_ = n.next;
        if (n.next != kNil) nodes_[n.next].prev = n.prev; else tail_ = n.prev;
        --count_;
        free_.push_back(h);
    }

    std::vector<Node> nodes_;
    std::vector<Handle> free_;
    Handle head_ = kNil;
    Handle tail_ = kNil;
    std::size_t count_ = 0;
};

/// Egalitarian processor sharing at total rate 1.
///
/// Keeps a virtual clock `attained_` equal to the service each present
/// replica has received per unit of sharing; a replica admitted with work w
/// when the clock reads V finishes when the clock reaches its tag V + w.
/// Remaining work of a replica is therefore tag - attained_, and advancing
/// real time by dt with n sharers moves the clock by dt / n.
class PsServer : public ServerBase {
    struct Key {
        double tag;
        std::uint64_t seq;
        std::uint32_t id;
        bool operator<(const Key& o) const noexcept {
            if (tag != o.tag) return tag < o.tag;
            return seq < o.seq;
        }
    };

public:
    using Handle = std::set<Key>::const_iterator;

    struct Enqueued {
        Handle handle;
        bool candidate_changed;
    };

    std::size_t size() const noexcept { return active_.size(); }
    bool busy() const noexcept { return !active_.empty(); }

    Enqueued enqueue(ReplicaRef r, double work, double now) {
        sync(now);
        const Handle h = active_.insert(Key{attained_ + work, r.seq, r.id}).first;
        work_ += work;
        ++version_;  // every sharer slows down
        return {h, true};
    }

    bool remove(Handle h, double now) {
        sync(now);
        work_ -= clamp(h->tag - attained_);
        active_.erase(h);
        settle_if_empty();
        ++version_;
        return true;
    }

    void apply_elapsed(double from, double to) {
        check_interval(from, to);
        if (!active_.empty()) attained_ += (to - from) / static_cast<double>(active_.size());
        drain(from, to, !active_.empty());
    }

    void advance_to(double now) { apply_elapsed(last_, now); }

    std::optional<Departure> next_departure(double now) const {
        if (active_.empty()) return std::nullopt;
        const Key& k = *active_.begin();
        const double n = static_cast<double>(active_.size());
        return Departure{now + n * clamp(k.tag - attained_), ReplicaRef{k.id, k.seq}};
    }

    ReplicaRef complete_departure(double now) {
        sync(now);
        const Key k = *active_.begin();
        work_ -= clamp(k.tag - attained_);
        active_.erase(active_.begin());
        settle_if_empty();
        ++version_;
        return ReplicaRef{k.id, k.seq};
    }

    double remaining_work(Handle h) const { return h->tag - attained_; }

    double work_at(double t) const {
        if (active_.empty()) return 0.0;
        return work_ - (t - last_);
    }

private:
    static double clamp(double w) { return w < kWorkEpsilon ? 0.0 : w; }

    void sync(double now) {
        if (now != last_) advance_to(now);
    }

    // Restarting the clock at every idle period bounds rounding growth.
    void settle_if_empty() {
        if (active_.empty()) {
            attained_ = 0.0;
            work_ = 0.0;
        }
    }

    std::set<Key> active_;
    double attained_ = 0.0;
};

}  // namespace redsim

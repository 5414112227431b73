#pragma once

#include <cstdint>
#include <queue>
#include <vector>

namespace redsim {

enum class EventKind : std::uint8_t { Arrival, Departure };

struct Event {
    double time;
    std::uint64_t seq;  // insertion order; breaks time ties
    EventKind kind;
    std::uint32_t server;   // departures only
    std::uint64_t version;  // server version when scheduled; stale if it differs
};

/// Min-heap of events ordered by (time, seq). Entries are never deleted;
/// departure candidates carry the owning server's version and are skipped
/// by the consumer once that version has moved on.
class EventCalendar {
public:
    void schedule_arrival(double time) { push(time, EventKind::Arrival, 0, 0); }

    void schedule_departure(double time, std::uint32_t server, std::uint64_t version) {
        push(time, EventKind::Departure, server, version);
    }

    bool empty() const noexcept { return heap_.empty(); }
    std::size_t size() const noexcept { return heap_.size(); }
    const Event& top() const { return heap_.top(); }

    Event pop() {
        Event e = heap_.top();
        heap_.pop();
        return e;
    }

    /// Total number of events ever scheduled.
    std::uint64_t scheduled() const noexcept { return next_seq_; }

private:
    struct Later {
        bool operator()(const Event& a, const Event& b) const noexcept {
            if (a.time != b.time) return a.time > b.time;
            return a.seq > b.seq;
        }
    };

    void push(double time, EventKind kind, std::uint32_t server, std::uint64_t version) {
        heap_.push(Event{time, next_seq_++, kind, server, version});
    }

    std::priority_queue<Event, std::vector<Event>, Later> heap_;
    std::uint64_t next_seq_ = 0;
};

}  // namespace redsim

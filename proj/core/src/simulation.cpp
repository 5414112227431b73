#include "redsim/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <ostream>

#include "redsim/csv.hpp"
#include "redsim/errors.hpp"
#include "redsim/event_calendar.hpp"
#include "redsim/rng.hpp"
#include "redsim/server.hpp"

namespace redsim {

const char* to_string(Discipline d) noexcept { return d == Discipline::FCFS ? "FCFS" : "PS"; }

void validate(const SimConfig& cfg) {
    if (cfg.servers < 1) throw ConfigError("number of servers N must be >= 1");
    if (cfg.replicas < 1 || cfg.replicas > cfg.servers) {
        throw ConfigError("number of replicas d must satisfy 1 <= d <= N");
    }
    if (!(cfg.lambda > 0.0) || !std::isfinite(cfg.lambda)) {
        throw ConfigError("arrival rate lambda must be positive");
    }
    if (!(cfg.horizon > 0.0) || !std::isfinite(cfg.horizon)) {
        throw ConfigError("horizon must be positive");
    }
    if (!(cfg.warmup >= 0.0) || !(cfg.warmup < cfg.horizon)) {
        throw ConfigError("warmup must satisfy 0 <= warmup < horizon");
    }
    if (cfg.backlog_samples < 0) throw ConfigError("backlog_samples must be >= 0");
}

SimConfig with_default_warmup(SimConfig cfg) {
    cfg.warmup = 0.1 * cfg.horizon;
    return cfg;
}

std::vector<double> SimOutput::latency_values() const {
    std::vector<double> v;
    v.reserve(latencies.size());
    for (const auto& s : latencies) v.push_back(s.latency);
    return v;
}

namespace {

struct RunParams {
    std::uint32_t servers;
    std::uint32_t replicas;
    double horizon;
    double warmup;
    int backlog_samples;
};

// Poisson arrivals, uniform placement without replacement, sizes per the
// replica dependence. Three independent streams keep the arrival process and
// job sizes identical across disciplines for a given seed.
class PoissonSource {
public:
    explicit PoissonSource(const SimConfig& cfg)
        : cfg_(cfg),
          arrivals_(child_stream(cfg.seed, StreamId::Arrivals)),
          selection_(child_stream(cfg.seed, StreamId::ServerSelection)),
          sizes_(child_stream(cfg.seed, StreamId::JobSizes)),
          permutation_(static_cast<std::size_t>(cfg.servers)) {
        std::iota(permutation_.begin(), permutation_.end(), 0u);
    }

    std::optional<double> next_arrival(double now) {
        return now - std::log(arrivals_.uniform()) / cfg_.lambda;
    }

    void draw(std::vector<std::uint32_t>& chosen, std::vector<double>& works) {
        const auto n = static_cast<std::uint32_t>(cfg_.servers);
        // Partial Fisher-Yates: exactly d selection draws per job.
        for (std::uint32_t i = 0; i < chosen.size(); ++i) {
            const auto j = i + static_cast<std::uint32_t>(selection_.below(n - i));
            std::swap(permutation_[i], permutation_[j]);
            chosen[i] = permutation_[i];
        }
        if (cfg_.dependence == ReplicaDependence::Identical) {
            std::fill(works.begin(), works.end(), sample(cfg_.dist, sizes_));
        } else {
            for (auto& w : works) w = sample(cfg_.dist, sizes_);
        }
    }

private:
    const SimConfig& cfg_;
    RandomStream arrivals_;
    RandomStream selection_;
    RandomStream sizes_;
    std::vector<std::uint32_t> permutation_;
};

class ScriptedSource {
public:
    explicit ScriptedSource(const std::vector<ScriptedJob>& jobs) : jobs_(jobs) {}

    std::optional<double> next_arrival(double) {
        if (next_ >= jobs_.size()) return std::nullopt;
        return jobs_[next_].arrival_time;
    }

    void draw(std::vector<std::uint32_t>& chosen, std::vector<double>& works) {
        const ScriptedJob& j = jobs_[next_++];
        std::copy(j.servers.begin(), j.servers.end(), chosen.begin());
        std::copy(j.works.begin(), j.works.end(), works.begin());
    }

private:
    const std::vector<ScriptedJob>& jobs_;
    std::size_t next_ = 0;
};

template <typename Server, typename Source>
class Kernel {
public:
    Kernel(const RunParams& params, Source& source)
        : cfg_(params),
          source_(source),
          n_(params.servers),
          d_(params.replicas),
          servers_(n_),
          chosen_(d_),
          works_(d_) {
        if (params.backlog_samples > 0) {
            sample_step_ = params.horizon / params.backlog_samples;
            next_sample_ = sample_step_;
        }
    }

    SimOutput run() {
        if (const auto t = source_.next_arrival(0.0)) calendar_.schedule_arrival(*t);
        while (!calendar_.empty() && calendar_.top().time <= cfg_.horizon) {
            const Event ev = calendar_.pop();
            record_backlog_until(ev.time);
            if (ev.kind == EventKind::Arrival) {
                on_arrival(ev.time);
            } else if (ev.version == servers_[ev.server].version()) {
                on_departure(ev.server, ev.time);
            }
        }
        record_backlog_until(cfg_.horizon);
        return finish();
    }

private:
    struct JobRec {
        double arrival = 0.0;
    };

    struct ReplicaRec {
        std::uint32_t server = 0;
        typename Server::Handle handle{};
    };

    std::uint32_t allocate_job() {
        if (!free_jobs_.empty()) {
            const std::uint32_t j = free_jobs_.back();
            free_jobs_.pop_back();
            return j;
        }
        jobs_.emplace_back();
        replicas_.resize(replicas_.size() + d_);
        return static_cast<std::uint32_t>(jobs_.size() - 1);
    }

    void on_arrival(double now) {
        ++out_.jobs_observed;
        source_.draw(chosen_, works_);
        if (const auto t = source_.next_arrival(now)) calendar_.schedule_arrival(*t);

        const std::uint32_t job = allocate_job();
        jobs_[job] = JobRec{now};
        for (std::uint32_t i = 0; i < d_; ++i) {
            const std::uint32_t rid = job * d_ + i;
            Server& s = servers_[chosen_[i]];
            s.advance_to(now);
            const auto res = s.enqueue(ReplicaRef{rid, replica_seq_++}, works_[i], now);
            replicas_[rid] = ReplicaRec{chosen_[i], res.handle};
            if (res.candidate_changed) reschedule(chosen_[i], now);
        }
        track_backlog_after_arrival();
    }

    void on_departure(std::uint32_t server, double now) {
        Server& s = servers_[server];
        s.advance_to(now);
        const ReplicaRef done = s.complete_departure(now);
        const std::uint32_t job = done.id / d_;
        const JobRec& rec = jobs_[job];

        ++out_.jobs_completed;
        if (now > cfg_.warmup) out_.latencies.push_back({rec.arrival, now - rec.arrival});

        // Cancellations land before any other event at this instant is evaluated.
        for (std::uint32_t i = 0; i < d_; ++i) {
            const std::uint32_t rid = job * d_ + i;
            if (rid == done.id) continue;
            const ReplicaRec& r = replicas_[rid];
            Server& sib = servers_[r.server];
            sib.advance_to(now);
            if (sib.remove(r.handle, now)) reschedule(r.server, now);
            ++out_.replicas_cancelled;
        }
        reschedule(server, now);
        free_jobs_.push_back(job);
    }

    void reschedule(std::uint32_t server, double now) {
        const Server& s = servers_[server];
        if (const auto dep = s.next_departure(now)) {
            calendar_.schedule_departure(dep->time, server, s.version());
        }
    }

    double backlog_at(double t) const {
        double total = 0.0;
        for (const auto& s : servers_) total += std::max(0.0, s.work_at(t));
        return total;
    }

    // Backlog only jumps up at arrivals, so its running maximum is attained
    // immediately after one.
    void track_backlog_after_arrival() {
        double total = 0.0;
        for (const auto& s : servers_) total += s.work();
        out_.max_backlog = std::max(out_.max_backlog, total);
    }

    void record_backlog_until(double t) {
        while (sample_step_ > 0.0 && next_sample_ <= t &&
               out_.backlog_trace.size() < static_cast<std::size_t>(cfg_.backlog_samples)) {
            out_.backlog_trace.push_back({next_sample_, backlog_at(next_sample_)});
            next_sample_ = sample_step_ * static_cast<double>(out_.backlog_trace.size() + 1);
        }
    }

    SimOutput finish() {
        out_.events_scheduled = calendar_.scheduled();
        out_.busy_fraction.reserve(n_);
        for (auto& s : servers_) {
            // Busy time up to the horizon; the server is not advanced past it.
            double busy = s.busy_time();
            if (s.busy()) busy += cfg_.horizon - s.last_update();
            out_.busy_fraction.push_back(busy / cfg_.horizon);
        }
        std::stable_sort(out_.latencies.begin(), out_.latencies.end(),
                         [](const LatencySample& a, const LatencySample& b) {
                             return a.arrival_time < b.arrival_time;
                         });
        return std::move(out_);
    }

    const RunParams& cfg_;
    Source& source_;
    std::uint32_t n_;
    std::uint32_t d_;
    std::vector<Server> servers_;
    std::vector<std::uint32_t> chosen_;
    std::vector<double> works_;
    std::vector<JobRec> jobs_;
    std::vector<ReplicaRec> replicas_;
    std::vector<std::uint32_t> free_jobs_;
    EventCalendar calendar_;
    std::uint64_t replica_seq_ = 0;
    double sample_step_ = 0.0;
    double next_sample_ = 0.0;
    SimOutput out_;
};

template <typename Source>
SimOutput run_kernel(Discipline discipline, const RunParams& params, Source& source) {
    if (discipline == Discipline::FCFS) return Kernel<FcfsServer, Source>(params, source).run();
    return Kernel<PsServer, Source>(params, source).run();
}

}  // namespace

SimOutput run_simulation(const SimConfig& cfg) {
    validate(cfg);
    const RunParams params{static_cast<std::uint32_t>(cfg.servers),
                           static_cast<std::uint32_t>(cfg.replicas), cfg.horizon, cfg.warmup,
                           cfg.backlog_samples};
    PoissonSource source(cfg);
    return run_kernel(cfg.discipline, params, source);
}

SimOutput run_scripted(int servers, Discipline discipline, const std::vector<ScriptedJob>& jobs,
                       double horizon, double warmup, int backlog_samples) {
    if (servers < 1) throw ConfigError("number of servers N must be >= 1");
    if (jobs.empty()) throw ConfigError("run_scripted: no jobs");
    const std::size_t d = jobs.front().servers.size();
    double last = 0.0;
    for (const auto& j : jobs) {
        if (j.servers.size() != d || j.works.size() != d || d == 0) {
            throw ConfigError("run_scripted: every job needs the same d servers and d works");
        }
        std::vector<std::uint32_t> sorted = j.servers;
        std::sort(sorted.begin(), sorted.end());
        if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end() ||
            sorted.back() >= static_cast<std::uint32_t>(servers)) {
            throw ConfigError("run_scripted: servers must be distinct indices below N");
        }
        if (std::any_of(j.works.begin(), j.works.end(), [](double w) { return !(w > 0.0); })) {
            throw ConfigError("run_scripted: works must be positive");
        }
        if (j.arrival_time < last) throw ConfigError("run_scripted: jobs must be sorted by arrival");
        last = j.arrival_time;
    }
    const RunParams params{static_cast<std::uint32_t>(servers), static_cast<std::uint32_t>(d),
                           horizon, warmup, backlog_samples};
    ScriptedSource source(jobs);
    return run_kernel(discipline, params, source);
}

void write_latency_csv(std::ostream& os, const SimOutput& out) {
    CsvWriter csv(os);
    csv.header({"arrival_time", "latency"});
    for (const auto& s : out.latencies) {
        os << format_number(s.arrival_time) << ',' << format_number(s.latency) << '\n';
    }
}

}  // namespace redsim

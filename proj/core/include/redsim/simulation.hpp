#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "redsim/distributions.hpp"

namespace redsim {

enum class Discipline { FCFS, PS };

const char* to_string(Discipline d) noexcept;

struct SimConfig {
    int servers = 1;    // N
    double lambda = 0.5;  // Poisson arrival rate
    int replicas = 1;   // d, 1 <= d <= N
    Discipline discipline = Discipline::FCFS;
    JobSizeDistribution dist = JobSizeDistribution::exponential(1.0);
    ReplicaDependence dependence = ReplicaDependence::IID;
    double horizon = 1e5;
    double warmup = 1e4;
    std::uint64_t seed = 1;
    /// Number of equally spaced backlog observations over [0, horizon].
    int backlog_samples = 200;
};

/// Throws ConfigError on any violated invariant.
void validate(const SimConfig& cfg);

/// Returns `cfg` with the warm-up set to the default 10% of the horizon.
SimConfig with_default_warmup(SimConfig cfg);

struct LatencySample {
    double arrival_time;
    double latency;
    friend bool operator==(const LatencySample&, const LatencySample&) = default;
};

struct BacklogPoint {
    double time;
    double backlog;  // total unfinished work over all servers
    friend bool operator==(const BacklogPoint&, const BacklogPoint&) = default;
};

struct SimOutput {
    std::vector<LatencySample> latencies;  // completions after warm-up, sorted by arrival
    std::uint64_t jobs_observed = 0;   // arrivals in [0, horizon]
    std::uint64_t jobs_completed = 0;  // all completions, warm-up included
    std::uint64_t replicas_cancelled = 0;
    std::uint64_t events_scheduled = 0;
    std::vector<double> busy_fraction;  // per server, over [0, horizon]
    double max_backlog = 0.0;
    std::vector<BacklogPoint> backlog_trace;

    /// Latency values only, in arrival order.
    std::vector<double> latency_values() const;

    friend bool operator==(const SimOutput&, const SimOutput&) = default;
};

/// Runs one c.o.c. redundancy-d simulation. Deterministic in `cfg`.
SimOutput run_simulation(const SimConfig& cfg);

/// A job with explicit placement and replica sizes, for scripted runs.
struct ScriptedJob {
    double arrival_time;
    std::vector<std::uint32_t> servers;  // d distinct indices < N
    std::vector<double> works;           // one size per listed server
};

/// Runs the same kernel on a fixed list of jobs (sorted by arrival time, all
/// with the same d) instead of a random arrival process. Events after
/// `horizon` are not processed.
SimOutput run_scripted(int servers, Discipline discipline, const std::vector<ScriptedJob>& jobs,
                       double horizon, double warmup = 0.0, int backlog_samples = 0);

/// Writes `arrival_time,latency` rows (header first) in shortest round-trip form.
void write_latency_csv(std::ostream& os, const SimOutput& out);

}  // namespace redsim

#pragma once

#include "redsim/distributions.hpp"

namespace redsim {

/// Mean latency of FCFS when the system reduces to an M/G/1 queue with
/// service time X_min (d = 1 or d = N):
///   rho E[X_min^2] / (2 (1 - rho) E[X_min]) + E[X_min].
/// Throws UnstableLoadError for rho >= 1 and HeavyTailError when the second
/// moment is infinite.
double pk_fcfs_latency(double rho_tilde, double e_min, const Moment& e_min2);
double pk_fcfs_latency(double rho_tilde, double e_min, double e_min2);

/// Mean latency of egalitarian PS in the same reduced cases: E[X_min] / (1 - rho).
double ps_latency(double rho_tilde, double e_min);

struct LoadSummary {
    double rho_tilde;  // lambda d E[X_min] / N
    double rho_plain;  // lambda E[X] / N
    bool stable_ps;    // rho_tilde < 1
};

LoadSummary load_summary(int servers, double lambda, int replicas,
                         const JobSizeDistribution& dist, ReplicaDependence dep);

/// Largest arrival rate the PS system sustains: N / (d E[X_min]).
double ps_critical_lambda(int servers, int replicas, const JobSizeDistribution& dist,
                          ReplicaDependence dep);

enum class ReplicationPreference { NoReplication, FullReplication, Indifferent };

const char* to_string(ReplicationPreference p) noexcept;

/// Compares N E[min(X_1..X_N)] with E[X] for i.i.d. replicas; within 1e-9
/// the two are treated as equal.
ReplicationPreference replication_preference(const JobSizeDistribution& dist, int servers);

}  // namespace redsim

#include "redsim/analytics.hpp"

#include <cmath>
#include <stdexcept>

#include "redsim/errors.hpp"

namespace redsim {

namespace {

void require_stable(double rho) {
    if (!(rho >= 0.0)) throw std::invalid_argument("load must be non-negative");
    if (rho >= 1.0) throw UnstableLoadError("load rho_tilde >= 1: no steady state");
}

}  // namespace

double pk_fcfs_latency(double rho_tilde, double e_min, const Moment& e_min2) {
    if (!e_min2.is_finite()) {
        throw HeavyTailError("FCFS mean latency needs a finite E[X_min^2]");
    }
    return pk_fcfs_latency(rho_tilde, e_min, e_min2.value());
}

double pk_fcfs_latency(double rho_tilde, double e_min, double e_min2) {
    require_stable(rho_tilde);
    if (!std::isfinite(e_min2)) {
        throw HeavyTailError("FCFS mean latency needs a finite E[X_min^2]");
    }
    return rho_tilde * e_min2 / (2.0 * (1.0 - rho_tilde) * e_min) + e_min;
}

double ps_latency(double rho_tilde, double e_min) {
    require_stable(rho_tilde);
    return e_min / (1.0 - rho_tilde);
}

LoadSummary load_summary(int servers, double lambda, int replicas,
                         const JobSizeDistribution& dist, ReplicaDependence dep) {
    if (servers < 1) throw std::invalid_argument("N must be >= 1");
    const double e_min = expected_min(dist, replicas, dep);
    const double rho_tilde = lambda * replicas * e_min / servers;
    const double rho_plain = lambda * moments(dist).mean / servers;
    return {rho_tilde, rho_plain, rho_tilde < 1.0};
}

double ps_critical_lambda(int servers, int replicas, const JobSizeDistribution& dist,
                          ReplicaDependence dep) {
    return servers / (replicas * expected_min(dist, replicas, dep));
}

const char* to_string(ReplicationPreference p) noexcept {
    switch (p) {
        case ReplicationPreference::NoReplication: return "no-replication";
        case ReplicationPreference::FullReplication: return "full-replication";
        case ReplicationPreference::Indifferent: return "indifferent";
    }
    return "?";
}

ReplicationPreference replication_preference(const JobSizeDistribution& dist, int servers) {
    const double full = servers * expected_min(dist, servers, ReplicaDependence::IID);
    const double none = moments(dist).mean;
    if (std::abs(full - none) <= 1e-9 * std::max(1.0, none)) {
        return ReplicationPreference::Indifferent;
    }
    return full > none ? ReplicationPreference::NoReplication
                       : ReplicationPreference::FullReplication;
}

}  // namespace redsim

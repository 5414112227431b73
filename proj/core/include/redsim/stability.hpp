#pragma once

#include <span>
#include <vector>

#include "redsim/simulation.hpp"

namespace redsim {

/// Least-squares slope of total backlog against time over the points whose
/// time is at least `from_fraction` of the last observation time.
double backlog_slope(const std::vector<BacklogPoint>& trace, double from_fraction = 0.5);

/// Default instability threshold on the backlog slope: 0.01 N.
double default_slope_threshold(int servers);

/// True when the second-half backlog slope does not exceed `slope_threshold`.
bool backlog_is_stable(const SimOutput& out, double slope_threshold);

struct StabilityVerdict {
    double lambda;
    double slope;
    bool stable;
};

struct StabilityProbeResult {
    double lambda_star;
    double bracket_stable;    // largest lambda classified stable
    double bracket_unstable;  // smallest lambda classified unstable
    std::vector<StabilityVerdict> evaluations;  // grid points in order, then refinements
};

struct StabilityProbeOptions {
    double slope_threshold = 0.0;  // <= 0 means 0.01 N
    int refinements = 4;
    unsigned threads = 0;
};

/// Estimates the critical arrival rate by simulating `base` at every grid
/// point, bracketing the first stable-to-unstable transition and bisecting it.
/// Throws InfeasibleError when the grid is entirely stable or entirely unstable.
StabilityProbeResult stability_probe(const SimConfig& base, std::span<const double> lambda_grid,
                                     const StabilityProbeOptions& options = {});

}  // namespace redsim

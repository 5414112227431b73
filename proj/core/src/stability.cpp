#include "redsim/stability.hpp"

#include <algorithm>
#include <stdexcept>

#include "redsim/errors.hpp"
#include "redsim/parallel.hpp"

namespace redsim {

double backlog_slope(const std::vector<BacklogPoint>& trace, double from_fraction) {
    if (trace.empty()) throw InsufficientDataError("backlog_slope: empty backlog trace");
    const double cutoff = from_fraction * trace.back().time;
    double n = 0.0, st = 0.0, sb = 0.0;
    for (const auto& p : trace) {
        if (p.time < cutoff) continue;
        n += 1.0;
        st += p.time;
        sb += p.backlog;
    }
    if (n < 3.0) throw InsufficientDataError("backlog_slope: fewer than 3 points in window");
    const double mt = st / n;
    const double mb = sb / n;
    double cov = 0.0, var = 0.0;
    for (const auto& p : trace) {
        if (p.time < cutoff) continue;
        cov += (p.time - mt) * (p.backlog - mb);
        var += (p.time - mt) * (p.time - mt);
    }
    return cov / var;
}

double default_slope_threshold(int servers) { return 0.01 * servers; }

bool backlog_is_stable(const SimOutput& out, double slope_threshold) {
    return backlog_slope(out.backlog_trace) <= slope_threshold;
}

StabilityProbeResult stability_probe(const SimConfig& base, std::span<const double> lambda_grid,
                                     const StabilityProbeOptions& options) {
    if (lambda_grid.size() < 2) throw ConfigError("stability_probe: grid needs >= 2 points");
    if (!std::is_sorted(lambda_grid.begin(), lambda_grid.end()) ||
        std::adjacent_find(lambda_grid.begin(), lambda_grid.end()) != lambda_grid.end()) {
        throw ConfigError("stability_probe: grid must be strictly increasing");
    }
    validate(base);
    const double threshold = options.slope_threshold > 0.0 ? options.slope_threshold
                                                           : default_slope_threshold(base.servers);
    auto evaluate = [&](double lambda) {
        SimConfig cfg = base;
        cfg.lambda = lambda;
        if (cfg.backlog_samples < 20) cfg.backlog_samples = 200;
        const SimOutput out = run_simulation(cfg);
        const double slope = backlog_slope(out.backlog_trace);
        return StabilityVerdict{lambda, slope, slope <= threshold};
    };

    StabilityProbeResult result{};
    result.evaluations.resize(lambda_grid.size());
    parallel_for(
        lambda_grid.size(), [&](std::size_t i) { result.evaluations[i] = evaluate(lambda_grid[i]); },
        options.threads);

    const auto& grid = result.evaluations;
    const auto first_unstable =
        std::find_if(grid.begin(), grid.end(), [](const auto& v) { return !v.stable; });
    if (first_unstable == grid.end()) {
        throw InfeasibleError("stability_probe: grid entirely stable; extend it upward");
    }
    if (first_unstable == grid.begin()) {
        throw InfeasibleError("stability_probe: grid entirely unstable; extend it downward");
    }
    double stable = std::prev(first_unstable)->lambda;
    double unstable = first_unstable->lambda;
    for (int step = 0; step < options.refinements; ++step) {
        const double mid = 0.5 * (stable + unstable);
        const StabilityVerdict v = evaluate(mid);
        result.evaluations.push_back(v);
        (v.stable ? stable : unstable) = mid;
    }
    result.bracket_stable = stable;
    result.bracket_unstable = unstable;
    result.lambda_star = 0.5 * (stable + unstable);
    return result;
}

}  // namespace redsim

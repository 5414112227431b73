#include <gtest/gtest.h>

#include <cmath>

#include "redsim/analytics.hpp"
#include "redsim/errors.hpp"
#include "redsim/stability.hpp"

namespace redsim {
namespace {

SimConfig probe_base(int n, int d, Discipline disc, JobSizeDistribution dist) {
    SimConfig cfg;
    cfg.servers = n;
    cfg.replicas = d;
    cfg.discipline = disc;
    cfg.dist = dist;
    cfg.horizon = 2e4;
    cfg.warmup = 2e3;
    cfg.seed = 21;
    return cfg;
}

std::vector<double> grid_around(double centre) {
    std::vector<double> g;
    for (int i = 5; i <= 15; ++i) g.push_back(centre * i / 10.0);
    return g;
}

void expect_bracketed(const StabilityProbeResult& r) {
    EXPECT_LT(r.bracket_stable, r.bracket_unstable);
    EXPECT_GE(r.lambda_star, r.bracket_stable);
    EXPECT_LE(r.lambda_star, r.bracket_unstable);
    bool saw_stable = false, saw_unstable = false;
    for (const auto& v : r.evaluations) {
        if (v.lambda == r.bracket_stable) saw_stable = saw_stable || v.stable;
        if (v.lambda == r.bracket_unstable) saw_unstable = saw_unstable || !v.stable;
    }
    EXPECT_TRUE(saw_stable);
    EXPECT_TRUE(saw_unstable);
}

TEST(BacklogSlope, LinearTrace) {
    std::vector<BacklogPoint> trace;
    for (int i = 0; i <= 100; ++i) trace.push_back({static_cast<double>(i), 3.0 + 0.25 * i});
    EXPECT_NEAR(backlog_slope(trace), 0.25, 1e-12);
    // Only the second half counts: a flat tail after early growth is stable.
    std::vector<BacklogPoint> bent;
    for (int i = 0; i <= 100; ++i) bent.push_back({static_cast<double>(i), i < 50 ? 2.0 * i : 100.0});
    EXPECT_NEAR(backlog_slope(bent), 0.0, 1e-12);
    EXPECT_THROW(backlog_slope({}), InsufficientDataError);
}

TEST(BacklogSlope, DefaultThreshold) {
    EXPECT_DOUBLE_EQ(default_slope_threshold(3), 0.03);
    EXPECT_DOUBLE_EQ(default_slope_threshold(100), 1.0);
}

TEST(BacklogSlope, OverloadDriftsAtExcessRate) {
    // Work arrives at rate lambda E[X] = 2 against capacity 1.
    SimConfig cfg = probe_base(1, 1, Discipline::FCFS, JobSizeDistribution::exponential(1.0));
    cfg.lambda = 2.0;
    const SimOutput out = run_simulation(cfg);
    EXPECT_NEAR(backlog_slope(out.backlog_trace), 1.0, 0.05);
    EXPECT_FALSE(backlog_is_stable(out, 0.01));
}

TEST(StabilityProbe, PsWeibullNwu) {
    const auto dist = normalize_to_unit_mean(JobSizeDistribution::weibull(0.8, 1.0));
    const double target = 2.0 / (2.0 * std::pow(2.0, -1.25));
    EXPECT_NEAR(ps_critical_lambda(2, 2, dist, ReplicaDependence::IID), target, 1e-9);
    const auto r = stability_probe(probe_base(2, 2, Discipline::PS, dist), grid_around(target));
    EXPECT_NEAR(r.lambda_star, target, 0.1 * target);
    EXPECT_EQ(r.evaluations.size(), 11u + 4u);
    expect_bracketed(r);
}

TEST(StabilityProbe, FcfsDeterministicNoReplication) {
    for (int n : {1, 4}) {
        const auto r = stability_probe(
            probe_base(n, 1, Discipline::FCFS, JobSizeDistribution::deterministic(1.0)),
            grid_around(n));
        EXPECT_NEAR(r.lambda_star, n, 0.1 * n);
        expect_bracketed(r);
    }
}

TEST(StabilityProbe, FcfsExponentialIid) {
    const auto r = stability_probe(
        probe_base(3, 2, Discipline::FCFS, JobSizeDistribution::exponential(1.0)), grid_around(3.0));
    EXPECT_NEAR(r.lambda_star, 3.0, 0.3);
    expect_bracketed(r);
}

TEST(StabilityProbe, DeterministicGivenSeed) {
    const SimConfig base = probe_base(2, 1, Discipline::PS, JobSizeDistribution::exponential(1.0));
    const auto grid = grid_around(2.0);
    const auto a = stability_probe(base, grid, {.threads = 1});
    const auto b = stability_probe(base, grid, {.threads = 2});
    EXPECT_EQ(a.lambda_star, b.lambda_star);
    ASSERT_EQ(a.evaluations.size(), b.evaluations.size());
    for (std::size_t i = 0; i < a.evaluations.size(); ++i) {
        EXPECT_EQ(a.evaluations[i].slope, b.evaluations[i].slope);
    }
}

TEST(StabilityProbe, RejectsOneSidedGrids) {
    const SimConfig base = probe_base(2, 1, Discipline::PS, JobSizeDistribution::exponential(1.0));
    const std::vector<double> low{0.2, 0.4, 0.6};
    const std::vector<double> high{4.0, 5.0, 6.0};
    try {
        stability_probe(base, low);
        FAIL() << "expected InfeasibleError";
    } catch (const InfeasibleError& e) {
        EXPECT_NE(std::string(e.what()).find("entirely stable"), std::string::npos);
    }
    try {
        stability_probe(base, high);
        FAIL() << "expected InfeasibleError";
    } catch (const InfeasibleError& e) {
        EXPECT_NE(std::string(e.what()).find("entirely unstable"), std::string::npos);
    }
    const std::vector<double> unsorted{1.0, 0.5};
    EXPECT_THROW(stability_probe(base, unsorted), ConfigError);
    EXPECT_THROW(stability_probe(base, std::vector<double>{1.0}), ConfigError);
}

}  // namespace
}  // namespace redsim

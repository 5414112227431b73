#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "redsim/errors.hpp"
#include "redsim/experiments.hpp"

namespace redsim {
namespace {

namespace fs = std::filesystem;

std::string first_line(const fs::path& p) {
    std::ifstream in(p);
    std::string line;
    std::getline(in, line);
    return line;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

fs::path scratch(const std::string& name) {
    const auto dir = fs::temp_directory_path() / ("redsim_test_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

ExperimentSpec with_config(Scenario s, const std::string& text) {
    ExperimentSpec spec = default_spec(s);
    std::istringstream in(text);
    apply_config(spec, parse_config(in));
    return spec;
}

TEST(Scenario, NamesRoundTrip) {
    for (const Scenario s : {Scenario::Analytic, Scenario::Single, Scenario::Figure1Left,
                             Scenario::Figure1Right, Scenario::StabilityScan, Scenario::TailScan}) {
        EXPECT_EQ(parse_scenario(to_string(s)), s);
    }
    EXPECT_STREQ(to_string(Scenario::Single), "simulate");
    EXPECT_THROW(parse_scenario("figure2"), ConfigError);
}

TEST(DefaultSpec, FigureDefaults) {
    const auto left = default_spec(Scenario::Figure1Left);
    EXPECT_EQ(left.base.servers, 3);
    EXPECT_EQ(left.base.replicas, 2);
    ASSERT_EQ(left.distributions.size(), 3u);
    EXPECT_EQ(left.distributions[0].label, "WeibullNBU");
    EXPECT_EQ(left.distributions[1].label, "Exp");
    EXPECT_EQ(left.distributions[2].label, "WeibullNWU");
    EXPECT_EQ(left.replications, 5);
    EXPECT_NO_THROW(validate(left));

    const auto right = default_spec(Scenario::Figure1Right);
    EXPECT_EQ(right.base.servers, 100);
    EXPECT_EQ(right.base.lambda, 75.0);
    EXPECT_EQ(right.d_grid.back(), 10);
    EXPECT_EQ(right.distributions[0].label, "WeibullNBU_1.2");
    EXPECT_EQ(right.distributions[2].label, "WeibullNWU_0.8");
    EXPECT_GT(default_spec(Scenario::Figure1Right, true).d_grid.back(), 10);
    EXPECT_NO_THROW(validate(right));

    for (const Scenario s : {Scenario::Analytic, Scenario::Single, Scenario::StabilityScan,
                             Scenario::TailScan}) {
        EXPECT_NO_THROW(validate(default_spec(s))) << to_string(s);
    }
}

TEST(ApplyConfig, OverridesAndDistributions) {
    const auto spec = with_config(Scenario::Figure1Left, R"(
[scenario]
kind = figure1-left
servers = 4
d = 3
horizon = 1000
seed = 9
replications = 2
lambda_grid = 0.5, 1.5
discipline = ps
[distribution]
label = D
kind = deterministic
)");
    EXPECT_EQ(spec.base.servers, 4);
    EXPECT_EQ(spec.base.replicas, 3);
    EXPECT_EQ(spec.base.horizon, 1000.0);
    EXPECT_EQ(spec.base.warmup, 100.0);
    EXPECT_EQ(spec.base.seed, 9u);
    EXPECT_EQ(spec.replications, 2);
    EXPECT_EQ(spec.lambda_grid, (std::vector<double>{0.5, 1.5}));
    EXPECT_EQ(spec.disciplines, (std::vector<Discipline>{Discipline::PS}));
    ASSERT_EQ(spec.distributions.size(), 1u);
    EXPECT_EQ(spec.base.dist, JobSizeDistribution::deterministic(1.0));
    EXPECT_EQ(replication_seed(spec, 0), 9u);
    EXPECT_EQ(replication_seed(spec, 3), 12u);
}

TEST(ApplyConfig, Rejections) {
    EXPECT_THROW(with_config(Scenario::Figure1Left, "[scenario]\nkind = tail-scan\n"), ConfigError);
    EXPECT_THROW(with_config(Scenario::Figure1Left, "[scenario]\nspeed = 3\n"), ConfigError);
}

TEST(Validate, Rejections) {
    auto spec = default_spec(Scenario::Figure1Left);
    spec.lambda_grid = {0.5, 0.5};
    EXPECT_THROW(validate(spec), ConfigError);
    spec = default_spec(Scenario::Figure1Left);
    spec.lambda_grid = {-1.0, 0.5};
    EXPECT_THROW(validate(spec), ConfigError);
    spec = default_spec(Scenario::Figure1Left);
    spec.distributions[1].label = "WeibullNBU";
    EXPECT_THROW(validate(spec), ConfigError);
    spec = default_spec(Scenario::Figure1Right);
    spec.d_grid = {1, 101};
    EXPECT_THROW(validate(spec), ConfigError);
    spec = default_spec(Scenario::TailScan);
    spec.target_load = 1.2;
    EXPECT_THROW(validate(spec), ConfigError);
    spec = default_spec(Scenario::Single);
    spec.replications = 0;
    EXPECT_THROW(validate(spec), ConfigError);
}

TEST(RunAnalytic, MM1) {
    auto spec = default_spec(Scenario::Analytic);
    spec.base.servers = 1;
    spec.base.replicas = 1;
    spec.lambda_grid = {0.5};
    spec.distributions = {{"Exp", JobSizeDistribution::exponential(1.0)}};
    const auto res = run_analytic(spec);
    EXPECT_DOUBLE_EQ(*res.fcfs.value[0][0], 2.0);
    EXPECT_DOUBLE_EQ(*res.ps.value[0][0], 2.0);
    ASSERT_EQ(res.verdicts.size(), 1u);
    EXPECT_EQ(res.verdicts[0].second, ReplicationPreference::Indifferent);
}

TEST(RunAnalytic, DeterministicAtBoundaryIsInfeasible) {
    auto spec = default_spec(Scenario::Analytic);
    spec.lambda_grid = {1.0};
    spec.distributions = {{"Det", JobSizeDistribution::deterministic(1.0)}};
    spec.base.dependence = ReplicaDependence::IID;
    EXPECT_THROW(run_analytic(spec), InfeasibleError);
}

TEST(RunAnalytic, FullReplicationWeibullNwu) {
    auto spec = default_spec(Scenario::Analytic);
    spec.lambda_grid = {1.0};
    const auto dist = normalize_to_unit_mean(JobSizeDistribution::weibull(0.8, 1.0));
    spec.distributions = {{"NWU", dist}};
    const auto res = run_analytic(spec);
    const double e1 = std::pow(3.0, -1.25);
    const double e2 = second_moment_min_by_quadrature(dist, 3).value();
    const double rho = 1.0 * 3.0 * e1 / 3.0;
    EXPECT_NEAR(*res.fcfs.value[0][0], rho * e2 / (2.0 * (1.0 - rho) * e1) + e1, 1e-6);
    EXPECT_NEAR(*res.ps.value[0][0], e1 / (1.0 - rho), 1e-12);
    EXPECT_EQ(res.verdicts[0].second, ReplicationPreference::FullReplication);
}

TEST(RunAnalytic, RejectsPartialReplication) {
    auto spec = default_spec(Scenario::Analytic);
    spec.base.replicas = 2;
    try {
        run_analytic(spec);
        FAIL() << "expected ConfigError";
    } catch (const ConfigError& e) {
        EXPECT_NE(std::string(e.what()).find("d = 1"), std::string::npos);
    }
}

TEST(RunAnalytic, UnstableCellsEmptyAndHeavyTailFcfsEmpty) {
    auto spec = default_spec(Scenario::Analytic);
    spec.distributions = {{"P", normalize_to_unit_mean(JobSizeDistribution::pareto(1.5, 1.0))}};
    spec.base.replicas = 1;
    spec.lambda_grid = {0.5, 4.0};
    const auto res = run_analytic(spec);
    // Pareto(1.5) with d = 1 has infinite second moment.
    EXPECT_FALSE(res.fcfs.value[0][0]);
    EXPECT_TRUE(res.ps.value[0][0]);
    EXPECT_FALSE(res.ps.value[1][0]);
}

TEST(RunFigure, LeftPanelSmall) {
    auto spec = default_spec(Scenario::Figure1Left);
    spec.lambda_grid = {0.3, 3.0};
    spec.base.horizon = 4e3;
    spec.base.warmup = 4e2;
    spec.replications = 2;
    spec.threads = 1;
    const auto fig = run_figure1_left(spec);
    for (std::size_t c = 0; c < 3; ++c) {
        EXPECT_TRUE(fig.fcfs.value[0][c]);
        EXPECT_TRUE(fig.ps.value[0][c]);
        EXPECT_GT(*fig.ps.ci[0][c], 0.0);
    }
    // PS bound for Weibull(1.2) at d = 2 is below 3: empty cell, not a crash.
    EXPECT_FALSE(fig.ps.value[1][0]);
    EXPECT_TRUE(fig.ps.value[1][2]);

    const auto dir = scratch("figure");
    write_figure(fig, dir.string(), "ExpectedLatency_N3");
    EXPECT_EQ(first_line(dir / "ExpectedLatency_N3_FCFS.csv"), "lambda,WeibullNBU,Exp,WeibullNWU");
    EXPECT_EQ(first_line(dir / "ExpectedLatency_N3_PS.csv"), "lambda,WeibullNBU,Exp,WeibullNWU");
    EXPECT_EQ(first_line(dir / "ExpectedLatency_N3_PS_ci.csv"),
              "lambda,WeibullNBU_ci,Exp_ci,WeibullNWU_ci");
    const auto ps = slurp(dir / "ExpectedLatency_N3_PS.csv");
    EXPECT_NE(ps.find("\n3,,"), std::string::npos);
    EXPECT_EQ(ps.find('\r'), std::string::npos);

    const auto again = run_figure1_left(spec);
    EXPECT_EQ(again.fcfs.value, fig.fcfs.value);
    EXPECT_EQ(again.ps.ci, fig.ps.ci);
}

TEST(RunFigure, RightPanelHeader) {
    auto spec = default_spec(Scenario::Figure1Right);
    spec.d_grid = {1, 2};
    spec.base.horizon = 200;
    spec.base.warmup = 20;
    spec.replications = 1;
    spec.disciplines = {Discipline::PS};
    const auto fig = run_figure1_right(spec);
    const auto dir = scratch("right");
    write_figure(fig, dir.string(), "ExpectedLatency_N100");
    EXPECT_EQ(first_line(dir / "ExpectedLatency_N100_PS.csv"), "d,WeibullNBU_1.2,Exp,WeibullNWU_0.8");
    EXPECT_TRUE(fig.ps.value[0][1]);
    EXPECT_FALSE(fig.fcfs.value[0][1]);
}

TEST(RunTailScan, RejectsLightTails) {
    auto spec = default_spec(Scenario::TailScan);
    spec.distributions = {{"Det", JobSizeDistribution::deterministic(1.0)}};
    EXPECT_THROW(run_tail_scan(spec), ConfigError);
}

TEST(RunTailScan, PsSingleServerFollowsServiceTail) {
    auto spec = default_spec(Scenario::TailScan);
    spec.base.servers = 1;
    spec.base.replicas = 1;
    spec.base.horizon = 3e5;
    spec.base.warmup = 3e4;
    spec.target_load = 0.3;
    spec.disciplines = {Discipline::PS};
    spec.distributions = {{"P2", JobSizeDistribution::pareto(2.0, 1.0)}};
    const auto res = run_tail_scan(spec);
    ASSERT_EQ(res.rows.size(), 1u);
    EXPECT_EQ(res.rows[0].predicted_index, 2.0);
    EXPECT_NEAR(res.rows[0].rho_tilde, 0.3, 1e-12);
    EXPECT_NEAR(res.rows[0].estimate.index, 2.0, 0.4);
    EXPECT_FALSE(res.ps_minus_fcfs);

    const auto dir = scratch("tail");
    write_tail_scan(res, (dir / "tail_scan.csv").string());
    EXPECT_EQ(first_line(dir / "tail_scan.csv"),
              "discipline,distribution,lambda,rho_tilde,index,ci_halfwidth,k_used,predicted_index,samples");
}

TEST(RunStabilityScan, WritesRows) {
    auto spec = default_spec(Scenario::StabilityScan);
    spec.d_grid = {2};
    spec.base.servers = 2;
    spec.base.horizon = 1e4;
    spec.base.warmup = 1e3;
    spec.disciplines = {Discipline::PS};
    spec.distributions = {{"Exp", JobSizeDistribution::exponential(1.0)}};
    const auto rows = run_stability_scan(spec);
    ASSERT_EQ(rows.size(), 1u);
    EXPECT_DOUBLE_EQ(rows[0].analytic_ps, 2.0);
    EXPECT_NEAR(rows[0].lambda_star, 2.0, 0.2);
    const auto dir = scratch("stab");
    write_stability_scan(rows, (dir / "s.csv").string());
    EXPECT_EQ(first_line(dir / "s.csv"),
              "discipline,distribution,d,lambda_star,analytic_ps_lambda_star,relative_gap");
}

TEST(RunSingle, SummaryWhenEnoughSamples) {
    auto spec = default_spec(Scenario::Single);
    spec.base.horizon = 2e3;
    spec.base.warmup = 2e2;
    const auto res = run_single(spec);
    ASSERT_TRUE(res.summary);
    EXPECT_EQ(res.summary->n_batches, 20);
    spec.base.horizon = 5;
    spec.base.warmup = 0;
    EXPECT_FALSE(run_single(spec).summary);
}

}  // namespace
}  // namespace redsim

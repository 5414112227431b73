#include <gtest/gtest.h>

#include <cmath>

#include "redsim/analytics.hpp"
#include "redsim/errors.hpp"

namespace redsim {
namespace {

JobSizeDistribution unit_weibull(double k) {
    return normalize_to_unit_mean(JobSizeDistribution::weibull(k, 1.0));
}

TEST(PkFcfsLatency, Examples) {
    EXPECT_DOUBLE_EQ(pk_fcfs_latency(0.5, 1.0, 2.0), 2.0);
    EXPECT_DOUBLE_EQ(pk_fcfs_latency(0.0, 1.0, 5.0), 1.0);
    EXPECT_NEAR(pk_fcfs_latency(0.8, 0.5, 0.5), 2.5, 1e-12);
}

TEST(PkFcfsLatency, Rejections) {
    EXPECT_THROW(pk_fcfs_latency(1.0, 1.0, 2.0), UnstableLoadError);
    EXPECT_THROW(pk_fcfs_latency(1.3, 1.0, 2.0), UnstableLoadError);
    EXPECT_THROW(pk_fcfs_latency(0.5, 1.0, Moment::infinite()), HeavyTailError);
    EXPECT_DOUBLE_EQ(pk_fcfs_latency(0.5, 1.0, Moment::finite(2.0)), 2.0);
}

TEST(PsLatency, Examples) {
    EXPECT_DOUBLE_EQ(ps_latency(0.5, 1.0), 2.0);
    EXPECT_DOUBLE_EQ(ps_latency(0.0, 0.37), 0.37);
    EXPECT_NEAR(ps_latency(0.9, 0.42), 4.2, 1e-12);
    EXPECT_THROW(ps_latency(1.0, 1.0), UnstableLoadError);
}

TEST(LoadSummary, Examples) {
    const auto w = load_summary(2, 2.3, 2, unit_weibull(0.8), ReplicaDependence::IID);
    EXPECT_NEAR(w.rho_tilde, 2.3 * 2.0 * std::pow(2.0, -1.25) / 2.0, 1e-12);
    EXPECT_NEAR(w.rho_tilde, 0.967, 1e-3);
    EXPECT_TRUE(w.stable_ps);

    const auto e = load_summary(3, 3.0, 1, JobSizeDistribution::exponential(1.0), ReplicaDependence::IID);
    EXPECT_DOUBLE_EQ(e.rho_tilde, 1.0);
    EXPECT_DOUBLE_EQ(e.rho_plain, 1.0);
    EXPECT_FALSE(e.stable_ps);
}

TEST(LoadSummary, IdenticalUsesPlainMean) {
    for (int n : {2, 5, 9}) {
        for (int d = 1; d <= n; ++d) {
            for (const auto& dist : {unit_weibull(0.7), JobSizeDistribution::pareto(3.0, 2.0),
                                     JobSizeDistribution::exponential(4.0)}) {
                const double lambda = 0.37 * n;
                const auto s = load_summary(n, lambda, d, dist, ReplicaDependence::Identical);
                EXPECT_NEAR(s.rho_tilde, lambda * d * moments(dist).mean / n, 1e-12);
            }
        }
    }
}

TEST(LoadSummary, Invariants) {
    for (int n : {1, 3, 7}) {
        for (int d = 1; d <= n; ++d) {
            for (double lambda : {0.01, 0.5, 2.0, 6.0}) {
                for (double k : {0.6, 1.0, 1.5}) {
                    const auto s = load_summary(n, lambda, d, unit_weibull(k), ReplicaDependence::IID);
                    EXPECT_GE(s.rho_tilde, 0.0);
                    EXPECT_EQ(s.stable_ps, s.rho_tilde < 1.0);
                    if (d == 1) EXPECT_NEAR(s.rho_tilde, s.rho_plain, 1e-12);
                }
            }
        }
    }
}

TEST(PsCriticalLambda, InvertsLoad) {
    EXPECT_NEAR(ps_critical_lambda(2, 2, unit_weibull(0.8), ReplicaDependence::IID),
                2.0 / (2.0 * std::pow(2.0, -1.25)), 1e-9);
    EXPECT_NEAR(ps_critical_lambda(3, 2, JobSizeDistribution::exponential(1.0), ReplicaDependence::IID),
                3.0, 1e-12);
    const double lc = ps_critical_lambda(4, 3, unit_weibull(1.3), ReplicaDependence::IID);
    EXPECT_NEAR(load_summary(4, lc, 3, unit_weibull(1.3), ReplicaDependence::IID).rho_tilde, 1.0, 1e-12);
}

TEST(ReplicationPreference, Examples) {
    EXPECT_EQ(replication_preference(JobSizeDistribution::exponential(1.0), 5),
              ReplicationPreference::Indifferent);
    EXPECT_EQ(replication_preference(unit_weibull(1.2), 3), ReplicationPreference::NoReplication);
    EXPECT_EQ(replication_preference(unit_weibull(0.8), 3), ReplicationPreference::FullReplication);
    EXPECT_STREQ(to_string(ReplicationPreference::Indifferent), "indifferent");
}

TEST(ReplicationPreference, MatchesClosedFormRatio) {
    // N E[min] / E[X] = N^(1 - 1/k) for Weibull.
    for (int n : {2, 3, 10}) {
        for (double k : {0.5, 0.8, 0.95, 1.05, 1.2, 3.0}) {
            const double ratio = std::pow(n, 1.0 - 1.0 / k);
            const auto expected = ratio > 1.0 ? ReplicationPreference::NoReplication
                                              : ReplicationPreference::FullReplication;
            EXPECT_EQ(replication_preference(JobSizeDistribution::weibull(k, 2.5), n), expected);
        }
        EXPECT_EQ(replication_preference(JobSizeDistribution::exponential(0.3), n),
                  ReplicationPreference::Indifferent);
    }
}

TEST(FormulaProperties, AgreeForExponentialMinimum) {
    for (double rho : {0.0, 0.1, 0.5, 0.95}) {
        for (double mean : {0.2, 1.0, 3.0}) {
            EXPECT_NEAR(pk_fcfs_latency(rho, mean, 2.0 * mean * mean), ps_latency(rho, mean),
                        1e-12 * ps_latency(rho, mean));
        }
    }
}

TEST(FormulaProperties, OrderingFollowsNormalisedSecondMoment) {
    for (double rho : {0.05, 0.4, 0.9}) {
        for (double ratio : {1.0, 1.5, 1.99, 2.01, 3.0, 10.0}) {
            const double m = 0.7;
            const double fcfs = pk_fcfs_latency(rho, m, ratio * m * m);
            const double ps = ps_latency(rho, m);
            if (ratio < 2.0) EXPECT_LT(fcfs, ps);
            if (ratio > 2.0) EXPECT_GT(fcfs, ps);
        }
    }
}

TEST(FormulaProperties, LimitsInLoad) {
    const double m = 0.8, m2 = 1.1;
    EXPECT_NEAR(pk_fcfs_latency(1e-12, m, m2), m, 1e-9);
    EXPECT_NEAR(ps_latency(1e-12, m), m, 1e-9);
    EXPECT_GT(pk_fcfs_latency(1.0 - 1e-9, m, m2), 1e6);
    EXPECT_GT(ps_latency(1.0 - 1e-9, m), 1e6);
    double prev_f = 0.0, prev_p = 0.0;
    for (double rho = 0.0; rho < 0.99; rho += 0.05) {
        const double f = pk_fcfs_latency(rho, m, m2);
        const double p = ps_latency(rho, m);
        EXPECT_GT(f, prev_f);
        EXPECT_GT(p, prev_p);
        prev_f = f;
        prev_p = p;
    }
}

TEST(FormulaProperties, FullReplicationWithQuadratureMoments) {
    const auto dist = unit_weibull(1.2);
    const double e1 = expected_min_by_quadrature(dist, 3);
    const double e2 = second_moment_min_by_quadrature(dist, 3).value();
    const double lambda = 0.8 * ps_critical_lambda(3, 3, dist, ReplicaDependence::IID);
    const double rho = load_summary(3, lambda, 3, dist, ReplicaDependence::IID).rho_tilde;
    EXPECT_NEAR(rho, 0.8, 1e-9);
    // Weibull(1.2) has normalised second moment below 2: FCFS wins.
    EXPECT_LT(pk_fcfs_latency(rho, e1, e2), ps_latency(rho, e1));
}

}  // namespace
}  // namespace redsim

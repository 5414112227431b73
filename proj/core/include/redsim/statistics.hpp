#pragma once

#include <span>
#include <vector>

namespace redsim {

struct BatchMeansResult {
    double mean;
    double ci_halfwidth;  // 95%, Student t with n_batches - 1 degrees of freedom
    int n_batches;
};

/// Two-sided quantile t such that P(|T_dof| <= t) = confidence.
double student_t_critical(double confidence, int dof);

/// Splits arrival-ordered samples into `n_batches` equal contiguous batches
/// (the n mod n_batches earliest samples are dropped). Requires
/// n_batches >= 10 and at least 10 samples per batch.
BatchMeansResult batch_means(std::span<const double> samples, int n_batches);

/// The individual batch means behind batch_means().
std::vector<double> batch_mean_values(std::span<const double> samples, int n_batches);

/// Mean and t-interval of already computed batch means (at least 2).
BatchMeansResult summarize_batch_means(std::span<const double> means);

/// Batch means of several independent replications pooled into one interval.
BatchMeansResult pooled_batch_means(const std::vector<std::vector<double>>& replications,
                                    int n_batches_each);

struct CcdfPoint {
    double x;
    double probability;  // P(R > x)
};

/// Exact empirical tail probabilities of a fixed sample.
class EmpiricalCcdf {
public:
    explicit EmpiricalCcdf(std::span<const double> samples);

    double probability_above(double x) const;

    /// Nearest-rank percentile, q in (0, 1].
    double percentile(double q) const;

    /// `n_points` log-spaced abscissae from the 50th to the 99.9th percentile.
    std::vector<CcdfPoint> log_grid(int n_points) const;

    std::size_t size() const noexcept { return sorted_.size(); }

private:
    std::vector<double> sorted_;
};

std::vector<CcdfPoint> empirical_ccdf(std::span<const double> samples, int n_points);

struct TailIndexEstimate {
    double index;  // estimated nu in P(R > x) ~ x^-nu
    int k_used;
    double ci_halfwidth;  // 1.96 index / sqrt(k)
};

/// Hill estimator over the top ceil(k_fraction n) order statistics.
/// Requires n >= 1000, 0 < k_fraction <= 0.2, positive samples.
TailIndexEstimate hill_tail_index(std::span<const double> samples, double k_fraction = 0.05);

}  // namespace redsim

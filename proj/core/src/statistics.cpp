#include "redsim/statistics.hpp"

#include <boost/math/distributions/students_t.hpp>

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <stdexcept>

#include "redsim/errors.hpp"

namespace redsim {

namespace {

BatchMeansResult summarize(std::span<const double> means) {
    if (means.size() < 2) throw InsufficientDataError("batch means: need at least 2 batches");
    const auto n = static_cast<double>(means.size());
    const double mean = std::accumulate(means.begin(), means.end(), 0.0) / n;
    double ss = 0.0;
    for (double m : means) ss += (m - mean) * (m - mean);
    const double var = ss / (n - 1.0);
    const int batches = static_cast<int>(means.size());
    const double half = student_t_critical(0.95, batches - 1) * std::sqrt(var / n);
    return {mean, half, batches};
}

std::vector<double> means_of_batches(std::span<const double> samples, int n_batches) {
    if (n_batches < 10) throw std::invalid_argument("batch_means: need at least 10 batches");
    if (samples.size() < 10 * static_cast<std::size_t>(n_batches)) {
        throw InsufficientDataError("batch_means: need at least 10 samples per batch");
    }
    const std::size_t size = samples.size() / static_cast<std::size_t>(n_batches);
    const std::size_t skip = samples.size() - size * static_cast<std::size_t>(n_batches);
    std::vector<double> means;
    means.reserve(static_cast<std::size_t>(n_batches));
    for (int b = 0; b < n_batches; ++b) {
        const auto first = samples.begin() + static_cast<std::ptrdiff_t>(skip + b * size);
        const double sum = std::accumulate(first, first + static_cast<std::ptrdiff_t>(size), 0.0);
        means.push_back(sum / static_cast<double>(size));
    }
    return means;
}

}  // namespace

double student_t_critical(double confidence, int dof) {
    if (dof < 1) throw std::invalid_argument("student_t_critical: dof must be >= 1");
    const boost::math::students_t dist(dof);
    return boost::math::quantile(dist, 0.5 + confidence / 2.0);
}

std::vector<double> batch_mean_values(std::span<const double> samples, int n_batches) {
    return means_of_batches(samples, n_batches);
}

BatchMeansResult summarize_batch_means(std::span<const double> means) { return summarize(means); }

BatchMeansResult batch_means(std::span<const double> samples, int n_batches) {
    return summarize(means_of_batches(samples, n_batches));
}

BatchMeansResult pooled_batch_means(const std::vector<std::vector<double>>& replications,
                                    int n_batches_each) {
    std::vector<double> pooled;
    for (const auto& rep : replications) {
        const auto m = means_of_batches(rep, n_batches_each);
        pooled.insert(pooled.end(), m.begin(), m.end());
    }
    if (pooled.empty()) throw InsufficientDataError("pooled_batch_means: no replications");
    return summarize(pooled);
}

EmpiricalCcdf::EmpiricalCcdf(std::span<const double> samples)
    : sorted_(samples.begin(), samples.end()) {
    if (sorted_.empty()) throw InsufficientDataError("empirical ccdf of an empty sample");
    std::sort(sorted_.begin(), sorted_.end());
}

double EmpiricalCcdf::probability_above(double x) const {
    const auto it = std::upper_bound(sorted_.begin(), sorted_.end(), x);
    return static_cast<double>(sorted_.end() - it) / static_cast<double>(sorted_.size());
}

double EmpiricalCcdf::percentile(double q) const {
    if (!(q > 0.0 && q <= 1.0)) throw std::invalid_argument("percentile must be in (0, 1]");
    const auto rank = static_cast<std::size_t>(std::ceil(q * static_cast<double>(sorted_.size())));
    return sorted_[std::max<std::size_t>(rank, 1) - 1];
}

std::vector<CcdfPoint> EmpiricalCcdf::log_grid(int n_points) const {
    if (n_points < 1) throw std::invalid_argument("log_grid: n_points must be >= 1");
    const double lo = percentile(0.5);
    const double hi = percentile(0.999);
    if (!(lo > 0.0)) throw std::invalid_argument("log_grid: median must be positive");
    std::vector<CcdfPoint> out;
    if (n_points == 1 || hi <= lo) {
        out.push_back({lo, probability_above(lo)});
        return out;
    }
    const double a = std::log(lo);
    const double b = std::log(hi);
    out.reserve(static_cast<std::size_t>(n_points));
    for (int i = 0; i < n_points; ++i) {
        const double x = i + 1 == n_points ? hi : std::exp(a + (b - a) * i / (n_points - 1));
        out.push_back({x, probability_above(x)});
    }
    return out;
}

std::vector<CcdfPoint> empirical_ccdf(std::span<const double> samples, int n_points) {
    return EmpiricalCcdf(samples).log_grid(n_points);
}

TailIndexEstimate hill_tail_index(std::span<const double> samples, double k_fraction) {
    if (samples.size() < 1000) throw InsufficientDataError("hill_tail_index: need >= 1000 samples");
    if (!(k_fraction > 0.0 && k_fraction <= 0.2)) {
        throw std::invalid_argument("hill_tail_index: k_fraction must be in (0, 0.2]");
    }
    const auto n = samples.size();
    const auto k = static_cast<std::size_t>(std::ceil(k_fraction * static_cast<double>(n)));
    if (k < 10) throw InsufficientDataError("hill_tail_index: fewer than 10 exceedances");
    if (std::any_of(samples.begin(), samples.end(), [](double x) { return !(x > 0.0); })) {
        throw std::invalid_argument("hill_tail_index: samples must be positive");
    }

    // Top k+1 values in descending order; element k is the threshold X_(n-k).
    std::vector<double> top(samples.begin(), samples.end());
    std::nth_element(top.begin(), top.begin() + static_cast<std::ptrdiff_t>(k), top.end(),
                     std::greater<>());
    const double threshold = top[k];
    double sum = 0.0;
    for (std::size_t i = 0; i < k; ++i) sum += std::log(top[i] / threshold);
    if (!(sum > 0.0)) {
        throw InsufficientDataError("hill_tail_index: degenerate sample (zero Hill sum)");
    }
    const double index = static_cast<double>(k) / sum;
    return {index, static_cast<int>(k), 1.96 * index / std::sqrt(static_cast<double>(k))};
}

}  // namespace redsim

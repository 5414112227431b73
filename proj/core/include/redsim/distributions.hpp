#pragma once

#include <string>
#include <variant>
#include <vector>

#include "redsim/rng.hpp"

namespace redsim {

struct Exponential {
    double rate;  // E[X] = 1/rate
};

/// Survival exp(-(x/scale)^shape).
struct Weibull {
    double shape;
    double scale;
};

/// Pareto type I: survival (minimum/x)^index for x >= minimum.
struct Pareto {
    double index;
    double minimum;
};

struct Deterministic {
    double value;
};

/// Job-size law of a single replica. Only constructible with valid parameters.
class JobSizeDistribution {
public:
    using Params = std::variant<Exponential, Weibull, Pareto, Deterministic>;

    static JobSizeDistribution exponential(double rate);
    static JobSizeDistribution weibull(double shape, double scale);
    static JobSizeDistribution pareto(double index, double minimum);
    static JobSizeDistribution deterministic(double value);

    const Params& params() const noexcept { return params_; }

    template <typename T>
    bool is() const noexcept {
        return std::holds_alternative<T>(params_);
    }

    /// Short human-readable form, e.g. "weibull(shape=1.2,scale=1)".
    std::string describe() const;

    friend bool operator==(const JobSizeDistribution& a, const JobSizeDistribution& b);

private:
    explicit JobSizeDistribution(Params p) : params_(p) {}
    Params params_;
};

enum class ReplicaDependence { IID, Identical };

/// Unclassified covers families that satisfy neither aging inequality
/// everywhere (Pareto type I: its survival is flat below the minimum).
enum class AgingClass { NBU, NWU, ExponentialBoundary, Unclassified };

const char* to_string(ReplicaDependence dep) noexcept;
const char* to_string(AgingClass aging) noexcept;

/// A moment that may diverge. Reading the value of an infinite moment throws
/// HeavyTailError.
class Moment {
public:
    static Moment finite(double v) { return Moment(v, true); }
    static Moment infinite() { return Moment(0.0, false); }

    bool is_finite() const noexcept { return finite_; }
    double value() const;

private:
    Moment(double v, bool f) : value_(v), finite_(f) {}
    double value_;
    bool finite_;
};

struct Moments {
    double mean;
    Moment second_moment;
    Moment cv_squared;  // Var[X] / E[X]^2
};

/// Inverse-CDF transform of a single uniform draw u in (0,1).
double quantile_from_uniform(const JobSizeDistribution& dist, double u);

/// One draw; consumes exactly one step of `rng` for every family.
double sample(const JobSizeDistribution& dist, RandomStream& rng);

/// P(X > x). Throws std::invalid_argument for negative x.
double survival(const JobSizeDistribution& dist, double x);

Moments moments(const JobSizeDistribution& dist);

/// Same family and shape, scale chosen so that E[X] = 1.
JobSizeDistribution normalize_to_unit_mean(const JobSizeDistribution& dist);

/// E[min(X_1..X_d)]. Closed form for every supported family.
double expected_min(const JobSizeDistribution& dist, int d, ReplicaDependence dep);

/// E[min(X_1..X_d)^2]; infinite when the integral diverges.
Moment second_moment_min(const JobSizeDistribution& dist, int d, ReplicaDependence dep);

// Quadrature route for i.i.d. replicas: integrates survival(x)^d (order 1) or
// 2x survival(x)^d (order 2) over (0, inf). Independent of the closed forms.
double expected_min_by_quadrature(const JobSizeDistribution& dist, int d);
Moment second_moment_min_by_quadrature(const JobSizeDistribution& dist, int d);

/// Parametric aging class, cross-checked against the defining inequality
/// F(x+y) <=> F(x)F(y) on a 50x50 log-spaced grid. Throws std::logic_error if
/// the grid contradicts the parametric rule.
AgingClass classify_aging(const JobSizeDistribution& dist);

struct MinWorkPoint {
    int d;
    double work;  // d * E[X_min] for i.i.d. replicas
};

std::vector<MinWorkPoint> min_work_profile(const JobSizeDistribution& dist, int d_max);

}  // namespace redsim

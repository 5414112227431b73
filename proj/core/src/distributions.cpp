#include "redsim/distributions.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "redsim/errors.hpp"

namespace redsim {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

void require_positive(double v, const char* what) {
    if (!(v > 0.0) || !std::isfinite(v)) {
        throw ConfigError(std::string(what) + " must be a positive finite number");
    }
}

void require_replicas(int d) {
    if (d < 1) throw std::invalid_argument("number of replicas d must be >= 1");
}

// Integral of g over (lo, inf) via x = lo + t/(1-t), adaptive Gauss-Kronrod.
template <typename F>
double integrate_to_infinity(F g, double lo, double* error) {
    auto transformed = [&](double t) {
        const double one_minus = 1.0 - t;
        const double x = lo + t / one_minus;
        const double v = g(x);
        return v == 0.0 ? 0.0 : v / (one_minus * one_minus);
    };
    double err = 0.0;
    const double value = boost::math::quadrature::gauss_kronrod<double, 15>::integrate(
        transformed, 0.0, 1.0, 20, 1e-11, &err);
    if (error) *error = err;
    return value;
}

template <typename F>
double integrate_finite(F g, double lo, double hi, double* error) {
    double err = 0.0;
    const double value =
        boost::math::quadrature::gauss_kronrod<double, 15>::integrate(g, lo, hi, 20, 1e-11, &err);
    if (error) *error = err;
    return value;
}

// Characteristic scale of the minimum of d replicas (or a kink of the
// survival function); splitting there lets the adaptive rule converge quickly.
double breakpoint(const JobSizeDistribution& dist, int d) {
    return std::visit(Overloaded{
                          [d](const Exponential& e) { return 1.0 / (e.rate * d); },
                          [d](const Weibull& w) { return w.scale * std::pow(d, -1.0 / w.shape); },
                          [](const Pareto& p) { return p.minimum; },
                          [](const Deterministic& c) { return c.value; },
                      },
                      dist.params());
}

// Integral of x^(order-1) * order * survival(x)^d over (0, inf).
Moment min_moment_by_quadrature(const JobSizeDistribution& dist, int d, int order) {
    require_replicas(d);
    auto integrand = [&](double x) {
        const double s = std::pow(survival(dist, x), d);
        return order == 1 ? s : 2.0 * x * s;
    };
    const double b = breakpoint(dist, d);
    // x = u^2 on [0, b] smooths the x^(shape) cusp of small-shape Weibull at 0.
    auto squared = [&](double u) { return 2.0 * u * integrand(u * u); };
    double err_lo = 0.0;
    double err_hi = 0.0;
    const double lo = integrate_finite(squared, 0.0, std::sqrt(b), &err_lo);
    const double hi = integrate_to_infinity(integrand, b, &err_hi);
    const double total = lo + hi;
    if (!std::isfinite(total) || err_lo + err_hi > 1e-6 * std::abs(total)) {
        return Moment::infinite();
    }
    return Moment::finite(total);
}

}  // namespace

JobSizeDistribution JobSizeDistribution::exponential(double rate) {
    require_positive(rate, "exponential rate");
    return JobSizeDistribution(Exponential{rate});
}

JobSizeDistribution JobSizeDistribution::weibull(double shape, double scale) {
    require_positive(shape, "weibull shape");
    require_positive(scale, "weibull scale");
    return JobSizeDistribution(Weibull{shape, scale});
}

JobSizeDistribution JobSizeDistribution::pareto(double index, double minimum) {
    require_positive(minimum, "pareto minimum");
    if (!(index > 1.0) || !std::isfinite(index)) {
        throw ConfigError("pareto index must be > 1 so that the mean is finite");
    }
    return JobSizeDistribution(Pareto{index, minimum});
}

JobSizeDistribution JobSizeDistribution::deterministic(double value) {
    require_positive(value, "deterministic value");
    return JobSizeDistribution(Deterministic{value});
}

std::string JobSizeDistribution::describe() const {
    std::ostringstream os;
    std::visit(Overloaded{
                   [&](const Exponential& e) { os << "exponential(rate=" << e.rate << ")"; },
                   [&](const Weibull& w) {
                       os << "weibull(shape=" << w.shape << ",scale=" << w.scale << ")";
                   },
                   [&](const Pareto& p) {
                       os << "pareto(index=" << p.index << ",minimum=" << p.minimum << ")";
                   },
                   [&](const Deterministic& c) { os << "deterministic(value=" << c.value << ")"; },
               },
               params_);
    return os.str();
}

bool operator==(const JobSizeDistribution& a, const JobSizeDistribution& b) {
    return std::visit(Overloaded{
                          [](const Exponential& x, const Exponential& y) { return x.rate == y.rate; },
                          [](const Weibull& x, const Weibull& y) {
                              return x.shape == y.shape && x.scale == y.scale;
                          },
                          [](const Pareto& x, const Pareto& y) {
                              return x.index == y.index && x.minimum == y.minimum;
                          },
                          [](const Deterministic& x, const Deterministic& y) {
                              return x.value == y.value;
                          },
                          [](const auto&, const auto&) { return false; },
                      },
                      a.params_, b.params_);
}

const char* to_string(ReplicaDependence dep) noexcept {
    return dep == ReplicaDependence::IID ? "iid" : "identical";
}

const char* to_string(AgingClass aging) noexcept {
    switch (aging) {
        case AgingClass::NBU: return "NBU";
        case AgingClass::NWU: return "NWU";
        case AgingClass::ExponentialBoundary: return "exponential-boundary";
        case AgingClass::Unclassified: return "unclassified";
    }
    return "?";
}

double Moment::value() const {
    if (!finite_) throw HeavyTailError("moment is infinite");
    return value_;
}

double quantile_from_uniform(const JobSizeDistribution& dist, double u) {
    return std::visit(Overloaded{
                          [u](const Exponential& e) { return -std::log(u) / e.rate; },
                          [u](const Weibull& w) {
                              return w.scale * std::pow(-std::log(u), 1.0 / w.shape);
                          },
                          [u](const Pareto& p) { return p.minimum * std::pow(u, -1.0 / p.index); },
                          [](const Deterministic& c) { return c.value; },
                      },
                      dist.params());
}

double sample(const JobSizeDistribution& dist, RandomStream& rng) {
    return quantile_from_uniform(dist, rng.uniform());
}

double survival(const JobSizeDistribution& dist, double x) {
    if (!(x >= 0.0)) throw std::invalid_argument("survival: x must be >= 0");
    return std::visit(Overloaded{
                          [x](const Exponential& e) { return std::exp(-e.rate * x); },
                          [x](const Weibull& w) { return std::exp(-std::pow(x / w.scale, w.shape)); },
                          [x](const Pareto& p) {
                              return x <= p.minimum ? 1.0 : std::pow(p.minimum / x, p.index);
                          },
                          [x](const Deterministic& c) { return x < c.value ? 1.0 : 0.0; },
                      },
                      dist.params());
}

Moments moments(const JobSizeDistribution& dist) {
    auto with_cv = [](double mean, Moment second) {
        if (!second.is_finite()) return Moments{mean, second, Moment::infinite()};
        const double m2 = mean * mean;
        return Moments{mean, second, Moment::finite(std::max(0.0, (second.value() - m2) / m2))};
    };
    return std::visit(
        Overloaded{
            [&](const Exponential& e) {
                return with_cv(1.0 / e.rate, Moment::finite(2.0 / (e.rate * e.rate)));
            },
            [&](const Weibull& w) {
                return with_cv(w.scale * std::tgamma(1.0 + 1.0 / w.shape),
                               Moment::finite(w.scale * w.scale * std::tgamma(1.0 + 2.0 / w.shape)));
            },
            [&](const Pareto& p) {
                const double mean = p.minimum * p.index / (p.index - 1.0);
                if (p.index <= 2.0) return with_cv(mean, Moment::infinite());
                return with_cv(mean,
                               Moment::finite(p.minimum * p.minimum * p.index / (p.index - 2.0)));
            },
            [&](const Deterministic& c) { return with_cv(c.value, Moment::finite(c.value * c.value)); },
        },
        dist.params());
}

JobSizeDistribution normalize_to_unit_mean(const JobSizeDistribution& dist) {
    return std::visit(
        Overloaded{
            [](const Exponential&) { return JobSizeDistribution::exponential(1.0); },
            [](const Weibull& w) {
                return JobSizeDistribution::weibull(w.shape, 1.0 / std::tgamma(1.0 + 1.0 / w.shape));
            },
            [](const Pareto& p) {
                return JobSizeDistribution::pareto(p.index, (p.index - 1.0) / p.index);
            },
            [](const Deterministic&) { return JobSizeDistribution::deterministic(1.0); },
        },
        dist.params());
}

double expected_min(const JobSizeDistribution& dist, int d, ReplicaDependence dep) {
    require_replicas(d);
    if (dep == ReplicaDependence::Identical) return moments(dist).mean;
    const double dd = d;
    return std::visit(
        Overloaded{
            [dd](const Exponential& e) { return 1.0 / (dd * e.rate); },
            [dd](const Weibull& w) {
                return w.scale * std::pow(dd, -1.0 / w.shape) * std::tgamma(1.0 + 1.0 / w.shape);
            },
            [dd](const Pareto& p) {
                const double idx = dd * p.index;
                return p.minimum * idx / (idx - 1.0);
            },
            [](const Deterministic& c) { return c.value; },
        },
        dist.params());
}

Moment second_moment_min(const JobSizeDistribution& dist, int d, ReplicaDependence dep) {
    require_replicas(d);
    if (dep == ReplicaDependence::Identical) return moments(dist).second_moment;
    const double dd = d;
    return std::visit(
        Overloaded{
            [dd](const Exponential& e) {
                const double r = dd * e.rate;
                return Moment::finite(2.0 / (r * r));
            },
            [dd](const Weibull& w) {
                const double s = w.scale * std::pow(dd, -1.0 / w.shape);
                return Moment::finite(s * s * std::tgamma(1.0 + 2.0 / w.shape));
            },
            [dd](const Pareto& p) {
                const double idx = dd * p.index;
                if (idx <= 2.0) return Moment::infinite();
                return Moment::finite(p.minimum * p.minimum * idx / (idx - 2.0));
            },
            [](const Deterministic& c) { return Moment::finite(c.value * c.value); },
        },
        dist.params());
}

double expected_min_by_quadrature(const JobSizeDistribution& dist, int d) {
    return min_moment_by_quadrature(dist, d, 1).value();
}

Moment second_moment_min_by_quadrature(const JobSizeDistribution& dist, int d) {
    if (const auto* p = std::get_if<Pareto>(&dist.params()); p && d * p->index <= 2.0) {
        // Integrand decays like x^(1 - d*index): not integrable.
        return Moment::infinite();
    }
    return min_moment_by_quadrature(dist, d, 2);
}

AgingClass classify_aging(const JobSizeDistribution& dist) {
    const AgingClass parametric = std::visit(
        Overloaded{
            [](const Exponential&) { return AgingClass::ExponentialBoundary; },
            [](const Weibull& w) {
                if (w.shape > 1.0) return AgingClass::NBU;
                if (w.shape < 1.0) return AgingClass::NWU;
                return AgingClass::ExponentialBoundary;
            },
            [](const Pareto&) { return AgingClass::Unclassified; },
            [](const Deterministic&) { return AgingClass::NBU; },
        },
        dist.params());

    constexpr int kGrid = 50;
    constexpr double kTol = 1e-12;
    const double scale = moments(dist).mean;
    const double lo = std::log(1e-3 * scale);
    const double hi = std::log(1e2 * scale);
    bool nbu_holds = true;
    bool nwu_holds = true;
    for (int i = 0; i < kGrid; ++i) {
        const double x = std::exp(lo + (hi - lo) * i / (kGrid - 1));
        const double sx = survival(dist, x);
        for (int j = 0; j < kGrid; ++j) {
            const double y = std::exp(lo + (hi - lo) * j / (kGrid - 1));
            const double joint = survival(dist, x + y);
            const double product = sx * survival(dist, y);
            if (joint > product + kTol) nbu_holds = false;
            if (joint < product - kTol) nwu_holds = false;
        }
    }

    const bool consistent = [&] {
        switch (parametric) {
            case AgingClass::NBU: return nbu_holds;
            case AgingClass::NWU: return nwu_holds;
            case AgingClass::ExponentialBoundary: return nbu_holds && nwu_holds;
            case AgingClass::Unclassified: return !nbu_holds && !nwu_holds;
        }
        return false;
    }();
    if (!consistent) {
        throw std::logic_error("classify_aging: grid check contradicts parametric class " +
                               std::string(to_string(parametric)) + " for " + dist.describe());
    }
    return parametric;
}

std::vector<MinWorkPoint> min_work_profile(const JobSizeDistribution& dist, int d_max) {
    if (d_max < 1) throw std::invalid_argument("min_work_profile: d_max must be >= 1");
    std::vector<MinWorkPoint> out;
    out.reserve(static_cast<std::size_t>(d_max));
    for (int d = 1; d <= d_max; ++d) {
        out.push_back({d, d * expected_min(dist, d, ReplicaDependence::IID)});
    }
    return out;
}

}  // namespace redsim

#pragma once

// Independent reference computations for tests. Nothing here calls into the
// library's closed forms or its adaptive quadrature.

#include <cmath>
#include <functional>

namespace redsim::testing {

/// Composite Simpson rule on [a, b] with an even number of panels.
inline double simpson(const std::function<double(double)>& f, double a, double b, int panels) {
    if (panels % 2) ++panels;
    const double h = (b - a) / panels;
    double sum = f(a) + f(b);
    for (int i = 1; i < panels; ++i) sum += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
    return sum * h / 3.0;
}

/// E[min^order] of d i.i.d. copies, from a survival function, by Simpson on
/// [0, cutoff] after the substitution x = u^2 (smooths the k < 1 Weibull
/// cusp at the origin).
inline double min_moment_simpson(const std::function<double(double)>& survival, int d, int order,
                                 double cutoff, int panels = 200000) {
    auto g = [&](double u) {
        const double x = u * u;
        const double s = std::pow(survival(x), d);
        const double jac = 2.0 * u;
        return (order == 1 ? s : 2.0 * x * s) * jac;
    };
    return simpson(g, 0.0, std::sqrt(cutoff), panels);
}

}  // namespace redsim::testing

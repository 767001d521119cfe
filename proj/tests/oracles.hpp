#pragma once

// Test-only oracles, independent of the library's quadrature and operators:
// a high-resolution composite Simpson rule for radial integrals and helpers
// for refined-grid derivative comparisons.

#include <cmath>
#include <functional>
#include <numbers>

namespace oracle {

// Composite Simpson with `panels` panels (rounded up to even).
inline double simpson(const std::function<double(double)>& f, double a, double b,
                      long panels = 200000) {
    if (panels % 2)
        ++panels;
    const double h = (b - a) / static_cast<double>(panels);
    double acc = f(a) + f(b);
    for (long i = 1; i < panels; ++i)
        acc += f(a + h * i) * (i % 2 ? 4.0 : 2.0);
    return acc * h / 3.0;
}

// |dB_1(N)| int_a^b f(r) r^{N-1} dr with a million-panel Simpson rule.
inline double radial_integral(const std::function<double(double)>& f, double a,
                              double b, int dim, long panels = 1000000) {
    const double sphere =
        2.0 * std::pow(std::numbers::pi, 0.5 * dim) / std::tgamma(0.5 * dim);
    return sphere * simpson([&](double r) { return f(r) * std::pow(r, dim - 1); },
                            a, b, panels);
}

} // namespace oracle

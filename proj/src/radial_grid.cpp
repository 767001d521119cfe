#include "chemolab/radial_grid.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "chemolab/errors.hpp"

namespace chemo {

double unit_sphere_area(int dim) {
    if (dim < 1)
        throw ConfigError("unit_sphere_area: dimension must be >= 1, got " +
                          std::to_string(dim));
    return 2.0 * std::pow(std::numbers::pi, 0.5 * dim) / std::tgamma(0.5 * dim);
}

namespace {

// int_a^b r^m dr
double power_integral(double a, double b, int m) {
    return (std::pow(b, m + 1) - std::pow(a, m + 1)) / (m + 1);
}

} // namespace

RadialGrid::RadialGrid(std::vector<double> nodes, int dim, GridLayout layout,
                       double ratio)
    : nodes_(std::move(nodes)), dim_(dim), layout_(layout), ratio_(ratio) {
    const std::size_t n = nodes_.size();
    r_max_ = nodes_.back();
    sphere_area_ = unit_sphere_area(dim_);

    // Finite-volume cells split at the radius midpoints r_{i+1/2}, with the
    // exact cell masses V_i = int_{cell_i} r^{N-1} dr. The same volumes feed
    // the conservative flux operators, so quadrature of any flux divergence
    // telescopes to the boundary flux exactly and the radial Laplacian stays
    // consistent at the origin.
    cell_volumes_.assign(n, 0.0);
    double prev_face = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double next_face = i + 1 < n ? 0.5 * (nodes_[i] + nodes_[i + 1])
                                           : nodes_[i];
        cell_volumes_[i] = power_integral(prev_face, next_face, dim_ - 1);
        prev_face = next_face;
    }
    quad_weights_.resize(n);
    for (std::size_t i = 0; i < n; ++i)
        quad_weights_[i] = sphere_area_ * cell_volumes_[i];

    face_areas_.resize(n - 1);
    min_spacing_ = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i + 1 < n; ++i) {
        face_areas_[i] = std::pow(face(i), dim_ - 1);
        min_spacing_ = std::min(min_spacing_, nodes_[i + 1] - nodes_[i]);
    }
}

namespace {

void check_build_args(double r_max, int cells, int dim) {
    if (!(r_max > 0.0))
        throw ConfigError("build_grid: r_max must be positive, got " +
                          std::to_string(r_max));
    if (cells < 16)
        throw ConfigError("build_grid: need at least 16 cells, got " +
                          std::to_string(cells));
    if (dim < 3)
        throw ConfigError("build_grid: dimension must be >= 3, got " +
                          std::to_string(dim));
}

} // namespace

RadialGrid RadialGrid::uniform(double r_max, int cells, int dim) {
    check_build_args(r_max, cells, dim);
    std::vector<double> nodes(cells + 1);
    for (int i = 0; i <= cells; ++i)
        nodes[i] = r_max * static_cast<double>(i) / cells;
    nodes.back() = r_max;
    return RadialGrid(std::move(nodes), dim, GridLayout::Uniform, 1.0);
}

RadialGrid RadialGrid::geometric(double r_max, int cells, int dim, double ratio) {
    check_build_args(r_max, cells, dim);
    if (!(ratio > 0.0 && ratio < 1.0))
        throw ConfigError("build_grid: geometric ratio must lie in (0,1), got " +
                          std::to_string(ratio));
    // Spacings grow away from the origin by 1/ratio, so resolution clusters
    // at r = 0 where blow-up concentrates:
    //   r_i = r_max (ratio^{M-i} - ratio^M) / (1 - ratio^M).
    const int m = cells;
    const double denom = 1.0 - std::pow(ratio, m);
    std::vector<double> nodes(m + 1);
    nodes[0] = 0.0;
    for (int i = 1; i < m; ++i)
        nodes[i] = r_max * (std::pow(ratio, m - i) - std::pow(ratio, m)) / denom;
    nodes[m] = r_max;
    return RadialGrid(std::move(nodes), dim, GridLayout::Geometric, ratio);
}

RadialGrid RadialGrid::geometric_first_cell(double r_max, int cells, int dim,
                                            double first_cell) {
    check_build_args(r_max, cells, dim);
    if (!(first_cell > 0.0 && first_cell < r_max / cells))
        throw ConfigError("geometric_first_cell: first cell must lie in (0, r_max/M)");
    // First spacing as a function of the ratio q:
    //   h_1(q) = r_max q^{M-1} (1 - q) / (1 - q^M),
    // monotone decreasing in (0,1); bisect for the requested width.
    const int m = cells;
    auto h1 = [&](double q) {
        return r_max * std::pow(q, m - 1) * (1.0 - q) / (1.0 - std::pow(q, m));
    };
    double lo = 1e-8, hi = 1.0 - 1e-12;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (h1(mid) > first_cell)
            hi = mid;
        else
            lo = mid;
    }
    return geometric(r_max, cells, dim, 0.5 * (lo + hi));
}

RadialGrid build_grid(double r_max, int cells, GridLayout layout, int dim,
                      double ratio) {
    return layout == GridLayout::Uniform
               ? RadialGrid::uniform(r_max, cells, dim)
               : RadialGrid::geometric(r_max, cells, dim, ratio);
}

double integrate_radial(std::span<const double> f, const RadialGrid& grid) {
    const auto w = grid.quad_weights();
    double acc = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) {
        if (!std::isfinite(f[i]))
            throw EvaluationError("integrate_radial: non-finite value at node " +
                                  std::to_string(i) + " (r = " +
                                  std::to_string(grid.node(i)) + ")");
        acc += w[i] * f[i];
    }
    return acc;
}

double lp_norm(std::span<const double> f, double p, const RadialGrid& grid) {
    if (p == p_inf)
        return sup_norm(f);
    if (!(p >= 1.0))
        throw ConfigError("lp_norm: p must be >= 1 or infinity, got " +
                          std::to_string(p));
    const auto w = grid.quad_weights();
    double acc = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) {
        if (!std::isfinite(f[i]))
            throw EvaluationError("lp_norm: non-finite value at node " +
                                  std::to_string(i));
        acc += w[i] * (p == 1.0 ? std::abs(f[i]) : std::pow(std::abs(f[i]), p));
    }
    return p == 1.0 ? acc : std::pow(acc, 1.0 / p);
}

double sup_norm(std::span<const double> f) {
    double m = 0.0;
    for (double x : f)
        m = std::max(m, std::abs(x));
    return m;
}

double min_value(std::span<const double> f) {
    double m = std::numeric_limits<double>::infinity();
    for (double x : f)
        m = std::min(m, x);
    return m;
}

} // namespace chemo

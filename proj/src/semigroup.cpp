#include "chemolab/semigroup.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include <boost/math/quadrature/exp_sinh.hpp>

#include "chemolab/errors.hpp"
#include "chemolab/operators.hpp"

namespace chemo {

Field heat_semigroup(const Field& f, double t, const RadialGrid& grid,
                     double damping, long substeps) {
    if (t < 0.0)
        throw ConfigError("heat_semigroup: t must be nonnegative");
    if (damping < 0.0)
        throw ConfigError("heat_semigroup: damping must be nonnegative");
    if (t == 0.0)
        return f;
    if (substeps <= 0)
        substeps = std::max<long>(16, static_cast<long>(std::ceil(t / 2.5e-5)));
    const double dt = t / static_cast<double>(substeps);
    const ImplicitDiffusion diffusion(grid);
    Field current = f;
    Field next;
    for (long k = 0; k < substeps; ++k) {
        diffusion.solve(current, dt, 0.0, next);
        current.swap(next);
    }
    if (damping > 0.0) {
        const double factor = std::exp(-damping * t);
        for (double& x : current)
            x *= factor;
    }
    return current;
}

namespace {

// One evaluation of the three Duhamel maps at time T from the iterate's
// values on the midpoint sub-grid.
struct Trajectory {
    std::vector<Field> u, v, w; // values at panel midpoints
};

// Composite midpoint rule over [0, tau]. When tau is itself one of the
// sub-grid midpoints, the trailing half panel [m*w, tau] is closed with the
// integrand at tau and no propagation (the propagator is within O(w) of the
// identity there), keeping the rule second order.
Field duhamel_u(const Field& u0, const Trajectory& traj, double tau, double chi,
                const RadialGrid& grid, const std::vector<double>& mids,
                double panel_width) {
    Field result = heat_semigroup(u0, tau, grid, 0.0);
    for (std::size_t m = 0; m < mids.size() && mids[m] <= tau; ++m) {
        const Field integrand =
            chemotaxis_divergence(traj.u[m], traj.w[m], grid);
        const double gap = tau - mids[m];
        const double weight = gap < 0.5 * panel_width ? 0.5 * panel_width
                                                      : panel_width;
        const Field propagated = heat_semigroup(integrand, gap, grid, 0.0);
        for (std::size_t i = 0; i < result.size(); ++i)
            result[i] -= chi * weight * propagated[i];
    }
    return result;
}

Field duhamel_w(const Field& w0, const Trajectory& traj, double tau,
                const ModelParams& params, const RadialGrid& grid,
                const std::vector<double>& mids, double panel_width) {
    Field result = heat_semigroup(w0, tau, grid, params.lambda);
    Field source(grid.size());
    for (std::size_t m = 0; m < mids.size() && mids[m] <= tau; ++m) {
        for (std::size_t i = 0; i < source.size(); ++i)
            source[i] = params.alpha * traj.u[m][i] + params.beta * traj.v[m][i];
        const double gap = tau - mids[m];
        const double weight = gap < 0.5 * panel_width ? 0.5 * panel_width
                                                      : panel_width;
        const Field propagated =
            heat_semigroup(source, gap, grid, params.lambda);
        for (std::size_t i = 0; i < result.size(); ++i)
            result[i] += weight * propagated[i];
    }
    return result;
}

double sup_diff(const Field& a, const Field& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

} // namespace

PicardResult picard_iterate(const Field& u0, const Field& v0, const Field& w0,
                            double T, int n_iters, const ModelParams& params,
                            const RadialGrid& grid, long panels, double t_cap) {
    if (!(T > 0.0))
        throw ConfigError("picard_iterate: T must be positive");
    if (T > t_cap)
        throw ConfigError("picard_iterate: T exceeds the contraction cap " +
                          std::to_string(t_cap));
    if (n_iters < 0)
        throw ConfigError("picard_iterate: n_iters must be nonnegative");
    if (panels < 1)
        throw ConfigError("picard_iterate: need at least one panel");

    const double panel_width = T / static_cast<double>(panels);
    std::vector<double> mids(panels);
    for (long m = 0; m < panels; ++m)
        mids[m] = (static_cast<double>(m) + 0.5) * panel_width;
    // Iterate 0: pure semigroup evolution, on the sub-grid and at T.
    Trajectory traj;
    traj.u.resize(panels);
    traj.v.resize(panels);
    traj.w.resize(panels);
    for (long m = 0; m < panels; ++m) {
        traj.u[m] = heat_semigroup(u0, mids[m], grid);
        traj.v[m] = heat_semigroup(v0, mids[m], grid);
        traj.w[m] = heat_semigroup(w0, mids[m], grid, params.lambda);
    }
    PicardResult result;
    result.panels = panels;
    result.u = heat_semigroup(u0, T, grid);
    result.v = heat_semigroup(v0, T, grid);
    result.w = heat_semigroup(w0, T, grid, params.lambda);

    int growth_streak = 0;
    for (int iter = 0; iter < n_iters; ++iter) {
        // Refresh the sub-grid trajectory from the previous iterate, then
        // evaluate the maps at T.
        Trajectory next;
        next.u.resize(panels);
        next.v.resize(panels);
        next.w.resize(panels);
        for (long m = 0; m < panels; ++m) {
            next.u[m] = duhamel_u(u0, traj, mids[m], params.chi, grid, mids,
                                  panel_width);
            next.v[m] = duhamel_u(v0, traj, mids[m], params.xi, grid, mids,
                                  panel_width);
            next.w[m] = duhamel_w(w0, traj, mids[m], params, grid, mids,
                                  panel_width);
        }
        Field u_new = duhamel_u(u0, traj, T, params.chi, grid, mids, panel_width);
        Field v_new = duhamel_u(v0, traj, T, params.xi, grid, mids, panel_width);
        Field w_new = duhamel_w(w0, traj, T, params, grid, mids, panel_width);

        const double residual = std::max({sup_diff(u_new, result.u),
                                          sup_diff(v_new, result.v),
                                          sup_diff(w_new, result.w)});
        if (!result.residuals.empty() && residual > result.residuals.back())
            ++growth_streak;
        else
            growth_streak = 0;
        result.residuals.push_back(residual);
        if (growth_streak >= 3)
            throw EvaluationError(
                "picard_iterate: residuals grew over three consecutive "
                "iterations; T too large for contraction");

        traj = std::move(next);
        result.u = std::move(u_new);
        result.v = std::move(v_new);
        result.w = std::move(w_new);
    }
    return result;
}

PicardResult picard_iterate_refined(const Field& u0, const Field& v0,
                                    const Field& w0, double T, int n_iters,
                                    const ModelParams& params,
                                    const RadialGrid& grid, long panels,
                                    double sup_tol, int max_doublings) {
    PicardResult prev = picard_iterate(u0, v0, w0, T, n_iters, params, grid,
                                       panels);
    for (int k = 0; k < max_doublings; ++k) {
        panels *= 2;
        PicardResult next = picard_iterate(u0, v0, w0, T, n_iters, params, grid,
                                           panels);
        const double change = std::max({sup_diff(next.u, prev.u),
                                        sup_diff(next.v, prev.v),
                                        sup_diff(next.w, prev.w)});
        prev = std::move(next);
        if (change < sup_tol)
            break;
    }
    return prev;
}

GammaIntegral gamma_integral_both(double lam) {
    if (!(lam > 0.0))
        throw ConfigError("gamma_integral: lambda must be positive");
    GammaIntegral g;
    g.closed_form = std::sqrt(std::numbers::pi / lam);
    boost::math::quadrature::exp_sinh<double> integrator;
    g.quadrature = integrator.integrate(
        [lam](double s) { return std::exp(-lam * s) / std::sqrt(s); }, 1e-12);
    return g;
}

double gamma_integral(double lam) {
    const GammaIntegral g = gamma_integral_both(lam);
    if (std::abs(g.quadrature - g.closed_form) > 1e-8 * g.closed_form)
        throw EvaluationError("gamma_integral: quadrature disagrees with "
                              "closed form beyond 1e-8");
    return g.closed_form;
}

L1BoundsReport check_l1_bounds(const TimeSeries& series,
                               const InitialDataSummary& summary,
                               const ModelParams& params) {
    L1BoundsReport rep;
    rep.source_mass = params.alpha * summary.mass_u + params.beta * summary.mass_v;
    rep.structural_slope =
        params.lambda > 0.0 ? std::sqrt(std::numbers::pi / params.lambda) : 0.0;
    if (series.records.empty())
        return rep;
    const double w0 = series.records.front().l1_w;
    const double gw0 = series.records.front().l1_grad_w;
    for (const auto& rec : series.records) {
        rep.max_l1_w = std::max(rep.max_l1_w, rec.l1_w);
        rep.max_l1_grad_w = std::max(rep.max_l1_grad_w, rec.l1_grad_w);
        if (!std::isfinite(rec.l1_w) || !std::isfinite(rec.l1_grad_w))
            rep.bounded = false;
        if (rep.source_mass > 0.0) {
            rep.fitted_slope_w =
                std::max(rep.fitted_slope_w, (rec.l1_w - w0) / rep.source_mass);
            rep.fitted_slope_grad_w =
                std::max(rep.fitted_slope_grad_w,
                         (rec.l1_grad_w - gw0) / rep.source_mass);
        }
    }
    return rep;
}

} // namespace chemo

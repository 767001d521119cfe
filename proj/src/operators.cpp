#include "chemolab/operators.hpp"

#include <cmath>
#include <string>

#include "chemolab/errors.hpp"

namespace chemo {

Field radial_gradient(std::span<const double> f, const RadialGrid& grid) {
    const std::size_t n = grid.size();
    Field df(n);
    df[0] = 0.0;
    for (std::size_t i = 1; i + 1 < n; ++i) {
        const double hl = grid.node(i) - grid.node(i - 1);
        const double hr = grid.node(i + 1) - grid.node(i);
        df[i] = (-hr / (hl * (hl + hr))) * f[i - 1] +
                ((hr - hl) / (hl * hr)) * f[i] +
                (hl / (hr * (hl + hr))) * f[i + 1];
    }
    if (n >= 3) {
        const std::size_t m = n - 1;
        const double ha = grid.node(m - 1) - grid.node(m - 2);
        const double hb = grid.node(m) - grid.node(m - 1);
        df[m] = (hb / (ha * (ha + hb))) * f[m - 2] -
                ((ha + hb) / (ha * hb)) * f[m - 1] +
                ((ha + 2.0 * hb) / (hb * (ha + hb))) * f[m];
    }
    return df;
}

namespace {

// Three-point second derivative at the middle abscissa (non-uniform).
double second_diff(double fl, double fc, double fr, double hl, double hr) {
    return 2.0 * (fl * hr - fc * (hl + hr) + fr * hl) / (hl * hr * (hl + hr));
}

} // namespace

Field radial_laplacian(std::span<const double> f, const RadialGrid& grid) {
    const std::size_t n = grid.size();
    const int dim = grid.dim();
    Field lap(n);
    const Field df = radial_gradient(f, grid);

    // r = 0: lim Delta f = N f_rr(0), symmetric stencil with f(-r_1) = f(r_1).
    const double h1 = grid.node(1);
    lap[0] = dim * 2.0 * (f[1] - f[0]) / (h1 * h1);

    for (std::size_t i = 1; i + 1 < n; ++i) {
        const double hl = grid.node(i) - grid.node(i - 1);
        const double hr = grid.node(i + 1) - grid.node(i);
        const double frr = second_diff(f[i - 1], f[i], f[i + 1], hl, hr);
        lap[i] = frr + (dim - 1) / grid.node(i) * df[i];
    }

    if (n >= 3) {
        // One-sided second difference at r_max keeps quadratics exact.
        const std::size_t m = n - 1;
        const double ha = grid.node(m - 1) - grid.node(m - 2);
        const double hb = grid.node(m) - grid.node(m - 1);
        const double frr = second_diff(f[m - 2], f[m - 1], f[m], ha, hb);
        lap[m] = frr + (dim - 1) / grid.node(m) * df[m];
    }
    return lap;
}

Field chemotaxis_divergence(std::span<const double> u, std::span<const double> w,
                            const RadialGrid& grid, bool upwind) {
    const std::size_t n = grid.size();
    const auto vol = grid.cell_volumes();
    Field div(n, 0.0);
    // Accumulate face contributions; boundary faces carry zero flux (the
    // r = 0 face has zero area, the r_max face is zero-flux by construction).
    double prev_area_flux = 0.0;
    for (std::size_t i = 0; i + 1 < n; ++i) {
        const double h = grid.spacing(i);
        const double grad_w = (w[i + 1] - w[i]) / h;
        double u_face;
        if (upwind)
            u_face = grad_w >= 0.0 ? u[i] : u[i + 1];
        else
            u_face = 0.5 * (u[i] + u[i + 1]);
        const double area_flux = grid.face_area(i) * u_face * grad_w;
        div[i] += (area_flux - prev_area_flux) / vol[i];
        prev_area_flux = area_flux;
    }
    div[n - 1] = (0.0 - prev_area_flux) / vol[n - 1];
    return div;
}

Field flux_laplacian(std::span<const double> f, const RadialGrid& grid) {
    const Field ones(grid.size(), 1.0);
    return chemotaxis_divergence(ones, f, grid);
}

double cutoff_eta(double s) {
    if (s <= 0.0) return 1.0;
    if (s >= 1.0) return 0.0;
    return 1.0 - s * s * s * (10.0 - 15.0 * s + 6.0 * s * s);
}

CutoffProfile build_cutoff(double R, const RadialGrid& grid) {
    if (!(R > 0.0))
        throw ConfigError("build_cutoff: R must be positive");
    if (R + 1.0 > grid.r_max())
        throw ConfigError("build_cutoff: transition extends past r_max (R + 1 = " +
                          std::to_string(R + 1.0) + " > " +
                          std::to_string(grid.r_max()) + ")");
    CutoffProfile profile;
    profile.R = R;
    profile.values.resize(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i)
        profile.values[i] = cutoff_eta(grid.node(i) - R);
    return profile;
}

ImplicitDiffusion::ImplicitDiffusion(const RadialGrid& grid) : grid_(grid) {
    const std::size_t faces = grid.size() - 1;
    conductance_.resize(faces);
    for (std::size_t i = 0; i < faces; ++i)
        conductance_[i] = grid.face_area(i) / grid.spacing(i);
    diag_.resize(grid.size());
    upper_.resize(grid.size());
    work_.resize(grid.size());
}

void ImplicitDiffusion::solve(std::span<const double> rhs, double dt, double decay,
                              Field& out) const {
    const std::size_t n = grid_.size();
    const auto vol = grid_.cell_volumes();
    out.resize(n);

    // Row i of (I + dt*decay - dt*L):
    //   lower_i = -dt c_{i-1}/V_i,  upper_i = -dt c_i/V_i,
    //   diag_i  = 1 + dt*decay - lower_i - upper_i.
    auto lower = [&](std::size_t i) { return -dt * conductance_[i - 1] / vol[i]; };
    auto upper = [&](std::size_t i) { return -dt * conductance_[i] / vol[i]; };
    for (std::size_t i = 0; i < n; ++i) {
        double d = 1.0 + dt * decay;
        if (i > 0) d -= lower(i);
        if (i + 1 < n) d -= upper(i);
        diag_[i] = d;
    }

    // Thomas sweep: upper_ holds the scaled superdiagonal, work_ the rhs.
    double pivot = diag_[0];
    if (std::abs(pivot) < 1e-300)
        throw EvaluationError("ImplicitDiffusion: singular tridiagonal system");
    upper_[0] = upper(0) / pivot;
    work_[0] = rhs[0] / pivot;
    for (std::size_t i = 1; i < n; ++i) {
        const double l = lower(i);
        pivot = diag_[i] - l * upper_[i - 1];
        if (std::abs(pivot) < 1e-300)
            throw EvaluationError("ImplicitDiffusion: singular tridiagonal system");
        if (i + 1 < n) upper_[i] = upper(i) / pivot;
        work_[i] = (rhs[i] - l * work_[i - 1]) / pivot;
    }
    out[n - 1] = work_[n - 1];
    for (std::size_t i = n - 1; i-- > 0;)
        out[i] = work_[i] - upper_[i] * out[i + 1];
}

Field ImplicitDiffusion::solve(std::span<const double> rhs, double dt,
                               double decay) const {
    Field out;
    solve(rhs, dt, decay, out);
    return out;
}

} // namespace chemo

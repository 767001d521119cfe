#pragma once

#include <span>

#include "chemolab/radial_grid.hpp"

namespace chemo {

/// Discrete radial derivative f_r. Second-order centered differences in the
/// interior (non-uniform aware), one-sided three-point at r_max, and
/// f_r(0) = 0 by radial symmetry.
Field radial_gradient(std::span<const double> f, const RadialGrid& grid);

/// Pointwise radial Laplacian f_rr + (N-1)/r f_r. At r = 0 the removable
/// singularity is regularized to N * f_rr(0) using the ghost value
/// f(-r_1) = f(r_1); the outer node uses one-sided stencils so the operator
/// stays exact on quadratics (identity value 2N on f = r^2) at every node.
Field radial_laplacian(std::span<const double> f, const RadialGrid& grid);

/// Conservative divergence of the chemotactic flux u w_r in radial form,
///   div_i = (r^{N-1} F)_{i+1/2} - (r^{N-1} F)_{i-1/2}) / V_i,
/// with face flux F_{i+1/2} = u_{i+1/2} (w_{i+1}-w_i)/h and arithmetic-mean
/// (default) or upwind face values of u. Fluxes vanish at r = 0 and at r_max,
/// so integrate_radial of the result is zero to machine precision.
Field chemotaxis_divergence(std::span<const double> u, std::span<const double> w,
                            const RadialGrid& grid, bool upwind = false);

/// Flux-form Laplacian: chemotaxis_divergence with u == 1. This is the
/// operator the implicit diffusion solve inverts (zero-flux boundaries).
Field flux_laplacian(std::span<const double> f, const RadialGrid& grid);

/// Radial cut-off zeta_R: 1 on [0,R], 0 on [R+1, inf), nonincreasing, with a
/// C^2 quintic smoothstep transition on [R, R+1].
struct CutoffProfile {
    double R = 0.0;
    Field values;
};

CutoffProfile build_cutoff(double R, const RadialGrid& grid);

/// The smoothstep transition profile eta(s): 1 for s <= 0, 0 for s >= 1,
/// 1 - s^3(10 - 15s + 6s^2) in between.
double cutoff_eta(double s);

/// Tridiagonal backward-Euler solve for diffusion with optional linear decay:
/// solves (I + dt*decay - dt*L) x = rhs where L is flux_laplacian. The system
/// is strictly diagonally dominant; a vanishing pivot throws EvaluationError.
class ImplicitDiffusion {
public:
    explicit ImplicitDiffusion(const RadialGrid& grid);

    void solve(std::span<const double> rhs, double dt, double decay,
               Field& out) const;
    Field solve(std::span<const double> rhs, double dt, double decay = 0.0) const;

private:
    const RadialGrid& grid_;
    // Per-face conductances A_{i+1/2} / h_{i+1/2}, reused every solve.
    std::vector<double> conductance_;
    mutable std::vector<double> diag_, upper_, work_;
};

} // namespace chemo

#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "chemolab/radial_grid.hpp"

namespace chemo {

/// System constants of the two-species parabolic chemotaxis model
///   u_t = Du - chi div(u grad w)
///   v_t = Dv - xi  div(v grad w)
///   w_t = Dw - lambda w + alpha u + beta v
/// on R^N, N >= 3. The PDE constants are positive in the model; zero values
/// are accepted here so degenerate diagnostic regimes (pure diffusion) can be
/// exercised, and flagged through is_degenerate().
struct ModelParams {
    double chi = 1.0;
    double xi = 1.0;
    double lambda = 1.0;
    double alpha = 1.0;
    double beta = 1.0;
    int dim = 3;

    void validate() const;
    bool is_degenerate() const {
        return chi == 0.0 || xi == 0.0 || lambda == 0.0 || alpha == 0.0 ||
               beta == 0.0;
    }
};

/// The triple (u, v, w) on a shared grid at time t. A FieldState is a value:
/// copied between threads, never shared mutably.
struct FieldState {
    double t = 0.0;
    Field u, v, w;
    GridPtr grid;

    static FieldState zero(GridPtr grid);
    std::size_t size() const { return u.size(); }
};

/// Relative positivity floor: discrete advection can undershoot zero by
/// rounding, so violations are measured against 1e-10 * (1 + sup|u|).
double positivity_tolerance(std::span<const double> f);

struct StateDiagnostics {
    double min_u = 0.0, min_v = 0.0;
    double sup_u = 0.0, sup_v = 0.0, sup_w = 0.0;
    double mass_u = 0.0, mass_v = 0.0;
    double tol_pos_u = 0.0, tol_pos_v = 0.0;
    long positivity_violations = 0;
    long first_violation_node = -1;
    bool finite = true;
    /// Domain-truncation check: field values at r_max must stay below
    /// 1e-8 x sup-norm, otherwise the tail carries visible mass.
    bool tail_ok = true;
    std::vector<std::string> messages;

    bool clean() const {
        return finite && positivity_violations == 0;
    }
};

/// Pure report: flags invariant violations without mutating the state.
StateDiagnostics validate_state(const FieldState& state, const ModelParams& params);

/// The initial-data size entering the blow-up threshold. The threshold
/// constant is sometimes stated against the bare sum K and sometimes against
/// K + 1 (which stays above 1); both variants are carried and reported.
struct InitialDataSummary {
    double mass_u = 0.0;
    double mass_v = 0.0;
    double mass_w = 0.0;
    double grad_w_mass = 0.0;
    double K = 0.0;
    double K_plus_one = 1.0;
};

/// Computes K = |u0|_1 + |v0|_1 + |w0|_1 + |grad w0|_1 from a t = 0 state.
/// The gradient mass uses the discrete radial derivative of w.
InitialDataSummary summarize_initial(const FieldState& state);

InitialDataSummary make_summary(double mass_u, double mass_v, double mass_w,
                                double grad_w_mass);

/// Gaussian field amp * exp(-r^2) sampled on the grid.
Field gaussian_field(const RadialGrid& grid, double amplitude, double width = 1.0);

} // namespace chemo

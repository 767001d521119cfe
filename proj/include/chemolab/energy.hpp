#pragma once

#include <map>
#include <string>

#include "chemolab/model.hpp"

namespace chemo {

/// The energy functional
///   F = 1/2 int |grad w|^2 + lambda/2 int w^2 - int (alpha u + beta v) w
///     + alpha/chi int (u+1)log(u+1) + beta/xi int (v+1)log(v+1)
/// together with the dissipation ingredients
///   f  = -Dw + lambda w - alpha u - beta v   (= -w_t along solutions),
///   g1 = grad u / sqrt(chi(u+1)) - sqrt(chi(u+1)) grad w,
///   g2 analogous with (xi, v),
///   D  = 1/2 |f|_2^2 + alpha/2 |g1|_2^2 + beta/2 |g2|_2^2.
/// F is stored as the exact sum of its five components. The Laplacian inside
/// f is the conservative flux form (the semi-discrete system's own operator),
/// so w_t = -f holds exactly along integrator trajectories up to the source
/// lag; entropy coefficients degenerate to 0 when chi or xi vanish.
struct EnergyReport {
    double t = 0.0;
    double dirichlet = 0.0;
    double l2w = 0.0;
    double coupling = 0.0;
    double entropy_u = 0.0;
    double entropy_v = 0.0;
    double F = 0.0;
    double norm_f = 0.0;
    double norm_g1 = 0.0;
    double norm_g2 = 0.0;
    double D = 0.0;
};

EnergyReport energy(const FieldState& state, const ModelParams& params);

/// Discrete check of the constant-free differential inequality
///   F' <= -(alpha/2)|g1|^2 - (beta/2)|g2|^2
///         + (alpha chi + beta xi)/2 int |grad w|^2 - 1/2 |w_t|^2.
/// LHS is (F_after - F_before)/dt, RHS the mean of the two reports, and the
/// model tolerance tol = c_tol * dt absorbs the first-order splitting error.
struct InequalityCheck {
    bool holds = false;
    double margin = 0.0; // RHS + tol - LHS, nonnegative when the bound holds
    double lhs = 0.0;
    double rhs = 0.0;
    double tol = 0.0;
};

InequalityCheck check_energy_inequality(const EnergyReport& before,
                                        const EnergyReport& after, double dt,
                                        const ModelParams& params,
                                        double c_tol = 50.0);

/// Accumulated (integral) form of the energy inequality over a trajectory of
/// reports: F(t) + int_0^t D <= (alpha chi + beta xi) [int coupling + int F]
/// + F(0), time integrals by the trapezoidal rule.
InequalityCheck check_energy_inequality_integral(
    const std::vector<EnergyReport>& reports, const ModelParams& params,
    double c_tol = 50.0);

/// Probe quantities for the pointwise bounds and coupling estimates.
struct ProbeReport {
    double t = 0.0;
    double K = 0.0;
    double r0 = 1.5;           // mean-value anchor in [1,2]
    double w_at_r0 = 0.0;
    double pointwise_margin = 0.0;
    double interp_tolerance = 0.0;
    bool mean_value_root_found = true;
    double interval_mass = 0.0; // int_1^2 r^{N-1} w dr, checked <= K/|dB_1|
    double coupling_lhs = 0.0;
    double ball_grad = 0.0;     // int_{B_2} |grad w|^2
    double annulus_grad = 0.0;  // int_{B_2 \ B_{r0_est}} |grad w|^2
    double ball_r0_grad = 0.0;  // int_{B_{r0_est}} |grad w|^2
    double r0_estimate = 1.0;   // min(1, |f|_2^{-alpha_exp})
    std::map<std::string, double> fitted_ratios;
};

/// Mean-value anchor and constant-free pointwise chain of the sup bound:
/// finds r0 in [1,2] with r0^{N-1} w(r0) = int_1^2 r^{N-1} w dr (bisection on
/// the linear interpolant) and evaluates
///   margin = max_{r>0} [ w(r) - w(r0) - r^{1-N} int r^{N-1} |w_r| ],
/// which the calculus chain keeps <= 0 up to interpolation error. The
/// documented tolerance scales with h^2 (|w|_inf + |w_r|_inf).
ProbeReport pointwise_bound_probe(const FieldState& state,
                                  const InitialDataSummary& summary);

/// Constituent quantities and fitted ratios of the coupling estimates:
/// the Gagliardo-Nirenberg coupling bound, the annulus and ball gradient
/// estimates, the r-Gronwall accumulation, and the combined Ehrling-type
/// bound with exponent 2*theta on |f|_2. The implicit constants are what the
/// ratios fit; asserting them finite is the caller's job.
ProbeReport coupling_estimate_probe(const FieldState& state,
                                    const ModelParams& params,
                                    const InitialDataSummary& summary,
                                    double theta = 0.75,
                                    double alpha_exp = -1.0);

/// Both probes merged into one report.
ProbeReport lemma_probes(const FieldState& state, const ModelParams& params,
                         const InitialDataSummary& summary, double theta = 0.75,
                         double alpha_exp = -1.0);

} // namespace chemo

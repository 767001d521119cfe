#pragma once

#include <cmath>
#include <vector>

#include "chemolab/model.hpp"

namespace chemo {

/// phi(eps) = int_0^1 rho^{N-1} (rho^2 + eps)^{-N/2} d rho, the monotone
/// gauge of the blow-up family: phi -> infinity logarithmically as eps -> 0.
/// Evaluated through the substitution s = t/(t+eps) which splits off the
/// -1/2 log(eps) divergence exactly, leaving a smooth adaptive quadrature
/// (relative tolerance 1e-9); valid for every eps > 0 down to the smallest
/// representable double. Throws ConfigError for eps <= 0.
double phi(double eps, int dim);

/// phi as a function of log(eps); the exact continuation used when eps itself
/// underflows (log_eps arbitrarily negative).
double phi_log(double log_eps, int dim);

struct EtaSelection {
    double eta = 0.0;      // exp(log_eta); 0 when below the double range
    double log_eta = 0.0;  // authoritative value
    double phi_value = 0.0;
    bool representable = true;
};

/// Largest eta in (0,1) with r^N phi(eta/r^2) >= target, by bisection on the
/// monotone map; the achieved value lands in [target, target(1+1e-6)].
/// Throws EvaluationError (naming the achievable supremum) if no double eta
/// can reach the target; the log-space variant below has no such floor.
EtaSelection select_eta(double r, double target, int dim);

/// The same selection carried in log space: never fails for target >=
/// r^N phi(1/r^2 scale); eta may underflow to 0 while log_eta stays exact.
EtaSelection select_eta_log(double r, double target, int dim);

/// Positive radial base profiles amp * exp(-r^2); they lie in every space the
/// construction needs and have analytic norms for the oracles.
struct BaseProfiles {
    double amp_u = 1.0;
    double amp_v = 1.0;
    double amp_w = 1.0;

    double u(double r) const;
    double v(double r) const;
    double w(double r) const;
    double dw(double r) const;
};

enum class EtaRule { Admissible, FixedEps };

/// One member of the dense blow-up family: spike profiles
///   u0j = a_j (r^2 + eta_j)^{-(N-kappa)/2} on [0, r_j], u0 beyond,
/// v0j analogous with b_j and w0j with exponent kappa/2 and c_j, matched so
/// the fields are continuous at r_j. eta is carried in log space: the
/// admissibility selection drives eta below the double range already for
/// moderate j.
struct DenseFamilySpec {
    BaseProfiles base;
    int j = 1;
    int dim = 3;
    double r_j = 0.5;
    double log_eta = 0.0;
    double kappa = 0.25;
    double p = 1.0;
    double a_j = 0.0, b_j = 0.0, c_j = 0.0;
    double phi_value = 0.0;
    EtaRule eta_rule = EtaRule::Admissible;

    double eta() const;
    double eps() const;      // eta / r_j^2 (may underflow)
    double log_eps() const { return log_eta - 2.0 * std::log(r_j); }

    /// Spike profile values (ratio form, exactly continuous at r_j).
    double u0j(double r) const;
    double v0j(double r) const;
    double w0j(double r) const;
    double dw0j(double r) const;

    void validate() const;
};

/// Admissible kappa interval (N - N/p, (N-2)/2) midpoint.
double default_kappa(int dim, double p);

/// Admissibility selection: r_j and target feed select_eta_log; target must
/// be >= j so r_j^N phi(eta_j/r_j^2) >= j holds with margin.
DenseFamilySpec make_family_spec(const BaseProfiles& base, int j, int dim,
                                 double kappa, double p, double r_j,
                                 double target);

/// Grid-realizable variant: eta = eps_bar * r_j^2 with fixed spike sharpness.
DenseFamilySpec make_family_spec_fixed_eps(const BaseProfiles& base, int j,
                                           int dim, double kappa, double p,
                                           double r_j, double eps_bar);

/// Sample the member on a grid; fields are positive node-wise. Throws
/// EvaluationError when the spike cannot be represented at the grid nodes.
struct FamilyFields {
    Field u, v, w;
};
FamilyFields dense_family(const DenseFamilySpec& spec, const RadialGrid& grid);

FieldState family_state(const DenseFamilySpec& spec, GridPtr grid);

/// Analytic (adaptive-quadrature) evaluation of the member's norms and energy
/// on [0, r_max]; exact in the eta -> 0 limit where grids cannot follow.
struct FamilyNorms {
    double mass_u = 0.0, mass_v = 0.0, mass_w = 0.0, grad_w_mass = 0.0;
    double K = 0.0, K_plus_one = 1.0;
    double lp_distance_u = 0.0;   // |u0j - u0|_p
    double h1_distance_w = 0.0;   // |w0j - w0|_{H^1}
    double w11_distance_w = 0.0;  // |w0j - w0|_{W^{1,1}}
};
FamilyNorms family_norms(const DenseFamilySpec& spec, double r_max);

struct FamilyEnergy {
    double dirichlet = 0.0, l2w = 0.0, coupling = 0.0;
    double entropy_u = 0.0, entropy_v = 0.0;
    double F = 0.0;
    double bounded_terms = 0.0;      // the four non-coupling terms
    double coupling_lower_bound = 0.0; // j |dB_1| (alpha u0 + beta v0)(r_j) w0j(r_j)
};
FamilyEnergy family_energy(const DenseFamilySpec& spec, const ModelParams& params,
                           double r_max);

struct TrendRow {
    int j = 0;
    double K_j = 0.0;
    double K_j_plus_one = 1.0;
    double F_j = 0.0;
    double coupling_j = 0.0;
    double coupling_lower_bound = 0.0;
    double bounded_terms = 0.0;
};

/// Table of (j, K_j, F_j, coupling_j) over a spec sequence sharing bases and
/// (kappa, p). Throws EvaluationError if the coupling lower bound fails on
/// any row or the non-coupling terms are unbounded.
std::vector<TrendRow> family_energy_trend(const std::vector<DenseFamilySpec>& specs,
                                          const ModelParams& params, double r_max);

/// Theorem threshold -C_fit K^{2/(1-theta)} for theta in (1/2, 1).
double theorem_threshold(double K, double theta, double C_fit);

} // namespace chemo

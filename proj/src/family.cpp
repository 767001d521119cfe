#include "chemolab/family.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <string>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include "chemolab/errors.hpp"

namespace chemo {

namespace {

// Smooth remainder J(s1) = int_0^{s1} (s^{N/2-1} - 1) / (1 - s) ds of the
// Beta-substitution form of phi; bounded on [0,1] with limit N/2 - 1 at s=1.
double phi_smooth_part(double s1, int dim) {
    const double a = 0.5 * dim;
    auto integrand = [a](double s) {
        const double d = 1.0 - s;
        if (d < 1e-14)
            return a - 1.0;
        return (std::pow(s, a - 1.0) - 1.0) / d;
    };
    return boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
        integrand, 0.0, s1, 12, 1e-11);
}

} // namespace

double phi(double eps, int dim) {
    if (!(eps > 0.0))
        throw ConfigError("phi: eps must be positive (the integral diverges)");
    return phi_log(std::log(eps), dim);
}

double phi_log(double log_eps, int dim) {
    if (dim < 3)
        throw ConfigError("phi: dimension must be >= 3");
    // Substituting t = rho^2, s = t/(t+eps) gives
    //   phi = 1/2 [ -log eps + log(1+eps) + J(1/(1+eps)) ],
    // with J smooth; the log term carries the eps -> 0 divergence exactly.
    const double eps = std::exp(log_eps); // may underflow to 0; handled below
    const double s1 = 1.0 / (1.0 + eps);
    return 0.5 * (-log_eps + std::log1p(eps) + phi_smooth_part(s1, dim));
}

namespace {

// Invert phi(eps) = phi_target for log(eps); monotone decreasing.
double invert_phi(double phi_target, int dim) {
    // Deep in the tail phi = -log(eps)/2 + J(1)/2 exactly (corrections are
    // O(eps)), so start from the asymptotic inverse and bisect only when the
    // target sits in the moderate range.
    const double j1 = phi_smooth_part(1.0, dim);
    const double asymptotic = j1 - 2.0 * phi_target;
    if (asymptotic < -80.0)
        return asymptotic;
    double lo = -120.0, hi = 700.0; // log(eps) bracket
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (phi_log(mid, dim) > phi_target)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

} // namespace

EtaSelection select_eta_log(double r, double target, int dim) {
    if (!(r > 0.0 && r < 1.0))
        throw ConfigError("select_eta: r must lie in (0,1)");
    if (!(target > 0.0))
        throw ConfigError("select_eta: target must be positive");
    const double rn = std::pow(r, dim);
    const double phi_target = target / rn;
    // eta < 1 requires phi >= phi(1/r^2); if even eta -> 1 satisfies the
    // bound, the supremum of the admissible set is 1 (open interval).
    const double phi_at_one = phi_log(-2.0 * std::log(r), dim);
    EtaSelection sel;
    if (phi_at_one >= phi_target) {
        sel.log_eta = std::log(1.0 - 1e-12);
        sel.eta = 1.0 - 1e-12;
        sel.phi_value = phi_at_one;
        return sel;
    }
    double log_eps = invert_phi(phi_target, dim);
    // Land on the admissible side: nudge eps down until r^N phi >= target,
    // keeping the overshoot within the 1e-6 relative bracket.
    double value = phi_log(log_eps, dim);
    while (rn * value < target) {
        log_eps -= 1e-9 * std::max(1.0, std::abs(log_eps));
        value = phi_log(log_eps, dim);
    }
    sel.log_eta = log_eps + 2.0 * std::log(r);
    sel.eta = std::exp(sel.log_eta);
    sel.phi_value = value;
    sel.representable = sel.eta >= std::numeric_limits<double>::min();
    return sel;
}

EtaSelection select_eta(double r, double target, int dim) {
    EtaSelection sel = select_eta_log(r, target, dim);
    if (!sel.representable) {
        const double floor_log_eta = std::log(std::numeric_limits<double>::min());
        const double achievable =
            std::pow(r, dim) *
            phi_log(floor_log_eta - 2.0 * std::log(r), dim);
        throw EvaluationError(
            "select_eta: target " + std::to_string(target) +
            " unreachable within double precision; achievable supremum is " +
            std::to_string(achievable) + " at the smallest representable eta");
    }
    return sel;
}

double BaseProfiles::u(double r) const { return amp_u * std::exp(-r * r); }
double BaseProfiles::v(double r) const { return amp_v * std::exp(-r * r); }
double BaseProfiles::w(double r) const { return amp_w * std::exp(-r * r); }
double BaseProfiles::dw(double r) const {
    return -2.0 * r * amp_w * std::exp(-r * r);
}

double DenseFamilySpec::eta() const { return std::exp(log_eta); }
double DenseFamilySpec::eps() const { return std::exp(log_eps()); }

namespace {

// log(r^2 + eta) with eta carried in log space; exact when either term
// dominates beyond double epsilon.
double log_r2_plus_eta(double r, double log_eta) {
    if (r == 0.0)
        return log_eta;
    const double log_r2 = 2.0 * std::log(r);
    const double d = log_eta - log_r2;
    if (d < -40.0)
        return log_r2;
    if (d > 40.0)
        return log_eta;
    return log_r2 + std::log1p(std::exp(d));
}

// Spike profile in ratio form: base(r_j) * ((r_j^2+eta)/(r^2+eta))^{q}.
double spike(double base_at_rj, double q, double r, double r_j, double log_eta) {
    const double log_ratio =
        log_r2_plus_eta(r_j, log_eta) - log_r2_plus_eta(r, log_eta);
    return base_at_rj * std::exp(q * log_ratio);
}

} // namespace

double DenseFamilySpec::u0j(double r) const {
    if (r > r_j)
        return base.u(r);
    return spike(base.u(r_j), 0.5 * (dim - kappa), r, r_j, log_eta);
}

double DenseFamilySpec::v0j(double r) const {
    if (r > r_j)
        return base.v(r);
    return spike(base.v(r_j), 0.5 * (dim - kappa), r, r_j, log_eta);
}

double DenseFamilySpec::w0j(double r) const {
    if (r > r_j)
        return base.w(r);
    return spike(base.w(r_j), 0.5 * kappa, r, r_j, log_eta);
}

double DenseFamilySpec::dw0j(double r) const {
    if (r > r_j)
        return base.dw(r);
    // w0j' = -kappa c_j r (r^2+eta)^{-(kappa+2)/2}; in ratio form relative to
    // the matched value at r_j.
    const double log_num = 0.5 * kappa * log_r2_plus_eta(r_j, log_eta);
    const double log_den = 0.5 * (kappa + 2.0) * log_r2_plus_eta(r, log_eta);
    return -kappa * base.w(r_j) * r * std::exp(log_num - log_den);
}

void DenseFamilySpec::validate() const {
    if (dim < 3)
        throw ConfigError("DenseFamilySpec: dimension must be >= 3");
    const double p_max = 2.0 * dim / (dim + 2.0);
    if (!(p >= 1.0 && p < p_max))
        throw ConfigError("DenseFamilySpec: p must lie in [1, 2N/(N+2)) = [1, " +
                          std::to_string(p_max) + ")");
    const double k_lo = dim - dim / p;
    const double k_hi = 0.5 * (dim - 2.0);
    if (!(kappa > k_lo))
        throw ConfigError("DenseFamilySpec: kappa must exceed N - N/p = " +
                          std::to_string(k_lo));
    if (!(kappa < k_hi))
        throw ConfigError("DenseFamilySpec: kappa must be below (N-2)/2 = " +
                          std::to_string(k_hi));
    if (!(r_j > 0.0 && r_j < 1.0))
        throw ConfigError("DenseFamilySpec: r_j must lie in (0,1)");
    if (j < 1)
        throw ConfigError("DenseFamilySpec: j must be >= 1");
    if (eta_rule == EtaRule::Admissible) {
        const double admissibility = std::pow(r_j, dim) * phi_value;
        if (!(admissibility >= static_cast<double>(j) * (1.0 - 1e-9)))
            throw ConfigError("DenseFamilySpec: r_j^N phi(eta/r_j^2) = " +
                              std::to_string(admissibility) +
                              " fails the >= j admissibility");
    }
    if (!(base.amp_u > 0.0 && base.amp_v > 0.0 && base.amp_w > 0.0))
        throw ConfigError("DenseFamilySpec: base profiles must be positive");
}

double default_kappa(int dim, double p) {
    const double k_lo = dim - dim / p;
    const double k_hi = 0.5 * (dim - 2.0);
    if (!(k_lo < k_hi))
        throw ConfigError("default_kappa: empty admissible interval for this (N, p)");
    return 0.5 * (k_lo + k_hi);
}

namespace {

void fill_coefficients(DenseFamilySpec& spec) {
    const double log_m = log_r2_plus_eta(spec.r_j, spec.log_eta);
    const double qu = 0.5 * (spec.dim - spec.kappa);
    spec.a_j = spec.base.u(spec.r_j) * std::exp(qu * log_m);
    spec.b_j = spec.base.v(spec.r_j) * std::exp(qu * log_m);
    spec.c_j = spec.base.w(spec.r_j) * std::exp(0.5 * spec.kappa * log_m);
}

} // namespace

DenseFamilySpec make_family_spec(const BaseProfiles& base, int j, int dim,
                                 double kappa, double p, double r_j,
                                 double target) {
    if (target < static_cast<double>(j))
        throw ConfigError("make_family_spec: target must be >= j");
    DenseFamilySpec spec;
    spec.base = base;
    spec.j = j;
    spec.dim = dim;
    spec.kappa = kappa;
    spec.p = p;
    spec.r_j = r_j;
    spec.eta_rule = EtaRule::Admissible;
    const EtaSelection sel = select_eta_log(r_j, target, dim);
    spec.log_eta = sel.log_eta;
    spec.phi_value = sel.phi_value;
    fill_coefficients(spec);
    spec.validate();
    return spec;
}

DenseFamilySpec make_family_spec_fixed_eps(const BaseProfiles& base, int j,
                                           int dim, double kappa, double p,
                                           double r_j, double eps_bar) {
    if (!(eps_bar > 0.0))
        throw ConfigError("make_family_spec_fixed_eps: eps_bar must be positive");
    DenseFamilySpec spec;
    spec.base = base;
    spec.j = j;
    spec.dim = dim;
    spec.kappa = kappa;
    spec.p = p;
    spec.r_j = r_j;
    spec.eta_rule = EtaRule::FixedEps;
    spec.log_eta = std::log(eps_bar) + 2.0 * std::log(r_j);
    spec.phi_value = phi(eps_bar, dim);
    fill_coefficients(spec);
    spec.validate();
    return spec;
}

FamilyFields dense_family(const DenseFamilySpec& spec, const RadialGrid& grid) {
    spec.validate();
    if (grid.dim() != spec.dim)
        throw ConfigError("dense_family: grid and spec disagree on dimension");
    FamilyFields fields;
    fields.u.resize(grid.size());
    fields.v.resize(grid.size());
    fields.w.resize(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double r = grid.node(i);
        fields.u[i] = spec.u0j(r);
        fields.v[i] = spec.v0j(r);
        fields.w[i] = spec.w0j(r);
        if (!std::isfinite(fields.u[i]) || !std::isfinite(fields.v[i]) ||
            !std::isfinite(fields.w[i]))
            throw EvaluationError(
                "dense_family: spike not representable at node " +
                std::to_string(i) + " (eta too small for this grid)");
    }
    return fields;
}

FieldState family_state(const DenseFamilySpec& spec, GridPtr grid) {
    FamilyFields f = dense_family(spec, *grid);
    FieldState state;
    state.t = 0.0;
    state.u = std::move(f.u);
    state.v = std::move(f.v);
    state.w = std::move(f.w);
    state.grid = std::move(grid);
    return state;
}

namespace {

constexpr double quad_tol = 1e-10;

double integrate_interval(const std::function<double(double)>& f, double a, double b) {
    if (b <= a)
        return 0.0;
    boost::math::quadrature::tanh_sinh<double> integrator;
    return integrator.integrate(f, a, b, quad_tol);
}

// Spike-region integral int_0^{r_j} r^{N-1} g(r) dr where g is built from the
// spike profiles; split at the eta core scale when it is representable so the
// integrand is smooth on each piece.
double spike_integral(const DenseFamilySpec& spec,
                      const std::function<double(double)>& density) {
    const double eta = spec.eta();
    double split = 0.0;
    if (eta > 0.0) {
        const double core = std::sqrt(eta);
        if (core < 0.25 * spec.r_j && core > 1e-280)
            split = std::min(1e3 * core, 0.25 * spec.r_j);
    }
    if (split > 0.0)
        return integrate_interval(density, 0.0, split) +
               integrate_interval(density, split, spec.r_j);
    return integrate_interval(density, 0.0, spec.r_j);
}

// r^{N-1} (P+1) log(P+1) evaluated through log P to survive huge spikes.
double entropy_density(double r, double log_p, int dim) {
    if (r <= 0.0)
        return 0.0;
    const double log_rn = (dim - 1) * std::log(r);
    if (log_p < 300.0) {
        const double p = std::exp(log_p);
        return std::exp(log_rn) * (p + 1.0) * std::log1p(p);
    }
    // (P+1)log(P+1) = P log P + log P + 1 + O(log P / P)
    const double a = std::exp(log_rn + log_p); // r^{N-1} P, finite by exponents
    return a * log_p + std::exp(log_rn) * (log_p + 1.0);
}

double log_spike(const DenseFamilySpec& spec, double base_at_rj, double q,
                 double r) {
    return std::log(base_at_rj) +
           q * (log_r2_plus_eta(spec.r_j, spec.log_eta) -
                log_r2_plus_eta(r, spec.log_eta));
}

// Log-robust evaluators for the spike-region densities: the profiles and
// their radial derivatives can overflow double at the tiny radii tanh_sinh
// samples, while every density (profile times r^{N-1} powers) stays finite.
struct LogSpike {
    const DenseFamilySpec& spec;
    int dim;
    double qu;          // (N - kappa)/2
    double log_m;       // log(r_j^2 + eta)

    explicit LogSpike(const DenseFamilySpec& s)
        : spec(s), dim(s.dim), qu(0.5 * (s.dim - s.kappa)),
          log_m(log_r2_plus_eta(s.r_j, s.log_eta)) {}

    double log_pow(double r) const { return log_r2_plus_eta(r, spec.log_eta); }
    double log_u0j(double r) const {
        return std::log(spec.base.u(spec.r_j)) + qu * (log_m - log_pow(r));
    }
    double log_v0j(double r) const {
        return std::log(spec.base.v(spec.r_j)) + qu * (log_m - log_pow(r));
    }
    double log_w0j(double r) const {
        return std::log(spec.base.w(spec.r_j)) +
               0.5 * spec.kappa * (log_m - log_pow(r));
    }
    double log_abs_dw0j(double r) const {
        return std::log(spec.kappa) + std::log(spec.base.w(spec.r_j)) +
               std::log(r) + 0.5 * spec.kappa * log_m -
               0.5 * (spec.kappa + 2.0) * log_pow(r);
    }
    double log_rn(double r) const { return (dim - 1) * std::log(r); }

    // r^{N-1} * value, with the cancellation-free direct path when safe.
    double density(double r, double log_value) const {
        return std::exp(log_rn(r) + log_value);
    }
    // r^{N-1} |spike - base|^p with base negligible deep inside the core.
    double diff_density(double r, double log_value, double base_value,
                        double p) const {
        if (r == 0.0)
            return 0.0;
        if (log_value > 200.0)
            return std::exp(log_rn(r) + p * log_value);
        const double d = std::abs(std::exp(log_value) - base_value);
        return std::exp(log_rn(r)) * std::pow(d, p);
    }
};

} // namespace

FamilyNorms family_norms(const DenseFamilySpec& spec, double r_max) {
    spec.validate();
    const int dim = spec.dim;
    const double sphere = unit_sphere_area(dim);
    const LogSpike ls(spec);

    auto rn = [dim](double r) { return std::pow(r, dim - 1); };

    FamilyNorms norms;
    // Masses: spike part on [0, r_j], base Gaussian beyond.
    norms.mass_u = sphere * (spike_integral(spec, [&](double r) {
                       return r > 0.0 ? ls.density(r, ls.log_u0j(r)) : 0.0;
                   }) + integrate_interval([&](double r) { return rn(r) * spec.base.u(r); },
                                     spec.r_j, r_max));
    norms.mass_v = sphere * (spike_integral(spec, [&](double r) {
                       return r > 0.0 ? ls.density(r, ls.log_v0j(r)) : 0.0;
                   }) + integrate_interval([&](double r) { return rn(r) * spec.base.v(r); },
                                     spec.r_j, r_max));
    norms.mass_w = sphere * (spike_integral(spec, [&](double r) {
                       return r > 0.0 ? ls.density(r, ls.log_w0j(r)) : 0.0;
                   }) + integrate_interval([&](double r) { return rn(r) * spec.base.w(r); },
                                     spec.r_j, r_max));
    norms.grad_w_mass =
        sphere * (spike_integral(spec, [&](double r) {
            return r > 0.0 ? ls.density(r, ls.log_abs_dw0j(r)) : 0.0;
        }) + integrate_interval([&](double r) { return rn(r) * std::abs(spec.base.dw(r)); },
                          spec.r_j, r_max));
    norms.K = norms.mass_u + norms.mass_v + norms.mass_w + norms.grad_w_mass;
    norms.K_plus_one = norms.K + 1.0;

    // Distances to the base data; the difference is supported in B_{r_j}.
    const double p = spec.p;
    norms.lp_distance_u = std::pow(
        sphere * spike_integral(spec, [&](double r) {
            return r > 0.0
                       ? ls.diff_density(r, ls.log_u0j(r), spec.base.u(r), p)
                       : 0.0;
        }),
        1.0 / p);
    const double l2_sq = sphere * spike_integral(spec, [&](double r) {
        return r > 0.0 ? ls.diff_density(r, ls.log_w0j(r), spec.base.w(r), 2.0)
                       : 0.0;
    });
    const double h1_sq = sphere * spike_integral(spec, [&](double r) {
        return r > 0.0
                   ? ls.diff_density(r, ls.log_abs_dw0j(r),
                                     std::abs(spec.base.dw(r)), 2.0)
                   : 0.0;
    });
    norms.h1_distance_w = std::sqrt(l2_sq + h1_sq);
    norms.w11_distance_w = sphere * spike_integral(spec, [&](double r) {
        if (r == 0.0)
            return 0.0;
        return ls.diff_density(r, ls.log_w0j(r), spec.base.w(r), 1.0) +
               ls.diff_density(r, ls.log_abs_dw0j(r), std::abs(spec.base.dw(r)),
                               1.0);
    });
    return norms;
}

FamilyEnergy family_energy(const DenseFamilySpec& spec, const ModelParams& params,
                           double r_max) {
    spec.validate();
    params.validate();
    const int dim = spec.dim;
    const double sphere = unit_sphere_area(dim);
    auto rn = [dim](double r) { return std::pow(r, dim - 1); };

    const LogSpike ls(spec);
    FamilyEnergy e;
    e.dirichlet = 0.5 * sphere *
                  (spike_integral(spec, [&](double r) {
                      return r > 0.0
                                 ? ls.density(r, 2.0 * ls.log_abs_dw0j(r))
                                 : 0.0;
                  }) + integrate_interval([&](double r) {
                      const double d = spec.base.dw(r);
                      return rn(r) * d * d;
                  }, spec.r_j, r_max));
    e.l2w = 0.5 * params.lambda * sphere *
            (spike_integral(spec, [&](double r) {
                return r > 0.0 ? ls.density(r, 2.0 * ls.log_w0j(r)) : 0.0;
            }) + integrate_interval([&](double r) {
                const double w = spec.base.w(r);
                return rn(r) * w * w;
            }, spec.r_j, r_max));

    // Spike coupling has the exact phi closed form: the product u0j * w0j has
    // exponent -N/2, so the [0, r_j] integral is (alpha a_j + beta b_j) c_j phi.
    const double spike_coupling =
        sphere * (params.alpha * spec.a_j + params.beta * spec.b_j) * spec.c_j *
        spec.phi_value;
    const double base_coupling =
        sphere * integrate_interval([&](double r) {
            return rn(r) *
                   (params.alpha * spec.base.u(r) + params.beta * spec.base.v(r)) *
                   spec.base.w(r);
        }, spec.r_j, r_max);
    e.coupling = spike_coupling + base_coupling;

    const double cu = params.chi > 0.0 ? params.alpha / params.chi : 0.0;
    const double cv = params.xi > 0.0 ? params.beta / params.xi : 0.0;
    const double qu = 0.5 * (dim - spec.kappa);
    e.entropy_u =
        cu * sphere *
        (spike_integral(spec, [&](double r) {
            return entropy_density(r, log_spike(spec, spec.base.u(spec.r_j), qu, r),
                                   dim);
        }) + integrate_interval([&](double r) {
            const double u = spec.base.u(r);
            return rn(r) * (u + 1.0) * std::log1p(u);
        }, spec.r_j, r_max));
    e.entropy_v =
        cv * sphere *
        (spike_integral(spec, [&](double r) {
            return entropy_density(r, log_spike(spec, spec.base.v(spec.r_j), qu, r),
                                   dim);
        }) + integrate_interval([&](double r) {
            const double v = spec.base.v(r);
            return rn(r) * (v + 1.0) * std::log1p(v);
        }, spec.r_j, r_max));

    e.F = e.dirichlet + e.l2w - e.coupling + e.entropy_u + e.entropy_v;
    e.bounded_terms = e.dirichlet + e.l2w + e.entropy_u + e.entropy_v;
    e.coupling_lower_bound =
        static_cast<double>(spec.j) * sphere *
        (params.alpha * spec.base.u(spec.r_j) + params.beta * spec.base.v(spec.r_j)) *
        spec.w0j(spec.r_j);
    return e;
}

std::vector<TrendRow> family_energy_trend(const std::vector<DenseFamilySpec>& specs,
                                          const ModelParams& params, double r_max) {
    std::vector<TrendRow> rows;
    rows.reserve(specs.size());
    double max_bounded = 0.0;
    for (const auto& spec : specs) {
        const FamilyNorms norms = family_norms(spec, r_max);
        const FamilyEnergy e = family_energy(spec, params, r_max);
        TrendRow row;
        row.j = spec.j;
        row.K_j = norms.K;
        row.K_j_plus_one = norms.K_plus_one;
        row.F_j = e.F;
        row.coupling_j = e.coupling;
        row.coupling_lower_bound = e.coupling_lower_bound;
        row.bounded_terms = e.bounded_terms;
        if (spec.eta_rule == EtaRule::Admissible &&
            !(row.coupling_j >= row.coupling_lower_bound * (1.0 - 1e-9)))
            throw EvaluationError("family_energy_trend: coupling lower bound "
                                  "failed at j = " + std::to_string(spec.j));
        if (!std::isfinite(row.bounded_terms))
            throw EvaluationError("family_energy_trend: non-coupling terms "
                                  "diverged at j = " + std::to_string(spec.j));
        max_bounded = std::max(max_bounded, row.bounded_terms);
        rows.push_back(row);
    }
    return rows;
}

double theorem_threshold(double K, double theta, double C_fit) {
    if (!(theta > 0.5 && theta < 1.0))
        throw ConfigError("theorem_threshold: theta must lie in (1/2, 1)");
    if (!(K > 0.0))
        throw ConfigError("theorem_threshold: K must be positive");
    if (!(C_fit > 0.0))
        throw ConfigError("theorem_threshold: C_fit must be positive");
    return -C_fit * std::pow(K, 2.0 / (1.0 - theta));
}

} // namespace chemo

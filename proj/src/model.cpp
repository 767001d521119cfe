#include "chemolab/model.hpp"

#include <cmath>
#include <string>

#include "chemolab/errors.hpp"
#include "chemolab/operators.hpp"

namespace chemo {

void ModelParams::validate() const {
    auto check = [](double v, const char* name) {
        if (!(v >= 0.0) || !std::isfinite(v))
            throw ConfigError(std::string("ModelParams: ") + name +
                              " must be nonnegative and finite");
    };
    check(chi, "chi");
    check(xi, "xi");
    check(lambda, "lambda");
    check(alpha, "alpha");
    check(beta, "beta");
    if (dim < 3)
        throw ConfigError("ModelParams: dimension must be >= 3, got " +
                          std::to_string(dim));
}

FieldState FieldState::zero(GridPtr grid) {
    FieldState s;
    s.t = 0.0;
    s.u.assign(grid->size(), 0.0);
    s.v.assign(grid->size(), 0.0);
    s.w.assign(grid->size(), 0.0);
    s.grid = std::move(grid);
    return s;
}

double positivity_tolerance(std::span<const double> f) {
    return 1e-10 * (1.0 + sup_norm(f));
}

StateDiagnostics validate_state(const FieldState& state, const ModelParams& params) {
    if (state.grid->dim() != params.dim)
        throw ConfigError("validate_state: state and params disagree on dimension");
    StateDiagnostics d;
    d.sup_u = sup_norm(state.u);
    d.sup_v = sup_norm(state.v);
    d.sup_w = sup_norm(state.w);
    d.min_u = min_value(state.u);
    d.min_v = min_value(state.v);
    d.tol_pos_u = positivity_tolerance(state.u);
    d.tol_pos_v = positivity_tolerance(state.v);

    const std::size_t n = state.size();
    for (std::size_t i = 0; i < n; ++i) {
        if (!std::isfinite(state.u[i]) || !std::isfinite(state.v[i]) ||
            !std::isfinite(state.w[i])) {
            d.finite = false;
            d.messages.push_back("non-finite value at node " + std::to_string(i));
            break;
        }
    }
    for (std::size_t i = 0; i < n && d.finite; ++i) {
        if (state.u[i] < -d.tol_pos_u || state.v[i] < -d.tol_pos_v) {
            if (d.positivity_violations == 0)
                d.first_violation_node = static_cast<long>(i);
            ++d.positivity_violations;
        }
    }
    if (d.positivity_violations > 0)
        d.messages.push_back("positivity violated at " +
                             std::to_string(d.positivity_violations) +
                             " node(s), first at node " +
                             std::to_string(d.first_violation_node));
    if (d.finite) {
        d.mass_u = integrate_radial(state.u, *state.grid);
        d.mass_v = integrate_radial(state.v, *state.grid);
        const std::size_t last = n - 1;
        auto tail_bad = [&](const Field& f, double sup) {
            return sup > 0.0 && std::abs(f[last]) > 1e-8 * sup;
        };
        d.tail_ok = !(tail_bad(state.u, d.sup_u) || tail_bad(state.v, d.sup_v) ||
                      tail_bad(state.w, d.sup_w));
        if (!d.tail_ok)
            d.messages.push_back("tail mass at r_max above 1e-8 of sup-norm; "
                                 "domain truncation may be visible");
    }
    return d;
}

InitialDataSummary make_summary(double mass_u, double mass_v, double mass_w,
                                double grad_w_mass) {
    InitialDataSummary s;
    s.mass_u = mass_u;
    s.mass_v = mass_v;
    s.mass_w = mass_w;
    s.grad_w_mass = grad_w_mass;
    s.K = mass_u + mass_v + mass_w + grad_w_mass;
    s.K_plus_one = s.K + 1.0;
    return s;
}

InitialDataSummary summarize_initial(const FieldState& state) {
    if (state.t != 0.0)
        throw EvaluationError("summarize_initial: state must be at t = 0, got t = " +
                              std::to_string(state.t));
    const RadialGrid& g = *state.grid;
    const Field dw = radial_gradient(state.w, g);
    return make_summary(lp_norm(state.u, 1.0, g), lp_norm(state.v, 1.0, g),
                        lp_norm(state.w, 1.0, g), lp_norm(dw, 1.0, g));
}

Field gaussian_field(const RadialGrid& grid, double amplitude, double width) {
    Field f(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double r = grid.node(i) / width;
        f[i] = amplitude * std::exp(-r * r);
    }
    return f;
}

} // namespace chemo

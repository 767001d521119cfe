#include "chemolab/integrator.hpp"

#include <algorithm>
#include <cmath>

#include "chemolab/errors.hpp"
#include "chemolab/operators.hpp"

namespace chemo {

void StepControl::validate() const {
    if (!(0.0 < dt_min && dt_min <= dt_init && dt_init <= dt_max))
        throw ConfigError("StepControl: need 0 < dt_min <= dt_init <= dt_max");
    if (!(cfl_fraction > 0.0 && cfl_fraction <= 1.0))
        throw ConfigError("StepControl: cfl_fraction must lie in (0,1]");
    if (!(safety > 0.0 && safety < 1.0))
        throw ConfigError("StepControl: safety must lie in (0,1)");
}

namespace {

void check_positive(const Field& f, double t, const char* name) {
    const double tol = positivity_tolerance(f);
    for (std::size_t i = 0; i < f.size(); ++i) {
        if (!std::isfinite(f[i]))
            throw SchemeFailure(t, std::string(name) + " non-finite at node " +
                                       std::to_string(i));
        if (f[i] < -tol)
            throw SchemeFailure(t, std::string(name) + " lost positivity at node " +
                                       std::to_string(i) + " (value " +
                                       std::to_string(f[i]) + ", tol " +
                                       std::to_string(tol) + ")");
    }
}

} // namespace

FieldState step(const FieldState& state, const ModelParams& params, double dt,
                bool upwind) {
    if (!(dt > 0.0))
        throw ConfigError("step: dt must be positive");
    const RadialGrid& grid = *state.grid;
    const std::size_t n = grid.size();
    FieldState next;
    next.grid = state.grid;
    next.t = state.t + dt;

    const ImplicitDiffusion diffusion(grid);

    // Explicit advection against the current w.
    const Field div_u = chemotaxis_divergence(state.u, state.w, grid, upwind);
    const Field div_v = chemotaxis_divergence(state.v, state.w, grid, upwind);
    Field rhs(n);
    for (std::size_t i = 0; i < n; ++i)
        rhs[i] = state.u[i] - dt * params.chi * div_u[i];
    diffusion.solve(rhs, dt, 0.0, next.u);
    for (std::size_t i = 0; i < n; ++i)
        rhs[i] = state.v[i] - dt * params.xi * div_v[i];
    diffusion.solve(rhs, dt, 0.0, next.v);

    check_positive(next.u, next.t, "u");
    check_positive(next.v, next.t, "v");

    // w integrates the freshly advanced species (explicit source, implicit
    // diffusion and decay).
    for (std::size_t i = 0; i < n; ++i)
        rhs[i] = state.w[i] + dt * (params.alpha * next.u[i] + params.beta * next.v[i]);
    diffusion.solve(rhs, dt, params.lambda, next.w);
    for (std::size_t i = 0; i < n; ++i)
        if (!std::isfinite(next.w[i]))
            throw SchemeFailure(next.t, "w non-finite at node " + std::to_string(i));

    return next;
}

double suggest_dt_raw(const FieldState& state, const ModelParams& params,
                      const StepControl& control) {
    const double speed = std::max(params.chi, params.xi);
    const double grad_sup = sup_norm(radial_gradient(state.w, *state.grid));
    if (speed == 0.0 || grad_sup == 0.0)
        return std::numeric_limits<double>::infinity();
    return control.cfl_fraction * state.grid->min_spacing() / speed / grad_sup;
}

double suggest_dt(const FieldState& state, const ModelParams& params,
                  const StepControl& control) {
    const double raw = suggest_dt_raw(state, params, control);
    if (!std::isfinite(raw))
        return control.dt_max;
    return std::clamp(raw, control.dt_min, control.dt_max);
}

std::string to_string(TerminationReason::Kind kind) {
    switch (kind) {
        case TerminationReason::Kind::ReachedT: return "ReachedT";
        case TerminationReason::Kind::SupNormCap: return "SupNormCap";
        case TerminationReason::Kind::DtCollapse: return "DtCollapse";
        case TerminationReason::Kind::SchemeFailure: return "SchemeFailure";
    }
    return "?";
}

namespace {

StepRecord make_record(const FieldState& s, double dt, long step_index) {
    StepRecord r;
    r.t = s.t;
    r.dt = dt;
    r.sup_u = sup_norm(s.u);
    r.sup_v = sup_norm(s.v);
    r.sup_w = sup_norm(s.w);
    r.min_u = min_value(s.u);
    r.min_v = min_value(s.v);
    r.mass_u = integrate_radial(s.u, *s.grid);
    r.mass_v = integrate_radial(s.v, *s.grid);
    r.l1_w = lp_norm(s.w, 1.0, *s.grid);
    r.l1_grad_w = lp_norm(radial_gradient(s.w, *s.grid), 1.0, *s.grid);
    r.step_index = step_index;
    return r;
}

} // namespace

RunResult run_until(FieldState state, const ModelParams& params, double T_end,
                    const StepControl& control, const RunOptions& options) {
    control.validate();
    params.validate();
    if (!(T_end > state.t))
        throw ConfigError("run_until: T_end must exceed the state time");

    RunResult result;
    result.dt_min_reached = std::numeric_limits<double>::infinity();

    const double initial_sup = sup_norm(state.u) + sup_norm(state.v);
    const double cap = options.cap_factor * initial_sup;

    long last_observed_step = -1;
    auto observe = [&](const FieldState& s, double dt, long index) {
        if (index == last_observed_step)
            return; // keep snapshot times strictly increasing
        last_observed_step = index;
        StepRecord rec = make_record(s, dt, index);
        result.series.records.push_back(rec);
        for (const auto& obs : options.observers)
            obs(s, rec);
    };

    if (options.check_tail) {
        const StateDiagnostics d = validate_state(state, params);
        for (const auto& msg : d.messages)
            result.warnings.push_back("t=0: " + msg);
    }

    observe(state, 0.0, 0);
    double dt_prev = control.dt_init;
    long step_index = 0;
    while (state.t < T_end) {
        const double raw = suggest_dt_raw(state, params, control);
        if (raw < control.dt_min) {
            result.reason = {TerminationReason::Kind::DtCollapse, state.t,
                             "suggested dt " + std::to_string(raw) +
                                 " below dt_min"};
            observe(state, raw, step_index);
            result.final_state = std::move(state);
            return result;
        }
        double dt = suggest_dt(state, params, control);
        dt = std::min(dt, dt_prev / control.safety); // limit step growth
        dt = std::min(dt, T_end - state.t);
        FieldState next;
        try {
            next = step(state, params, dt, options.upwind);
        } catch (const SchemeFailure& failure) {
            result.reason = {TerminationReason::Kind::SchemeFailure, failure.t,
                             failure.what()};
            observe(state, dt, step_index);
            result.final_state = std::move(state);
            return result;
        }
        ++step_index;
        ++result.steps;
        dt_prev = dt;
        result.dt_min_reached = std::min(result.dt_min_reached, dt);
        state = std::move(next);

        const double total_sup = sup_norm(state.u) + sup_norm(state.v);
        result.peak_sup_u = std::max(result.peak_sup_u, sup_norm(state.u));
        result.peak_sup_v = std::max(result.peak_sup_v, sup_norm(state.v));
        if (initial_sup > 0.0 && total_sup > cap) {
            result.reason = {TerminationReason::Kind::SupNormCap, state.t,
                             "sup|u|+sup|v| exceeded cap"};
            observe(state, dt, step_index);
            result.final_state = std::move(state);
            return result;
        }
        const bool last = state.t >= T_end;
        if (last || step_index % options.observe_every == 0)
            observe(state, dt, step_index);
    }
    result.reason = {TerminationReason::Kind::ReachedT, state.t, ""};
    if (options.check_tail) {
        const StateDiagnostics d = validate_state(state, params);
        if (!d.tail_ok)
            result.warnings.push_back("t=end: tail mass at r_max above 1e-8 of "
                                      "sup-norm; consider a larger r_max");
    }
    result.final_state = std::move(state);
    return result;
}

} // namespace chemo

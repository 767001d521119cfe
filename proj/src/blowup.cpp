#include "chemolab/blowup.hpp"

#include <array>
#include <cmath>

#include <boost/numeric/odeint.hpp>

#include "chemolab/errors.hpp"

namespace chemo {

void GronwallProblem::validate() const {
    if (!(gron_a > 0.0))
        throw ConfigError("GronwallProblem: a must be positive");
    if (!(gron_b > 0.0))
        throw ConfigError("GronwallProblem: b must be positive");
    if (!(gron_kappa > 1.0))
        throw ConfigError("GronwallProblem: kappa must exceed 1");
}

double gronwall_bound(const GronwallProblem& p) {
    p.validate();
    return 1.0 / ((p.gron_kappa - 1.0) * std::pow(p.gron_a, p.gron_kappa - 1.0) *
                  p.gron_b);
}

double gronwall_ode_check(const GronwallProblem& p) {
    p.validate();
    const double bound = gronwall_bound(p);
    constexpr double escape = 1e12;

    using state_type = std::array<double, 1>;
    auto rhs = [&](const state_type& y, state_type& dydt, double) {
        dydt[0] = p.gron_b * std::pow(y[0], p.gron_kappa);
    };
    auto stepper = boost::numeric::odeint::make_controlled<
        boost::numeric::odeint::runge_kutta_dopri5<state_type>>(1e-12, 1e-10);

    state_type y = {p.gron_a};
    double t = 0.0;
    double dt = 1e-6 * bound;
    const double t_limit = 10.0 * bound;
    while (y[0] < escape && t < t_limit) {
        // Keep the step well below the remaining distance to the singularity.
        dt = std::min(dt, 0.05 * y[0] / (p.gron_b * std::pow(y[0], p.gron_kappa)));
        boost::numeric::odeint::controlled_step_result res;
        do {
            res = stepper.try_step(rhs, y, t, dt);
        } while (res == boost::numeric::odeint::fail);
    }
    if (y[0] < escape)
        throw EvaluationError("gronwall_ode_check: trajectory failed to escape");
    if (!(t <= bound * 1.02 && t >= bound * 0.98))
        throw EvaluationError("gronwall_ode_check: escape time " +
                              std::to_string(t) + " disagrees with bound " +
                              std::to_string(bound) + " beyond 2%");
    return t;
}

std::string to_string(BlowupVerdict::Status status) {
    switch (status) {
        case BlowupVerdict::Status::BlewUp: return "BlewUp";
        case BlowupVerdict::Status::GlobalUpTo: return "GlobalUpTo";
        case BlowupVerdict::Status::Inconclusive: return "Inconclusive";
    }
    return "?";
}

std::string to_string(BlowupVerdict::Trigger trigger) {
    switch (trigger) {
        case BlowupVerdict::Trigger::None: return "None";
        case BlowupVerdict::Trigger::SupNormCap: return "SupNormCap";
        case BlowupVerdict::Trigger::DtCollapse: return "DtCollapse";
    }
    return "?";
}

BlowupVerdict detect_blowup(const RunResult& run, double horizon,
                            std::optional<double> final_F) {
    BlowupVerdict verdict;
    verdict.peak_sup_u = run.peak_sup_u;
    verdict.peak_sup_v = run.peak_sup_v;
    verdict.dt_min_reached = run.dt_min_reached;
    if (final_F)
        verdict.final_F = *final_F;

    if (!run.series.records.empty()) {
        const double tame_cap = 10.0 * run.series.records.front().sup_u;
        for (const auto& rec : run.series.records)
            if (rec.sup_u <= tame_cap)
                verdict.last_tame_time = rec.t;
    }

    switch (run.reason.kind) {
        case TerminationReason::Kind::ReachedT:
            verdict.status = BlowupVerdict::Status::GlobalUpTo;
            verdict.t_star = horizon;
            break;
        case TerminationReason::Kind::SupNormCap:
            verdict.status = BlowupVerdict::Status::BlewUp;
            verdict.trigger = BlowupVerdict::Trigger::SupNormCap;
            verdict.t_star = run.reason.t;
            break;
        case TerminationReason::Kind::DtCollapse:
            verdict.status = BlowupVerdict::Status::BlewUp;
            verdict.trigger = BlowupVerdict::Trigger::DtCollapse;
            verdict.t_star = run.reason.t;
            break;
        case TerminationReason::Kind::SchemeFailure:
            verdict.status = BlowupVerdict::Status::Inconclusive;
            verdict.t_star = run.reason.t;
            break;
    }
    verdict.reason = run.reason.detail;
    return verdict;
}

} // namespace chemo

#pragma once

#include <optional>
#include <string>

#include "chemolab/integrator.hpp"

namespace chemo {

/// Parameters of the ODE comparison lemma: y >= a + b int_0^t y^kappa with
/// kappa > 1 forces blow-up no later than 1 / ((kappa-1) a^{kappa-1} b).
struct GronwallProblem {
    double gron_a = 1.0;
    double gron_b = 1.0;
    double gron_kappa = 2.0;

    void validate() const;
};

/// Exact bound 1 / ((kappa-1) a^{kappa-1} b).
double gronwall_bound(const GronwallProblem& p);

/// Integrates y' = b y^kappa, y(0) = a adaptively until y > 1e12 and returns
/// the escape time, asserting agreement with gronwall_bound within 2 percent
/// (the equality case of the lemma).
double gronwall_ode_check(const GronwallProblem& p);

/// Outcome classification of a run.
struct BlowupVerdict {
    enum class Status { BlewUp, GlobalUpTo, Inconclusive };
    enum class Trigger { None, SupNormCap, DtCollapse };

    Status status = Status::Inconclusive;
    Trigger trigger = Trigger::None;
    double t_star = 0.0;   // trigger time when BlewUp, horizon when GlobalUpTo
    std::string reason;
    double peak_sup_u = 0.0;
    double peak_sup_v = 0.0;
    double final_F = 0.0;
    double dt_min_reached = 0.0;
    /// Last time sup|u| stayed below 10x its initial value; brackets the
    /// singularity from below.
    double last_tame_time = 0.0;
};

std::string to_string(BlowupVerdict::Status status);
std::string to_string(BlowupVerdict::Trigger trigger);

/// Maps a completed run to a verdict: SupNormCap and DtCollapse classify
/// BlewUp, ReachedT classifies GlobalUpTo(horizon), SchemeFailure is
/// Inconclusive with the failure description.
BlowupVerdict detect_blowup(const RunResult& run, double horizon,
                            std::optional<double> final_F = std::nullopt);

} // namespace chemo

#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "chemolab/model.hpp"

namespace chemo {

/// Adaptive step-size bounds for the IMEX loop.
struct StepControl {
    double dt_init = 1e-5;
    double dt_min = 1e-9;
    double dt_max = 1e-3;
    double cfl_fraction = 0.45;  // fraction of the advective CFL limit
    double safety = 0.9;         // limits step growth to 1/safety per step

    void validate() const;
};

/// One IMEX step: diffusion (and the -lambda w decay) backward Euler via the
/// tridiagonal flux Laplacian; chemotactic advection and the alpha u + beta v
/// source explicit Euler. u and v are advected against the current w, then w
/// is updated with the new u, v (Gauss-Seidel lag matching the Duhamel
/// structure of the mild solution). Conservative fluxes plus zero-flux
/// boundaries keep the masses of u and v exact.
///
/// Throws SchemeFailure if positivity is lost beyond the relative tolerance
/// or a value goes non-finite; EvaluationError on a singular implicit solve.
FieldState step(const FieldState& state, const ModelParams& params, double dt,
                bool upwind = false);

/// CFL-limited suggestion clamp(cfl * dr_min / max(chi,xi) / |w_r|_inf,
/// dt_min, dt_max); dt_max when the advection speed vanishes.
double suggest_dt(const FieldState& state, const ModelParams& params,
                  const StepControl& control);
/// The unclamped CFL value (infinity when advection vanishes); the collapse
/// trigger in run_until compares this against dt_min.
double suggest_dt_raw(const FieldState& state, const ModelParams& params,
                      const StepControl& control);

struct TerminationReason {
    enum class Kind { ReachedT, SupNormCap, DtCollapse, SchemeFailure };
    Kind kind = Kind::ReachedT;
    double t = 0.0;
    std::string detail;

    bool blew_up() const {
        return kind == Kind::SupNormCap || kind == Kind::DtCollapse;
    }
};

std::string to_string(TerminationReason::Kind kind);

/// Per-observation scalar summary kept in the time series.
struct StepRecord {
    double t = 0.0;
    double dt = 0.0;
    double sup_u = 0.0, sup_v = 0.0, sup_w = 0.0;
    double min_u = 0.0, min_v = 0.0;
    double mass_u = 0.0, mass_v = 0.0;
    double l1_w = 0.0, l1_grad_w = 0.0;
    long step_index = 0;
};

struct TimeSeries {
    std::vector<StepRecord> records;
};

using Observer = std::function<void(const FieldState&, const StepRecord&)>;

struct RunOptions {
    /// Blow-up cap: terminate when sup|u| + sup|v| exceeds cap_factor times
    /// its initial value (resolution-limited surrogate, paired with the
    /// dt-collapse trigger).
    double cap_factor = 1e3;
    /// Observers fire every observe_every accepted steps plus first and last.
    long observe_every = 20;
    std::vector<Observer> observers;
    bool upwind = false;
    /// Warn (through the diagnostics message channel) if the tail check fails.
    bool check_tail = true;
};

struct RunResult {
    TimeSeries series;
    TerminationReason reason;
    FieldState final_state;
    double dt_min_reached = 0.0;
    double peak_sup_u = 0.0, peak_sup_v = 0.0;
    long steps = 0;
    std::vector<std::string> warnings;
};

/// Advances until t >= T_end or a termination trigger fires.
RunResult run_until(FieldState state, const ModelParams& params, double T_end,
                    const StepControl& control, const RunOptions& options = {});

} // namespace chemo

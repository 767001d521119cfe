#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "chemolab/blowup.hpp"
#include "chemolab/config.hpp"
#include "chemolab/csv.hpp"
#include "chemolab/energy.hpp"
#include "chemolab/family.hpp"
#include "chemolab/integrator.hpp"

namespace chemo {

/// Observer that evaluates the energy functional and the lemma probes at
/// every observation, appends one fixed-schema CSV row, and accumulates the
/// inequality/probe statistics the acceptance criteria quantify over.
class DiagnosticsLogger {
public:
    DiagnosticsLogger(const ModelParams& params, InitialDataSummary summary,
                      double theta, double alpha_exp, double c_tol,
                      std::unique_ptr<CsvWriter> csv);

    static std::vector<std::string> columns();

    void observe(const FieldState& state, const StepRecord& record);
    Observer as_observer();

    const std::vector<EnergyReport>& reports() const { return reports_; }
    long margin_checks() const { return margin_checks_; }
    long margin_holds() const { return margin_holds_; }
    long margin_within_tol() const { return margin_within_tol_; }
    /// Worst pointwise-chain excess margin - tolerance (<= 0 when criterion 6
    /// holds everywhere).
    double worst_pointwise_excess() const { return worst_pointwise_excess_; }
    double max_fitted_ratio(const std::string& key) const;
    bool probes_enabled() const { return probes_enabled_; }
    void set_probes_enabled(bool on) { probes_enabled_ = on; }
    /// Energy-inequality checks are mandatory only while sup|u| stays below
    /// 10x its initial value (advisory near blow-up).
    void set_mandatory_window(double initial_sup_u);

private:
    ModelParams params_;
    InitialDataSummary summary_;
    double theta_;
    double alpha_exp_;
    double c_tol_;
    std::unique_ptr<CsvWriter> csv_;
    std::vector<EnergyReport> reports_;
    std::optional<EnergyReport> previous_;
    long margin_checks_ = 0;
    long margin_holds_ = 0;
    long margin_within_tol_ = 0;
    double worst_pointwise_excess_ = -1e300;
    std::map<std::string, double> max_ratios_;
    bool probes_enabled_ = true;
    double mandatory_sup_cap_ = 1e300;
};

struct GronwallRow {
    double a = 0.0, b = 0.0, kappa = 0.0;
    double bound = 0.0;
    double measured = 0.0;
    double rel_err = 0.0;
};

struct ScanRow {
    int j = 0; // 0 is the small-amplitude baseline
    double r_j = 0.0;
    double eta = 0.0;
    double K = 0.0, K_plus_one = 1.0;
    double F0 = 0.0;
    double coupling0 = 0.0;
    BlowupVerdict verdict;
    long steps = 0;
    std::string error; // per-row failure, scan continues
};

struct ExperimentResult {
    int exit_code = 0;
    ExperimentKind kind = ExperimentKind::SingleRun;
    std::vector<std::pair<std::string, std::string>> summary;
    // Populated by the relevant experiments:
    std::optional<BlowupVerdict> verdict;
    std::vector<ScanRow> scan_rows;
    std::vector<TrendRow> trend_rows;
    std::vector<GronwallRow> gronwall_rows;
    double heat_error = 0.0;
    double heat_error_half_dt = 0.0;
    double heat_ratio = 0.0;
    std::vector<double> picard_residuals;
    double picard_vs_integrator = 0.0;
    double mass_drift_u = 0.0, mass_drift_v = 0.0;
    long margin_checks = 0, margin_holds = 0, margin_within_tol = 0;
    double worst_pointwise_excess = 0.0;
};

/// Gaussian initial data from the family base amplitudes times amp_scale.
FieldState gaussian_state(const RunConfig& config, GridPtr grid);

/// Per-experiment entry points; artifacts are written under out_dir (created
/// if missing). Exceptions propagate only for configuration errors; runtime
/// failures are recorded in the summary with a nonzero exit code.
ExperimentResult run_single(const RunConfig& config, const std::string& out_dir);
ExperimentResult run_heat_kernel(const RunConfig& config, const std::string& out_dir);
ExperimentResult run_picard_crosscheck(const RunConfig& config,
                                       const std::string& out_dir);
ExperimentResult run_gronwall_suite(const RunConfig& config,
                                    const std::string& out_dir);
ExperimentResult run_family_scan(const RunConfig& config, const std::string& out_dir);
ExperimentResult run_lemma_probes(const RunConfig& config, const std::string& out_dir);

ExperimentResult run_experiment(const RunConfig& config, const std::string& out_dir);

/// Exact self-similar heat kernel (4 pi t)^{-N/2} exp(-r^2 / 4t).
Field heat_kernel_field(const RadialGrid& grid, double t);

} // namespace chemo

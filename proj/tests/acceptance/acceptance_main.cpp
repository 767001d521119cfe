// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure. Each criterion pins its tolerances in code; artifacts land in a
// scratch directory.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <memory>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "chemolab/blowup.hpp"
#include "chemolab/config.hpp"
#include "chemolab/energy.hpp"
#include "chemolab/errors.hpp"
#include "chemolab/experiments.hpp"
#include "chemolab/family.hpp"
#include "chemolab/integrator.hpp"
#include "chemolab/semigroup.hpp"

using namespace chemo;
namespace fs = std::filesystem;

namespace {

struct Criterion {
    int number;
    std::string name;
    bool pass;
    std::string detail;
};

std::vector<Criterion> results;

void record(int number, const std::string& name, bool pass,
            const std::string& detail) {
    results.push_back({number, name, pass, detail});
    std::printf("%s criterion %d (%s): %s\n", pass ? "PASS" : "FAIL", number,
                name.c_str(), detail.c_str());
    std::fflush(stdout);
}

std::string fmt(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.3g", x);
    return buf;
}

const std::string out_root = "acceptance-out";

// Smooth-regime run shared by criteria 1, 5 and 6: full model, medium
// amplitudes, observation cadence configurable down to every step.
struct SmoothRun {
    RunResult run;
    std::shared_ptr<DiagnosticsLogger> logger;
    InitialDataSummary summary;
};

SmoothRun smooth_run(double amp_u, double amp_v, double amp_w, double t_end,
                     int cells, long observe_every) {
    RunConfig config = default_config(ExperimentKind::LemmaProbes);
    config.grid.nodes = cells;
    config.stepping.dt_max = 1e-4;
    config.family.amp_u = amp_u;
    config.family.amp_v = amp_v;
    config.family.amp_w = amp_w;
    auto grid = std::make_shared<RadialGrid>(config.grid.build(config.model.dim));
    FieldState state = gaussian_state(config, grid);
    SmoothRun out;
    out.summary = summarize_initial(state);
    out.logger = std::make_shared<DiagnosticsLogger>(
        config.model, out.summary, 0.75, -1.0, config.experiment.c_tol, nullptr);
    out.logger->set_mandatory_window(sup_norm(state.u));
    RunOptions opt;
    opt.observe_every = observe_every;
    opt.observers.push_back(out.logger->as_observer());
    out.run = run_until(std::move(state), config.model, t_end, config.stepping,
                        opt);
    return out;
}

double mass_drift(const TimeSeries& series, bool u_species) {
    double m0 = u_species ? series.records.front().mass_u
                          : series.records.front().mass_v;
    double worst = 0.0;
    for (const auto& rec : series.records) {
        const double m = u_species ? rec.mass_u : rec.mass_v;
        if (m0 != 0.0)
            worst = std::max(worst, std::abs(m - m0) / std::abs(m0));
    }
    return worst;
}

void criterion_1_mass_conservation() {
    // Every ReachedT run of the default suite keeps both masses within 1e-9.
    double worst = 0.0;
    {
        SmoothRun s = smooth_run(1.0, 1.0, 0.5, 0.5, 1024, 20);
        if (s.run.reason.kind != TerminationReason::Kind::ReachedT) {
            record(1, "mass conservation", false, "smooth run did not reach T");
            return;
        }
        worst = std::max({worst, mass_drift(s.run.series, true),
                          mass_drift(s.run.series, false)});
    }
    {
        SmoothRun s = smooth_run(0.25, 0.2, 0.1, 1.0, 1024, 50);
        if (s.run.reason.kind != TerminationReason::Kind::ReachedT) {
            record(1, "mass conservation", false, "small run did not reach T");
            return;
        }
        worst = std::max({worst, mass_drift(s.run.series, true),
                          mass_drift(s.run.series, false)});
    }
    record(1, "mass conservation", worst < 1e-9,
           "max relative drift " + fmt(worst) + " (tolerance 1e-9)");
}

void criterion_2_heat_kernel() {
    RunConfig config = default_config(ExperimentKind::HeatKernelValidation);
    const ExperimentResult res =
        run_heat_kernel(config, out_root + "/heat-kernel");
    const bool pass = res.heat_error < 1e-3 && res.heat_ratio >= 1.8;
    record(2, "heat-kernel exactness", pass,
           "sup error " + fmt(res.heat_error) + " (tol 1e-3), dt-halving ratio " +
               fmt(res.heat_ratio) + " (>= 1.8)");
}

void criterion_3_gronwall() {
    const ExperimentResult res =
        run_gronwall_suite(default_config(ExperimentKind::GronwallSuite),
                           out_root + "/gronwall");
    double worst = 0.0;
    for (const auto& row : res.gronwall_rows)
        worst = std::max(worst, row.rel_err);
    const bool exact_unit = gronwall_bound({1.0, 1.0, 2.0}) == 1.0;
    const bool pass = res.exit_code == 0 && worst <= 0.02 && exact_unit &&
                      res.gronwall_rows.size() == 27;
    record(3, "Gronwall lemma", pass,
           "27-point lattice worst rel err " + fmt(worst) +
               " (tol 2e-2), (1,1,2) bound exact: " +
               (exact_unit ? "yes" : "no"));
}

void criterion_4_gamma_integral() {
    double worst = 0.0;
    for (double lam : {0.5, 1.0, 2.0}) {
        const GammaIntegral g = gamma_integral_both(lam);
        worst = std::max(worst,
                         std::abs(g.quadrature - g.closed_form) / g.closed_form);
    }
    record(4, "Gamma integral", worst <= 1e-8,
           "worst quadrature/closed-form mismatch " + fmt(worst) +
               " (tol 1e-8)");
}

void criterion_5_energy_identity() {
    SmoothRun s = smooth_run(1.0, 1.0, 0.5, 0.3, 1024, 1); // every step
    bool identity_exact = true;
    bool dissipation_nonneg = true;
    for (const auto& rep : s.logger->reports()) {
        if (rep.F != rep.dirichlet + rep.l2w - rep.coupling + rep.entropy_u +
                         rep.entropy_v)
            identity_exact = false;
        if (rep.D < 0.0)
            dissipation_nonneg = false;
    }
    const long checks = s.logger->margin_checks();
    const long holds = s.logger->margin_holds();
    const long within = s.logger->margin_within_tol();
    const double hold_fraction =
        checks > 0 ? static_cast<double>(holds) / checks : 0.0;
    const bool pass = identity_exact && dissipation_nonneg &&
                      hold_fraction >= 0.99 && within == checks && checks > 0;
    std::ostringstream detail;
    detail << "identity exact: " << (identity_exact ? "yes" : "no")
           << ", D >= 0: " << (dissipation_nonneg ? "yes" : "no")
           << ", margins >= 0 on " << holds << "/" << checks
           << " steps (>= 99%), all within tol: "
           << (within == checks ? "yes" : "no");
    record(5, "energy identity and dissipation", pass, detail.str());
}

void criterion_6_pointwise_chain() {
    // Worst margin-minus-tolerance across the smooth suite, a stiffer run,
    // and a blow-up family member observed up to its trigger.
    double worst = -1e300;
    {
        SmoothRun s = smooth_run(1.0, 1.0, 0.5, 0.3, 1024, 10);
        worst = std::max(worst, s.logger->worst_pointwise_excess());
    }
    {
        SmoothRun s = smooth_run(4.0, 3.0, 2.0, 0.1, 1024, 10);
        worst = std::max(worst, s.logger->worst_pointwise_excess());
    }
    {
        RunConfig config = default_config(ExperimentKind::FamilyScan);
        config.grid.nodes = 1024;
        const double kappa = default_kappa(3, 1.0);
        BaseProfiles base{config.family.amp_u, config.family.amp_v,
                          config.family.amp_w};
        const DenseFamilySpec spec = make_family_spec_fixed_eps(
            base, 4, 3, kappa, 1.0, std::pow(2.0, -4), config.family.scan_eps);
        auto grid =
            std::make_shared<RadialGrid>(config.grid.build(config.model.dim));
        FieldState state = family_state(spec, grid);
        const InitialDataSummary summary = summarize_initial(state);
        DiagnosticsLogger logger(config.model, summary, 0.75, -1.0,
                                 config.experiment.c_tol, nullptr);
        logger.set_mandatory_window(sup_norm(state.u));
        RunOptions opt;
        opt.observe_every = 25;
        opt.cap_factor = config.experiment.cap_factor;
        opt.observers.push_back(logger.as_observer());
        run_until(std::move(state), config.model, 1.5, config.stepping, opt);
        worst = std::max(worst, logger.worst_pointwise_excess());
    }
    record(6, "pointwise bound chain", worst <= 0.0,
           "worst margin minus tolerance " + fmt(worst) + " (<= 0)");
}

void criterion_7_family_rates() {
    const int dim = 3;
    const double p = 1.0;
    const double kappa = default_kappa(dim, p);
    BaseProfiles base{1.0, 1.0, 1.0};
    std::vector<DenseFamilySpec> specs;
    for (int j = 2; j <= 8; ++j)
        specs.push_back(make_family_spec(
            base, j, dim, kappa, p, std::pow(2.0, -j),
            static_cast<double>(j) * std::pow(4.0, std::max(0, j - 2))));
    std::vector<FamilyNorms> norms;
    for (const auto& spec : specs)
        norms.push_back(family_norms(spec, 20.0));
    const double slope_u =
        std::log(norms.front().lp_distance_u / norms.back().lp_distance_u) /
        std::log(specs.front().r_j / specs.back().r_j);
    const double slope_w =
        std::log(norms.front().h1_distance_w / norms.back().h1_distance_w) /
        std::log(specs.front().r_j / specs.back().r_j);
    const double required_u = (dim - p * (dim - kappa)) / p - 0.1;
    const double required_w = 0.5 * (dim - 2.0 - 2.0 * kappa) - 0.1;

    ModelParams params;
    bool coupling_ok = true;
    std::vector<TrendRow> rows;
    try {
        rows = family_energy_trend(specs, params, 20.0);
    } catch (const EvaluationError&) {
        coupling_ok = false;
    }
    bool decreasing = coupling_ok;
    double f2 = 0.0, f8 = 0.0;
    if (coupling_ok) {
        for (const auto& row : rows)
            if (!(row.coupling_j >= row.coupling_lower_bound * (1.0 - 1e-9)))
                coupling_ok = false;
        for (std::size_t k = 0; k + 1 < rows.size(); ++k)
            if (rows[k].j >= 4 && rows[k + 1].F_j >= rows[k].F_j)
                decreasing = false;
        f2 = rows.front().F_j;
        f8 = rows.back().F_j;
    }
    const bool threshold = coupling_ok && f8 < -10.0 * std::abs(f2);
    const bool pass = slope_u >= required_u && slope_w >= required_w &&
                      coupling_ok && decreasing && threshold;
    std::ostringstream detail;
    detail << "L^p slope " << fmt(slope_u) << " (>= " << fmt(required_u)
           << "), H^1 slope " << fmt(slope_w) << " (>= " << fmt(required_w)
           << "), coupling bound " << (coupling_ok ? "holds" : "FAILS")
           << ", F_j decreasing " << (decreasing ? "yes" : "no") << ", F_8 = "
           << fmt(f8) << " < -10|F_2| = " << fmt(-10.0 * std::abs(f2)) << ": "
           << (threshold ? "yes" : "no");
    record(7, "family convergence rates", pass, detail.str());
}

void criterion_8_blowup_separation() {
    RunConfig config = default_config(ExperimentKind::FamilyScan);
    config.experiment.jobs = 8;
    const ExperimentResult coarse =
        run_family_scan(config, out_root + "/scan-2048");
    config.grid.nodes = 4096;
    const ExperimentResult fine =
        run_family_scan(config, out_root + "/scan-4096");

    auto classify = [](const ExperimentResult& res, int& j0, bool& baseline_ok,
                       bool& all_before_1) {
        j0 = -1;
        baseline_ok = false;
        all_before_1 = true;
        for (const auto& row : res.scan_rows) {
            if (row.j == 0) {
                baseline_ok =
                    row.verdict.status == BlowupVerdict::Status::GlobalUpTo;
                continue;
            }
            if (row.verdict.status == BlowupVerdict::Status::BlewUp) {
                if (j0 < 0)
                    j0 = row.j;
                if (row.verdict.t_star >= 1.0)
                    all_before_1 = false;
            } else if (j0 >= 0) {
                j0 = -2; // verdicts not monotone past onset
            }
        }
    };
    int j0_coarse, j0_fine;
    bool base_coarse, base_fine, before1_coarse, before1_fine;
    classify(coarse, j0_coarse, base_coarse, before1_coarse);
    classify(fine, j0_fine, base_fine, before1_fine);
    const bool stable = j0_coarse == j0_fine;
    const bool pass = base_coarse && base_fine && j0_coarse >= 1 &&
                      j0_coarse <= 8 && before1_coarse && before1_fine && stable;
    std::ostringstream detail;
    detail << "baseline GlobalUpTo: " << (base_coarse ? "yes" : "no")
           << ", onset j0 = " << j0_coarse << " (<= 8), all t* < 1: "
           << (before1_coarse ? "yes" : "no")
           << ", stable under doubling: " << (stable ? "yes" : "no");
    record(8, "blow-up regime separation", pass, detail.str());
}

void criterion_9_picard() {
    const ExperimentResult res = run_picard_crosscheck(
        default_config(ExperimentKind::PicardCrosscheck), out_root + "/picard");
    bool monotone = true;
    for (std::size_t k = 1; k < res.picard_residuals.size(); ++k)
        monotone = monotone &&
                   res.picard_residuals[k] <= res.picard_residuals[k - 1];
    const bool pass =
        res.picard_vs_integrator < 1e-4 && monotone &&
        res.picard_residuals.size() == 6;
    record(9, "Picard cross-check", pass,
           "6th iterate vs integrator " + fmt(res.picard_vs_integrator) +
               " (tol 1e-4), residuals monotone: " + (monotone ? "yes" : "no"));
}

bool files_identical(const std::string& a, const std::string& b) {
    std::ifstream fa(a, std::ios::binary), fb(b, std::ios::binary);
    if (!fa || !fb)
        return false;
    std::ostringstream sa, sb;
    sa << fa.rdbuf();
    sb << fb.rdbuf();
    return sa.str() == sb.str();
}

void criterion_10_determinism() {
    RunConfig probes = default_config(ExperimentKind::LemmaProbes);
    run_lemma_probes(probes, out_root + "/det-a");
    run_lemma_probes(probes, out_root + "/det-b");
    const bool ts_same = files_identical(out_root + "/det-a/timeseries.csv",
                                         out_root + "/det-b/timeseries.csv");
    RunConfig scan = default_config(ExperimentKind::FamilyScan);
    scan.grid.nodes = 512;
    scan.experiment.jobs = 8;
    run_family_scan(scan, out_root + "/det-c");
    scan.experiment.jobs = 3;
    run_family_scan(scan, out_root + "/det-d");
    const bool scan_same = files_identical(out_root + "/det-c/scan.csv",
                                           out_root + "/det-d/scan.csv");
    record(10, "determinism", ts_same && scan_same,
           std::string("time series bit-identical: ") + (ts_same ? "yes" : "no") +
               ", scan table identical across job counts: " +
               (scan_same ? "yes" : "no"));
}

} // namespace

int main() {
    fs::create_directories(out_root);
    criterion_1_mass_conservation();
    criterion_2_heat_kernel();
    criterion_3_gronwall();
    criterion_4_gamma_integral();
    criterion_5_energy_identity();
    criterion_6_pointwise_chain();
    criterion_7_family_rates();
    criterion_8_blowup_separation();
    criterion_9_picard();
    criterion_10_determinism();

    int failures = 0;
    for (const auto& c : results)
        if (!c.pass)
            ++failures;
    std::printf("%d/%zu criteria passed\n",
                static_cast<int>(results.size()) - failures, results.size());
    return failures == 0 ? 0 : 1;
}

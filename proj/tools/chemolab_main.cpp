// chemolab: numerical laboratory for the radial two-species chemotaxis
// system on R^N. Subcommands mirror the experiment kinds; each writes CSV
// time series / scan tables plus a structured summary record under --out.

#include <cstdio>
#include <exception>
#include <string>

#include <CLI11.hpp>

#include "chemolab/config.hpp"
#include "chemolab/errors.hpp"
#include "chemolab/experiments.hpp"

namespace {

struct CliOptions {
    std::string config_path;
    std::string out_dir = "chemolab-out";
    int resolution = 0;
    double horizon = 0.0;
    double theta = 0.0;
    int jobs = 0;
};

int run_kind(chemo::ExperimentKind kind, const CliOptions& cli) {
    chemo::RunConfig config = cli.config_path.empty()
                                  ? chemo::default_config(kind)
                                  : chemo::parse_config_file(cli.config_path);
    config.experiment.kind = kind;
    if (cli.resolution > 0)
        config.grid.nodes = cli.resolution;
    if (cli.horizon > 0.0)
        config.experiment.horizon = cli.horizon;
    if (cli.theta > 0.0)
        config.experiment.theta = cli.theta;
    if (cli.jobs > 0)
        config.experiment.jobs = cli.jobs;

    const chemo::ExperimentResult result = chemo::run_experiment(config, cli.out_dir);
    std::printf("%s: %s (artifacts in %s)\n", chemo::to_string(kind).c_str(),
                result.exit_code == 0 ? "ok" : "FAILED", cli.out_dir.c_str());
    return result.exit_code;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"chemolab: radial two-species chemotaxis blow-up laboratory"};
    app.require_subcommand(1);

    CliOptions cli;
    app.add_option("--config", cli.config_path, "config file (sections [model], "
                   "[grid], [stepping], [family], [experiment])");
    app.add_option("--out", cli.out_dir, "output directory");
    app.add_option("--resolution", cli.resolution, "override grid cell count M");
    app.add_option("--horizon", cli.horizon, "override scan horizon T");
    app.add_option("--theta", cli.theta, "override theta in (1/2, 1)");
    app.add_option("--jobs", cli.jobs, "parallel scan rows");

    const std::pair<const char*, chemo::ExperimentKind> kinds[] = {
        {"single-run", chemo::ExperimentKind::SingleRun},
        {"heat-kernel-validation", chemo::ExperimentKind::HeatKernelValidation},
        {"picard-crosscheck", chemo::ExperimentKind::PicardCrosscheck},
        {"gronwall-suite", chemo::ExperimentKind::GronwallSuite},
        {"family-scan", chemo::ExperimentKind::FamilyScan},
        {"lemma-probes", chemo::ExperimentKind::LemmaProbes},
    };
    chemo::ExperimentKind selected = chemo::ExperimentKind::SingleRun;
    for (const auto& [name, kind] : kinds) {
        auto* sub = app.add_subcommand(name);
        sub->fallthrough();
        const chemo::ExperimentKind k = kind;
        sub->callback([&selected, k] { selected = k; });
    }

    CLI11_PARSE(app, argc, argv);

    try {
        return run_kind(selected, cli);
    } catch (const chemo::ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}

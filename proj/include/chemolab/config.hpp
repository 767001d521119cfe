#pragma once

#include <string>

#include "chemolab/integrator.hpp"
#include "chemolab/model.hpp"

namespace chemo {

enum class ExperimentKind {
    SingleRun,
    HeatKernelValidation,
    PicardCrosscheck,
    GronwallSuite,
    FamilyScan,
    LemmaProbes,
};

std::string to_string(ExperimentKind kind);
ExperimentKind experiment_kind_from_string(const std::string& name);

struct GridConfig {
    double r_max = 20.0;
    int nodes = 1024; // cell count M; the grid carries M+1 nodes
    GridLayout layout = GridLayout::Uniform;
    double ratio = 0.997;     // geometric layouts only
    double first_cell = 0.0;  // > 0 solves the ratio for this first cell width

    RadialGrid build(int dim) const;
};

struct FamilyConfig {
    double amp_u = 24.0;
    double amp_v = 24.0;
    double amp_w = 12.0;
    double kappa = 0.0; // 0 = admissible-interval midpoint
    double p = 1.0;
    int j_min = 1;
    int j_max = 8;
    double scan_eps = 1e-2;        // spike sharpness of grid-realized members
    double baseline_scale = 1e-2;  // amplitude factor of the j = 0 baseline
};

struct ExperimentConfig {
    ExperimentKind kind = ExperimentKind::SingleRun;
    double horizon = 1.5;
    double theta = 0.75;
    double t_end = 1.0;
    double amp_scale = 1.0;
    double c_tol = 50.0;          // energy-inequality model tolerance per dt
    double cap_factor = 1e3;
    long observe_every = 20;
    long checkpoint_every = 0;    // full-state checkpoint cadence (0 = final only)
    double alpha_exp = 0.0;       // 0 = midpoint of (0, 2/(N-1))
    int jobs = 1;
};

struct RunConfig {
    ModelParams model;
    GridConfig grid;
    StepControl stepping;
    bool upwind = false; // advection face values: arithmetic mean or upwind
    FamilyConfig family;
    ExperimentConfig experiment;
};

/// Parses the sectioned key-value config format:
///   [model] / [grid] / [stepping] / [family] / [experiment]
/// with `key = value` lines, `#` comments, and errors anchored to the
/// offending line. Unknown sections or keys are errors.
RunConfig parse_config_text(const std::string& text, const std::string& origin);
RunConfig parse_config_file(const std::string& path);

/// Serialized form that parses back to the same config.
std::string config_to_text(const RunConfig& config);

/// Built-in defaults per experiment kind.
RunConfig default_config(ExperimentKind kind);

} // namespace chemo

#include "chemolab/config.hpp"

#include <cctype>
#include <fstream>
#include <map>
#include <sstream>

#include "chemolab/errors.hpp"

namespace chemo {

std::string to_string(ExperimentKind kind) {
    switch (kind) {
        case ExperimentKind::SingleRun: return "single-run";
        case ExperimentKind::HeatKernelValidation: return "heat-kernel-validation";
        case ExperimentKind::PicardCrosscheck: return "picard-crosscheck";
        case ExperimentKind::GronwallSuite: return "gronwall-suite";
        case ExperimentKind::FamilyScan: return "family-scan";
        case ExperimentKind::LemmaProbes: return "lemma-probes";
    }
    return "?";
}

ExperimentKind experiment_kind_from_string(const std::string& name) {
    if (name == "single-run") return ExperimentKind::SingleRun;
    if (name == "heat-kernel-validation") return ExperimentKind::HeatKernelValidation;
    if (name == "picard-crosscheck") return ExperimentKind::PicardCrosscheck;
    if (name == "gronwall-suite") return ExperimentKind::GronwallSuite;
    if (name == "family-scan") return ExperimentKind::FamilyScan;
    if (name == "lemma-probes") return ExperimentKind::LemmaProbes;
    throw ConfigError("unknown experiment kind '" + name + "'");
}

RadialGrid GridConfig::build(int dim) const {
    if (layout == GridLayout::Uniform)
        return RadialGrid::uniform(r_max, nodes, dim);
    if (first_cell > 0.0)
        return RadialGrid::geometric_first_cell(r_max, nodes, dim, first_cell);
    return RadialGrid::geometric(r_max, nodes, dim, ratio);
}

namespace {

std::string trim(const std::string& s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

struct Parser {
    const std::string& origin;
    int line_no = 0;

    [[noreturn]] void fail(const std::string& msg) const {
        throw ConfigError(origin + ":" + std::to_string(line_no) + ": " + msg);
    }

    double to_double(const std::string& v) const {
        try {
            std::size_t pos = 0;
            const double x = std::stod(v, &pos);
            if (pos != v.size()) fail("trailing characters in number '" + v + "'");
            return x;
        } catch (const ConfigError&) {
            throw;
        } catch (const std::exception&) {
            fail("expected a number, got '" + v + "'");
        }
    }

    long to_long(const std::string& v) const {
        try {
            std::size_t pos = 0;
            const long x = std::stol(v, &pos);
            if (pos != v.size()) fail("trailing characters in integer '" + v + "'");
            return x;
        } catch (const ConfigError&) {
            throw;
        } catch (const std::exception&) {
            fail("expected an integer, got '" + v + "'");
        }
    }
};

} // namespace

RunConfig parse_config_text(const std::string& text, const std::string& origin) {
    RunConfig cfg;
    Parser parser{origin};
    std::istringstream in(text);
    std::string line, section;
    while (std::getline(in, line)) {
        ++parser.line_no;
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos)
            line = line.substr(0, hash);
        line = trim(line);
        if (line.empty())
            continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                parser.fail("malformed section header '" + line + "'");
            section = trim(line.substr(1, line.size() - 2));
            if (section != "model" && section != "grid" && section != "stepping" &&
                section != "family" && section != "experiment")
                parser.fail("unknown section [" + section + "]");
            continue;
        }
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            parser.fail("expected 'key = value', got '" + line + "'");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (section.empty())
            parser.fail("key '" + key + "' appears before any section header");

        if (section == "model") {
            if (key == "chi") cfg.model.chi = parser.to_double(value);
            else if (key == "xi") cfg.model.xi = parser.to_double(value);
            else if (key == "lambda") cfg.model.lambda = parser.to_double(value);
            else if (key == "alpha") cfg.model.alpha = parser.to_double(value);
            else if (key == "beta") cfg.model.beta = parser.to_double(value);
            else if (key == "dim") cfg.model.dim = static_cast<int>(parser.to_long(value));
            else parser.fail("unknown key '" + key + "' in [model]");
        } else if (section == "grid") {
            if (key == "r_max") cfg.grid.r_max = parser.to_double(value);
            else if (key == "nodes") cfg.grid.nodes = static_cast<int>(parser.to_long(value));
            else if (key == "layout") {
                if (value == "uniform") cfg.grid.layout = GridLayout::Uniform;
                else if (value == "geometric") cfg.grid.layout = GridLayout::Geometric;
                else parser.fail("layout must be 'uniform' or 'geometric'");
            }
            else if (key == "ratio") cfg.grid.ratio = parser.to_double(value);
            else if (key == "first_cell") cfg.grid.first_cell = parser.to_double(value);
            else parser.fail("unknown key '" + key + "' in [grid]");
        } else if (section == "stepping") {
            if (key == "dt_init") cfg.stepping.dt_init = parser.to_double(value);
            else if (key == "dt_min") cfg.stepping.dt_min = parser.to_double(value);
            else if (key == "dt_max") cfg.stepping.dt_max = parser.to_double(value);
            else if (key == "cfl") cfg.stepping.cfl_fraction = parser.to_double(value);
            else if (key == "safety") cfg.stepping.safety = parser.to_double(value);
            else if (key == "upwind") {
                if (value == "true") cfg.upwind = true;
                else if (value == "false") cfg.upwind = false;
                else parser.fail("upwind must be 'true' or 'false'");
            }
            else parser.fail("unknown key '" + key + "' in [stepping]");
        } else if (section == "family") {
            if (key == "amp_u") cfg.family.amp_u = parser.to_double(value);
            else if (key == "amp_v") cfg.family.amp_v = parser.to_double(value);
            else if (key == "amp_w") cfg.family.amp_w = parser.to_double(value);
            else if (key == "kappa") cfg.family.kappa = parser.to_double(value);
            else if (key == "p") cfg.family.p = parser.to_double(value);
            else if (key == "j_min") cfg.family.j_min = static_cast<int>(parser.to_long(value));
            else if (key == "j_max") cfg.family.j_max = static_cast<int>(parser.to_long(value));
            else if (key == "scan_eps") cfg.family.scan_eps = parser.to_double(value);
            else if (key == "baseline_scale") cfg.family.baseline_scale = parser.to_double(value);
            else parser.fail("unknown key '" + key + "' in [family]");
        } else if (section == "experiment") {
            if (key == "kind") {
                try {
                    cfg.experiment.kind = experiment_kind_from_string(value);
                } catch (const ConfigError& e) {
                    parser.fail(e.what());
                }
            }
            else if (key == "horizon") cfg.experiment.horizon = parser.to_double(value);
            else if (key == "theta") cfg.experiment.theta = parser.to_double(value);
            else if (key == "t_end") cfg.experiment.t_end = parser.to_double(value);
            else if (key == "amp_scale") cfg.experiment.amp_scale = parser.to_double(value);
            else if (key == "c_tol") cfg.experiment.c_tol = parser.to_double(value);
            else if (key == "cap_factor") cfg.experiment.cap_factor = parser.to_double(value);
            else if (key == "observe_every") cfg.experiment.observe_every = parser.to_long(value);
            else if (key == "checkpoint_every") cfg.experiment.checkpoint_every = parser.to_long(value);
            else if (key == "alpha_exp") cfg.experiment.alpha_exp = parser.to_double(value);
            else if (key == "jobs") cfg.experiment.jobs = static_cast<int>(parser.to_long(value));
            else parser.fail("unknown key '" + key + "' in [experiment]");
        }
    }

    // Field-level validation with the config origin attached.
    auto named_check = [&](bool ok, const std::string& what) {
        if (!ok)
            throw ConfigError(origin + ": " + what);
    };
    named_check(cfg.model.chi >= 0.0, "model.chi must be nonnegative");
    named_check(cfg.model.xi >= 0.0, "model.xi must be nonnegative");
    named_check(cfg.model.lambda >= 0.0, "model.lambda must be nonnegative");
    named_check(cfg.model.alpha >= 0.0, "model.alpha must be nonnegative");
    named_check(cfg.model.beta >= 0.0, "model.beta must be nonnegative");
    named_check(cfg.model.dim >= 3, "model.dim must be >= 3");
    named_check(cfg.grid.r_max > 0.0, "grid.r_max must be positive");
    named_check(cfg.grid.nodes >= 16, "grid.nodes must be >= 16");
    named_check(cfg.experiment.theta > 0.5 && cfg.experiment.theta < 1.0,
                "experiment.theta must lie in (1/2, 1)");
    named_check(cfg.experiment.horizon > 0.0, "experiment.horizon must be positive");
    named_check(cfg.experiment.jobs >= 1, "experiment.jobs must be >= 1");
    cfg.stepping.validate();
    return cfg;
}

RunConfig parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot open config file '" + path + "'");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_config_text(buffer.str(), path);
}

std::string config_to_text(const RunConfig& c) {
    std::ostringstream out;
    out.precision(17);
    out << "[model]\n"
        << "chi = " << c.model.chi << "\nxi = " << c.model.xi
        << "\nlambda = " << c.model.lambda << "\nalpha = " << c.model.alpha
        << "\nbeta = " << c.model.beta << "\ndim = " << c.model.dim << "\n\n";
    out << "[grid]\n"
        << "r_max = " << c.grid.r_max << "\nnodes = " << c.grid.nodes
        << "\nlayout = "
        << (c.grid.layout == GridLayout::Uniform ? "uniform" : "geometric")
        << "\nratio = " << c.grid.ratio << "\nfirst_cell = " << c.grid.first_cell
        << "\n\n";
    out << "[stepping]\n"
        << "dt_init = " << c.stepping.dt_init << "\ndt_min = " << c.stepping.dt_min
        << "\ndt_max = " << c.stepping.dt_max
        << "\ncfl = " << c.stepping.cfl_fraction
        << "\nsafety = " << c.stepping.safety
        << "\nupwind = " << (c.upwind ? "true" : "false") << "\n\n";
    out << "[family]\n"
        << "amp_u = " << c.family.amp_u << "\namp_v = " << c.family.amp_v
        << "\namp_w = " << c.family.amp_w << "\nkappa = " << c.family.kappa
        << "\np = " << c.family.p << "\nj_min = " << c.family.j_min
        << "\nj_max = " << c.family.j_max << "\nscan_eps = " << c.family.scan_eps
        << "\nbaseline_scale = " << c.family.baseline_scale << "\n\n";
    out << "[experiment]\n"
        << "kind = " << to_string(c.experiment.kind)
        << "\nhorizon = " << c.experiment.horizon
        << "\ntheta = " << c.experiment.theta << "\nt_end = " << c.experiment.t_end
        << "\namp_scale = " << c.experiment.amp_scale
        << "\nc_tol = " << c.experiment.c_tol
        << "\ncap_factor = " << c.experiment.cap_factor
        << "\nobserve_every = " << c.experiment.observe_every
        << "\ncheckpoint_every = " << c.experiment.checkpoint_every
        << "\nalpha_exp = " << c.experiment.alpha_exp
        << "\njobs = " << c.experiment.jobs << "\n";
    return out.str();
}

RunConfig default_config(ExperimentKind kind) {
    RunConfig cfg;
    cfg.experiment.kind = kind;
    switch (kind) {
        case ExperimentKind::SingleRun:
            cfg.experiment.t_end = 1.0;
            cfg.family.amp_u = 1.0;
            cfg.family.amp_v = 1.0;
            cfg.family.amp_w = 0.5;
            break;
        case ExperimentKind::HeatKernelValidation:
            cfg.model.chi = 0.0;
            cfg.model.xi = 0.0;
            cfg.model.lambda = 0.0;
            cfg.model.alpha = 0.0;
            cfg.model.beta = 0.0;
            cfg.grid.nodes = 2048;
            cfg.grid.r_max = 20.0;
            cfg.stepping.dt_max = 5e-4;
            cfg.stepping.dt_init = 5e-4;
            cfg.experiment.t_end = 0.5;
            cfg.experiment.observe_every = 200;
            break;
        case ExperimentKind::PicardCrosscheck:
            cfg.grid.nodes = 256;
            cfg.grid.r_max = 12.0;
            cfg.stepping.dt_max = 2.5e-6;
            cfg.stepping.dt_init = 2.5e-6;
            cfg.stepping.dt_min = 1e-10;
            cfg.experiment.t_end = 0.005;
            cfg.experiment.observe_every = 100;
            cfg.family.amp_u = 0.05;
            cfg.family.amp_v = 0.05;
            cfg.family.amp_w = 0.05;
            break;
        case ExperimentKind::GronwallSuite:
            break;
        case ExperimentKind::FamilyScan:
            cfg.grid.nodes = 2048;
            cfg.grid.r_max = 20.0;
            cfg.grid.layout = GridLayout::Geometric;
            cfg.grid.first_cell = 5e-4;
            cfg.stepping.dt_max = 1e-3;
            cfg.stepping.dt_min = 1e-8;
            cfg.experiment.horizon = 1.5;
            cfg.experiment.observe_every = 50;
            break;
        case ExperimentKind::LemmaProbes:
            cfg.grid.nodes = 1024;
            cfg.grid.r_max = 16.0;
            cfg.stepping.dt_max = 1e-4;
            cfg.stepping.dt_init = 1e-5;
            cfg.experiment.t_end = 0.5;
            cfg.experiment.observe_every = 25;
            cfg.family.amp_u = 1.0;
            cfg.family.amp_v = 1.0;
            cfg.family.amp_w = 0.5;
            break;
    }
    return cfg;
}

} // namespace chemo

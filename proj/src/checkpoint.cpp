#include "chemolab/checkpoint.hpp"

#include <fstream>
#include <memory>

#include <json.hpp>

#include "chemolab/errors.hpp"

namespace chemo {

namespace {

using nlohmann::json;

json grid_to_json(const GridConfig& g) {
    return json{{"r_max", g.r_max},
                {"nodes", g.nodes},
                {"layout", g.layout == GridLayout::Uniform ? "uniform" : "geometric"},
                {"ratio", g.ratio},
                {"first_cell", g.first_cell}};
}

GridConfig grid_from_json(const json& j) {
    GridConfig g;
    g.r_max = j.at("r_max").get<double>();
    g.nodes = j.at("nodes").get<int>();
    g.layout = j.at("layout").get<std::string>() == "uniform"
                   ? GridLayout::Uniform
                   : GridLayout::Geometric;
    g.ratio = j.at("ratio").get<double>();
    g.first_cell = j.at("first_cell").get<double>();
    return g;
}

} // namespace

void save_checkpoint(const std::string& path, const ModelParams& params,
                     const GridConfig& grid_spec, const FieldState& state) {
    json j;
    j["format"] = "chemolab-checkpoint";
    j["version"] = 1;
    j["params"] = {{"chi", params.chi},   {"xi", params.xi},
                   {"lambda", params.lambda}, {"alpha", params.alpha},
                   {"beta", params.beta}, {"dim", params.dim}};
    j["grid"] = grid_to_json(grid_spec);
    j["t"] = state.t;
    j["u"] = state.u;
    j["v"] = state.v;
    j["w"] = state.w;
    std::ofstream out(path);
    if (!out)
        throw EvaluationError("save_checkpoint: cannot open '" + path + "'");
    out << j.dump(1) << "\n";
}

Checkpoint load_checkpoint(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw EvaluationError("load_checkpoint: cannot open '" + path + "'");
    json j;
    in >> j;
    if (j.value("format", "") != "chemolab-checkpoint")
        throw EvaluationError("load_checkpoint: '" + path +
                              "' is not a chemolab checkpoint");
    Checkpoint cp;
    const auto& p = j.at("params");
    cp.params.chi = p.at("chi").get<double>();
    cp.params.xi = p.at("xi").get<double>();
    cp.params.lambda = p.at("lambda").get<double>();
    cp.params.alpha = p.at("alpha").get<double>();
    cp.params.beta = p.at("beta").get<double>();
    cp.params.dim = p.at("dim").get<int>();
    cp.grid_spec = grid_from_json(j.at("grid"));
    cp.state.t = j.at("t").get<double>();
    cp.state.u = j.at("u").get<Field>();
    cp.state.v = j.at("v").get<Field>();
    cp.state.w = j.at("w").get<Field>();
    cp.state.grid =
        std::make_shared<RadialGrid>(cp.grid_spec.build(cp.params.dim));
    return cp;
}

} // namespace chemo

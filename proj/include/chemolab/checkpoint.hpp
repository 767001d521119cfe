#pragma once

#include <string>

#include "chemolab/config.hpp"
#include "chemolab/model.hpp"

namespace chemo {

/// Self-describing JSON checkpoint of (params, grid spec, t, u, v, w).
/// Doubles are serialized with shortest-round-trip formatting, so a
/// save/load cycle reproduces every value bit-exactly and the grid is
/// rebuilt from its spec deterministically.
void save_checkpoint(const std::string& path, const ModelParams& params,
                     const GridConfig& grid_spec, const FieldState& state);

struct Checkpoint {
    ModelParams params;
    GridConfig grid_spec;
    FieldState state;
};

Checkpoint load_checkpoint(const std::string& path);

} // namespace chemo

#pragma once

#include "cir/autodiff/node.hpp"

#include <string>
#include <vector>

namespace cir::nets {

/// Flat binary checkpoint: a magic header followed by (name, rows, cols,
/// column-major raw doubles) per tensor. Round-trips bit-exactly.
void save_checkpoint(const std::string& path, const std::vector<ad::NodePtr>& params);

/// Restores values into an already-constructed parameter list; names and
/// shapes must match the file exactly.
void load_checkpoint(const std::string& path, const std::vector<ad::NodePtr>& params);

} // namespace cir::nets

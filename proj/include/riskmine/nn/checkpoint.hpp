#pragma once

#include <filesystem>
#include <string>

#include "riskmine/nn/parameter.hpp"

namespace riskmine::nn {

struct CheckpointMeta {
  std::string fingerprint;  // configuration digest of the run
  std::string rng_state;
};

// Binary container: magic "RMCKPT", format version, metadata strings, then
// every parameter as (name, group, rows, cols, raw little-endian doubles).
void save_checkpoint(const ParameterStore& store, const CheckpointMeta& meta,
                     const std::filesystem::path& path);

// Restores values into an identically shaped store. Throws FormatError on a
// bad file and ShapeError when a parameter name or shape does not match.
CheckpointMeta load_checkpoint(ParameterStore& store, const std::filesystem::path& path);

}  // namespace riskmine::nn

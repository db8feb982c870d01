#pragma once

#include <filesystem>

#include "nfsim/tensor.hpp"

namespace nfsim {

// Named-tensor checkpoint file, versioned header, little-endian:
//   magic "NFCK" | u32 version | u64 tensor count
//   per tensor: u32 name length | name bytes | u32 rank | u64 dims... | f64 data...
void save_params(const std::filesystem::path& path, const ParamStore& params);

// Loads values into an existing store; every stored tensor must match a slot
// with the same name and shape.
void load_params(const std::filesystem::path& path, ParamStore& params);

} // namespace nfsim

#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "tow/nn/mlp.hpp"

namespace tow::nn {

// Binary checkpoint layout, all integers little-endian:
//   magic "TOWMLP\0\0" (8 bytes) | u32 version | u32 output activation |
//   u32 layer count L | L x u32 layer sizes |
//   per dense layer: weights row-major (outputs x inputs) then biases, f64 |
//   u64 FNV-1a checksum of every preceding byte.
inline constexpr std::uint32_t kCheckpointVersion = 1;

void save_params(const Mlp& net, std::ostream& out);
Mlp load_params(std::istream& in);  // throws std::runtime_error on any corruption

std::string save_params_to_string(const Mlp& net);
Mlp load_params_from_string(const std::string& bytes);

void save_params_file(const Mlp& net, const std::filesystem::path& path);
Mlp load_params_file(const std::filesystem::path& path);

}  // namespace tow::nn

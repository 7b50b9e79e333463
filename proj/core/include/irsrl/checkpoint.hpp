#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "irsrl/nn.hpp"

// Checkpoint files.
//
// Layout: the 6-byte magic "IRSRL1", then for every tensor until end of file:
//   u32 name length, name bytes, u32 rank, rank x u32 dims, prod(dims) x f32
// All integers and floats little-endian; tensor data in row-major order.
namespace irsrl::checkpoint {

inline constexpr std::string_view kMagic = "IRSRL1";

struct Tensor {
  std::string name;
  std::vector<std::uint32_t> dims;
  std::vector<float> data;  // row-major

  friend bool operator==(const Tensor&, const Tensor&) = default;
};

std::vector<std::uint8_t> encode(const std::vector<Tensor>& tensors);

/// Throws IoError on a bad magic, a truncated tensor or inconsistent dims.
std::vector<Tensor> decode(const std::vector<std::uint8_t>& bytes);

/// Writes through a temporary file and renames it into place.
void save_checkpoint(const std::filesystem::path& path, const std::vector<Tensor>& tensors);

/// All-or-nothing: either every tensor is returned or IoError is thrown.
std::vector<Tensor> load_checkpoint(const std::filesystem::path& path);

/// "<prefix>.w<l>" and "<prefix>.b<l>" for every layer.
void append_params(std::vector<Tensor>& out, const std::string& prefix,
                   const nn::MlpParams<float>& params);

/// Reads parameters written by append_params into `params`, which must already
/// have the right shapes. Throws IoError if a tensor is missing or misshapen.
void read_params(const std::vector<Tensor>& tensors, const std::string& prefix,
                 nn::MlpParams<float>& params);

Tensor matrix_tensor(const std::string& name, const nn::Matrix<float>& m);
nn::Matrix<float> tensor_matrix(const Tensor& t);

const Tensor* find(const std::vector<Tensor>& tensors, std::string_view name);

}  // namespace irsrl::checkpoint

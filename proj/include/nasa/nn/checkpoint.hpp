#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "nasa/nn/tensor.hpp"

namespace nasa::nn {

// Binary layout, all integers 4-byte little-endian:
//   "NASA" | version | { name_len | name | rank | dims... | float32 values... }*
inline constexpr char kCheckpointMagic[4] = {'N', 'A', 'S', 'A'};
inline constexpr std::uint32_t kCheckpointVersion = 1;

struct NamedTensor {
  std::string name;
  Tensor<float> tensor;
};

class CheckpointError : public std::runtime_error {
 public:
  CheckpointError(const std::string& what, std::size_t offset)
      : std::runtime_error(what + " at byte offset " + std::to_string(offset)), offset_(offset) {}
  std::size_t offset() const { return offset_; }

 private:
  std::size_t offset_;
};

std::vector<std::uint8_t> encode_tensors(const std::vector<NamedTensor>& tensors);
// Parses the whole buffer before returning; throws CheckpointError on any defect.
std::vector<NamedTensor> decode_tensors(const std::vector<std::uint8_t>& bytes);

// Writes via a temporary file and rename so a crash never leaves a torn file.
void write_tensors(const std::filesystem::path& path, const std::vector<NamedTensor>& tensors);
std::vector<NamedTensor> read_tensors(const std::filesystem::path& path);

// Byte strings stored as one float per byte (exact for 0..255).
Tensor<float> bytes_to_tensor(const std::string& bytes);
std::string tensor_to_bytes(const Tensor<float>& t);

}  // namespace nasa::nn

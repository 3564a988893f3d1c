#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "dahar/model.hpp"

namespace dahar {

// Model file layout (little-endian):
//
//   magic "DAMB", u32 version
//   config block:
//     u32 input_height, input_width, input_channels
//     u32 stage_kernels[4], kernel_size, attention_hidden
//     u8  attention_bias
//     u32 gru_input_size, gru_hidden_size, gru_layers
//     u8  bidirectional, gru_bias
//     u32 sequence_length, num_classes
//   label block: u32 count, then per label u32 length + UTF-8 bytes
//   u32 tensor count, then per tensor (declaration order):
//     u32 rank, u32 dims[rank], f32 values[product(dims)]

inline constexpr std::array<char, 4> kModelMagic{'D', 'A', 'M', 'B'};
inline constexpr std::size_t kModelConfigBlockSize = 9 * 4 + 1 + 3 * 4 + 2 + 2 * 4;

std::vector<std::uint8_t> encode_model(const ModelBundle& bundle);

/// Throws BadMagicError, UnsupportedVersionError, or CorruptError (including
/// its TruncatedError subtype) for malformed input.
ModelBundle decode_model(std::span<const std::uint8_t> bytes);

void save_model(const ModelBundle& bundle, const std::filesystem::path& path);
ModelBundle load_model(const std::filesystem::path& path);

/// Closed-form file size: fixed header + label block + tensor count +
/// per-tensor shape prefixes + 4 bytes per parameter.
std::size_t model_file_size(const ModelBundle& bundle);

}  // namespace dahar

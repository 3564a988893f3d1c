#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "dahar/tensor.hpp"

namespace dahar {

std::vector<std::uint8_t> read_file(const std::filesystem::path& path);

/// Writes to a sibling temporary file and renames it over `path`, so readers
/// never observe a partially written file.
void write_file_atomic(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);

/// Little-endian byte sink.
class ByteWriter {
 public:
  void u8(std::uint8_t v) { bytes_.push_back(v); }
  void u16(std::uint16_t v);
  void u32(std::uint32_t v);
  void f32(float v);
  void raw(std::span<const std::uint8_t> data);
  void str(const std::string& s);  // u32 length + bytes

  std::vector<std::uint8_t>& bytes() { return bytes_; }

 private:
  std::vector<std::uint8_t> bytes_;
};

/// Little-endian byte source; throws TruncatedError when reading past the end.
class ByteReader {
 public:
  explicit ByteReader(std::span<const std::uint8_t> data) : data_(data) {}

  std::uint8_t u8();
  std::uint16_t u16();
  std::uint32_t u32();
  float f32();
  std::span<const std::uint8_t> raw(std::size_t n);
  std::string str();

  std::size_t remaining() const { return data_.size() - pos_; }
  std::size_t position() const { return pos_; }

 private:
  std::span<const std::uint8_t> take(std::size_t n);

  std::span<const std::uint8_t> data_;
  std::size_t pos_ = 0;
};

/// 8-bit RGB image, H x W x 3 interleaved.
struct RgbImage {
  std::size_t height = 0;
  std::size_t width = 0;
  std::vector<std::uint8_t> pixels;
};

/// Binary PPM (P6) with maxval 255.
RgbImage read_ppm(const std::filesystem::path& path);
void write_ppm(const std::filesystem::path& path, const RgbImage& image);

/// Binary PGM (P5) with maxval 255 from values in [0, 1], scaled by 255 and
/// rounded. Accepts an H x W x 1 tensor.
void write_pgm(const std::filesystem::path& path, const Tensor<float>& map);

/// Reads a P5 file back into raw bytes; used by tests and tooling.
std::vector<std::uint8_t> read_pgm(const std::filesystem::path& path, std::size_t& height,
                                   std::size_t& width);

}  // namespace dahar

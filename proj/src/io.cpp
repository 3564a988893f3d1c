#include "dahar/io.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <sstream>
#include <system_error>

#include "dahar/error.hpp"

namespace dahar {

namespace fs = std::filesystem;

std::vector<std::uint8_t> read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file_atomic(const fs::path& path, std::span<const std::uint8_t> bytes) {
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
    out.flush();
    if (!out) {
      out.close();
      std::error_code ec;
      fs::remove(tmp, ec);
      throw std::runtime_error("write failed for " + tmp.string());
    }
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw std::runtime_error("cannot move " + tmp.string() + " to " + path.string());
  }
}

void ByteWriter::u16(std::uint16_t v) {
  u8(static_cast<std::uint8_t>(v & 0xFF));
  u8(static_cast<std::uint8_t>(v >> 8));
}

void ByteWriter::u32(std::uint32_t v) {
  for (int i = 0; i < 4; ++i) u8(static_cast<std::uint8_t>((v >> (8 * i)) & 0xFF));
}

void ByteWriter::f32(float v) { u32(std::bit_cast<std::uint32_t>(v)); }

void ByteWriter::raw(std::span<const std::uint8_t> data) {
  bytes_.insert(bytes_.end(), data.begin(), data.end());
}

void ByteWriter::str(const std::string& s) {
  u32(static_cast<std::uint32_t>(s.size()));
  raw({reinterpret_cast<const std::uint8_t*>(s.data()), s.size()});
}

std::span<const std::uint8_t> ByteReader::take(std::size_t n) {
  if (remaining() < n) {
    throw TruncatedError("unexpected end of data at byte " + std::to_string(pos_) + " (needed " +
                         std::to_string(n) + ", have " + std::to_string(remaining()) + ")");
  }
  auto out = data_.subspan(pos_, n);
  pos_ += n;
  return out;
}

std::uint8_t ByteReader::u8() { return take(1)[0]; }

std::uint16_t ByteReader::u16() {
  auto b = take(2);
  return static_cast<std::uint16_t>(b[0] | (b[1] << 8));
}

std::uint32_t ByteReader::u32() {
  auto b = take(4);
  std::uint32_t v = 0;
  for (int i = 3; i >= 0; --i) v = (v << 8) | b[static_cast<std::size_t>(i)];
  return v;
}

float ByteReader::f32() { return std::bit_cast<float>(u32()); }

std::span<const std::uint8_t> ByteReader::raw(std::size_t n) { return take(n); }

std::string ByteReader::str() {
  const std::uint32_t n = u32();
  auto b = take(n);
  return {b.begin(), b.end()};
}

namespace {

// Netpbm header token, skipping whitespace and '#' comments.
std::string next_token(const std::vector<std::uint8_t>& data, std::size_t& pos) {
  while (pos < data.size()) {
    if (data[pos] == '#') {
      while (pos < data.size() && data[pos] != '\n') ++pos;
    } else if (std::isspace(data[pos])) {
      ++pos;
    } else {
      break;
    }
  }
  std::string tok;
  while (pos < data.size() && !std::isspace(data[pos]) && data[pos] != '#') {
    tok.push_back(static_cast<char>(data[pos++]));
  }
  return tok;
}

std::size_t parse_dim(const std::string& tok, const fs::path& path) {
  if (tok.empty() || !std::all_of(tok.begin(), tok.end(), ::isdigit)) {
    throw FormatError("malformed netpbm header in " + path.string());
  }
  return std::stoul(tok);
}

std::vector<std::uint8_t> read_netpbm(const fs::path& path, const char* magic,
                                      std::size_t channels, std::size_t& height,
                                      std::size_t& width) {
  const std::vector<std::uint8_t> data = read_file(path);
  std::size_t pos = 0;
  if (next_token(data, pos) != magic) {
    throw BadMagicError(path.string() + " is not a " + magic + " image");
  }
  width = parse_dim(next_token(data, pos), path);
  height = parse_dim(next_token(data, pos), path);
  const std::size_t maxval = parse_dim(next_token(data, pos), path);
  if (maxval != 255) {
    throw UnsupportedVersionError(path.string() + ": only maxval 255 is supported");
  }
  ++pos;  // single whitespace byte after maxval
  const std::size_t need = height * width * channels;
  if (pos > data.size() || data.size() - pos < need) {
    throw TruncatedError(path.string() + ": pixel data truncated");
  }
  return {data.begin() + static_cast<std::ptrdiff_t>(pos),
          data.begin() + static_cast<std::ptrdiff_t>(pos + need)};
}

void write_netpbm(const fs::path& path, const char* magic, std::size_t height, std::size_t width,
                  std::span<const std::uint8_t> pixels) {
  std::ostringstream header;
  header << magic << '\n' << width << ' ' << height << "\n255\n";
  const std::string h = header.str();
  std::vector<std::uint8_t> bytes(h.begin(), h.end());
  bytes.insert(bytes.end(), pixels.begin(), pixels.end());
  write_file_atomic(path, bytes);
}

}  // namespace

RgbImage read_ppm(const fs::path& path) {
  RgbImage img;
  img.pixels = read_netpbm(path, "P6", 3, img.height, img.width);
  return img;
}

void write_ppm(const fs::path& path, const RgbImage& image) {
  if (image.pixels.size() != image.height * image.width * 3) {
    throw ShapeError("write_ppm: pixel buffer does not match dimensions");
  }
  write_netpbm(path, "P6", image.height, image.width, image.pixels);
}

void write_pgm(const fs::path& path, const Tensor<float>& map) {
  if (map.rank() != 3 || map.dim(2) != 1) {
    throw ShapeError("write_pgm: expected H x W x 1 map, got " + shape_string(map.shape()));
  }
  std::vector<std::uint8_t> pixels(map.size());
  for (std::size_t i = 0; i < map.size(); ++i) {
    const float v = std::clamp(map[i], 0.0f, 1.0f);
    pixels[i] = static_cast<std::uint8_t>(std::lround(v * 255.0f));
  }
  write_netpbm(path, "P5", map.dim(0), map.dim(1), pixels);
}

std::vector<std::uint8_t> read_pgm(const fs::path& path, std::size_t& height,
                                   std::size_t& width) {
  return read_netpbm(path, "P5", 1, height, width);
}

}  // namespace dahar

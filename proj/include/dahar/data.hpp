#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "dahar/error.hpp"
#include "dahar/tensor.hpp"

namespace dahar {

// ---------------------------------------------------------------------------
// Clip files
//
// Layout (little-endian):
//   0  magic "DACL"
//   4  u32 version (1)
//   8  u16 height, u16 width, u16 channels (3), u16 frame_count
//   16 frame_count x height x width x channels bytes, row-major

inline constexpr std::array<char, 4> kClipMagic{'D', 'A', 'C', 'L'};
inline constexpr std::uint32_t kClipVersion = 1;
inline constexpr std::size_t kClipHeaderSize = 16;

/// Decoded 8-bit frames, frame_count x H x W x C.
struct RawClip {
  std::size_t frame_count = 0;
  std::size_t height = 0;
  std::size_t width = 0;
  std::size_t channels = 3;
  std::vector<std::uint8_t> pixels;

  std::size_t frame_bytes() const { return height * width * channels; }
  std::span<const std::uint8_t> frame(std::size_t i) const {
    return std::span<const std::uint8_t>(pixels).subspan(i * frame_bytes(), frame_bytes());
  }
  bool operator==(const RawClip&) const = default;
};

std::vector<std::uint8_t> encode_clip(const RawClip& clip);

/// Throws BadMagicError, UnsupportedVersionError, TruncatedError, or
/// CorruptError (trailing bytes, zero dims, channels != 3).
RawClip decode_clip(std::span<const std::uint8_t> bytes);

void save_clip(const std::filesystem::path& path, const RawClip& clip);
RawClip load_clip(const std::filesystem::path& path);

/// Packs a directory of P6 frames, taken in file-name order, into a clip.
RawClip import_frames(const std::filesystem::path& frames_dir);

// ---------------------------------------------------------------------------
// Preprocessing

/// Bilinear resize of one 8-bit H x W x C frame with half-pixel centres
/// (source coordinate (x + 0.5) * in / out - 0.5, clamped to the border).
/// Output stays in the 0..255 value range.
Tensor<double> resize_bilinear(std::span<const std::uint8_t> frame, std::size_t height,
                               std::size_t width, std::size_t channels, std::size_t out_height,
                               std::size_t out_width);

/// Resizes every frame to target_h x target_w and divides by 255.
std::vector<Tensor<float>> preprocess(const RawClip& clip, std::size_t target_h,
                                      std::size_t target_w);

/// Consecutive non-overlapping windows [0, length), [stride, stride + length),
/// ...; the trailing remainder is discarded. Throws DataError when fewer than
/// `length` frames are available.
template <typename F>
std::vector<std::vector<F>> make_sequences(const std::vector<F>& frames, std::size_t length = 16,
                                           std::size_t stride = 16) {
  if (length == 0 || stride == 0) throw DataError("window length and stride must be positive");
  if (frames.size() < length) {
    throw DataError("clip has " + std::to_string(frames.size()) +
                    " frames, fewer than the sequence length " + std::to_string(length));
  }
  std::vector<std::vector<F>> windows;
  for (std::size_t start = 0; start + length <= frames.size(); start += stride) {
    windows.emplace_back(frames.begin() + static_cast<std::ptrdiff_t>(start),
                         frames.begin() + static_cast<std::ptrdiff_t>(start + length));
  }
  return windows;
}

// ---------------------------------------------------------------------------
// Manifests

enum class Split { train, val, test };

std::string to_string(Split split);
Split parse_split(const std::string& text);

struct ManifestRow {
  std::string path;
  std::string label;
  Split split = Split::train;
  bool operator==(const ManifestRow&) const = default;
};

/// Comma-separated `path,label,split` with a header row. Relative clip paths
/// resolve against `base_dir` (the manifest's directory).
struct Manifest {
  std::vector<ManifestRow> rows;
  std::filesystem::path base_dir;

  /// Sorted distinct labels; a label's class index is its position here.
  std::vector<std::string> classes() const;
  std::filesystem::path resolve(const ManifestRow& row) const;
};

Manifest read_manifest(const std::filesystem::path& path);
void write_manifest(const std::filesystem::path& path, const Manifest& manifest);

/// Stratified split: per class (sorted label order) a seeded shuffle, then the
/// first ceil(fraction * n) rows go to train and the rest to val. At least one
/// row of each class lands in each split. Rows keep their input order.
std::vector<ManifestRow> split_dataset(std::vector<ManifestRow> rows, double train_fraction,
                                       std::uint64_t seed);

// ---------------------------------------------------------------------------
// Samples

/// One window of normalised frames with its class index.
struct ClipSample {
  std::vector<Tensor<float>> frames;
  std::size_t label = 0;
};

/// All windows of one clip.
struct ClipRecord {
  std::string path;
  std::size_t label = 0;
  std::vector<ClipSample> windows;
};

/// Loads, preprocesses and windows every clip of `split`. `classes` fixes the
/// label -> index mapping; labels outside it raise DataError.
std::vector<ClipRecord> load_split(const Manifest& manifest, Split split,
                                   const std::vector<std::string>& classes, std::size_t height,
                                   std::size_t width, std::size_t sequence_length);

/// Flattens records into their windows.
std::vector<ClipSample> windows_of(const std::vector<ClipRecord>& records);

/// Applies a seeded random permutation to the frame order inside every
/// window. Destroys temporal structure while keeping each window's frames.
void shuffle_frame_order(std::vector<ClipRecord>& records, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Synthetic data

/// Motion patterns; classes differ only in how a sprite moves over time.
enum class Motion {
  left_to_right,
  right_to_left,
  oscillate_horizontal,
  top_to_bottom,
  bottom_to_top,
  oscillate_vertical,
};

inline constexpr std::size_t kMaxSynthClasses = 6;

std::string motion_label(Motion motion);

/// Per-clip appearance shared by every frame.
struct SpriteStyle {
  std::size_t offset = 0;  // cross-axis position of the sprite
  std::array<std::uint8_t, 3> color{220, 200, 60};
  std::uint64_t noise_seed = 0;  // static background texture
};

struct SynthSpec {
  std::size_t num_classes = 3;
  std::size_t clips_per_class = 20;
  std::size_t frames = 16;
  std::size_t size = 32;
  double train_fraction = 0.7;
};

/// A square sprite of side size/4 on a static textured background. Frames of
/// the two linear motions along one axis are exact time reversals of each
/// other for a shared style.
RawClip render_synthetic_clip(Motion motion, const SpriteStyle& style, std::size_t frames,
                              std::size_t size);

/// Writes clips/<label>_<i>.dacl and manifest.csv under `out_dir` and returns
/// the manifest (with splits assigned).
Manifest synth_dataset(const SynthSpec& spec, std::uint64_t seed,
                       const std::filesystem::path& out_dir);

}  // namespace dahar

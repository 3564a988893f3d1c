#include "dahar/data.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <limits>
#include <map>
#include <set>
#include <sstream>

#include "dahar/io.hpp"
#include "dahar/random.hpp"

namespace dahar {

namespace fs = std::filesystem;

// ---------------------------------------------------------------------------
// Clip files

std::vector<std::uint8_t> encode_clip(const RawClip& clip) {
  constexpr std::size_t kMax = std::numeric_limits<std::uint16_t>::max();
  if (clip.height > kMax || clip.width > kMax || clip.channels > kMax ||
      clip.frame_count > kMax) {
    throw ShapeError("clip dimensions exceed the 16-bit header fields");
  }
  if (clip.pixels.size() != clip.frame_count * clip.frame_bytes()) {
    throw ShapeError("clip pixel buffer does not match its dimensions");
  }
  ByteWriter w;
  for (char c : kClipMagic) w.u8(static_cast<std::uint8_t>(c));
  w.u32(kClipVersion);
  w.u16(static_cast<std::uint16_t>(clip.height));
  w.u16(static_cast<std::uint16_t>(clip.width));
  w.u16(static_cast<std::uint16_t>(clip.channels));
  w.u16(static_cast<std::uint16_t>(clip.frame_count));
  w.raw(clip.pixels);
  return std::move(w.bytes());
}

RawClip decode_clip(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < kClipMagic.size() ||
      std::memcmp(bytes.data(), kClipMagic.data(), kClipMagic.size()) != 0) {
    throw BadMagicError("not a clip file (magic mismatch)");
  }
  ByteReader r(bytes);
  r.raw(kClipMagic.size());
  const std::uint32_t version = r.u32();
  if (version != kClipVersion) {
    throw UnsupportedVersionError("unsupported clip version " + std::to_string(version));
  }
  RawClip clip;
  clip.height = r.u16();
  clip.width = r.u16();
  clip.channels = r.u16();
  clip.frame_count = r.u16();
  if (clip.channels != 3) {
    throw CorruptError("clip declares " + std::to_string(clip.channels) + " channels, expected 3");
  }
  const std::size_t payload = clip.frame_count * clip.frame_bytes();
  if (r.remaining() < payload) {
    throw TruncatedError("clip payload truncated: header declares " + std::to_string(payload) +
                         " bytes, file has " + std::to_string(r.remaining()));
  }
  if (r.remaining() > payload) {
    throw CorruptError("clip has " + std::to_string(r.remaining() - payload) +
                       " bytes after the declared payload");
  }
  auto data = r.raw(payload);
  clip.pixels.assign(data.begin(), data.end());
  return clip;
}

void save_clip(const fs::path& path, const RawClip& clip) {
  write_file_atomic(path, encode_clip(clip));
}

RawClip load_clip(const fs::path& path) {
  return decode_clip(read_file(path));
}

RawClip import_frames(const fs::path& frames_dir) {
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(frames_dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".ppm") {
      files.push_back(entry.path());
    }
  }
  if (files.empty()) throw DataError("no .ppm frames in " + frames_dir.string());
  std::sort(files.begin(), files.end());
  RawClip clip;
  for (const fs::path& file : files) {
    RgbImage img = read_ppm(file);
    if (clip.frame_count == 0) {
      clip.height = img.height;
      clip.width = img.width;
    } else if (img.height != clip.height || img.width != clip.width) {
      throw DataError(file.string() + " has size " + std::to_string(img.width) + "x" +
                      std::to_string(img.height) + ", expected " + std::to_string(clip.width) +
                      "x" + std::to_string(clip.height));
    }
    clip.pixels.insert(clip.pixels.end(), img.pixels.begin(), img.pixels.end());
    ++clip.frame_count;
  }
  return clip;
}

// ---------------------------------------------------------------------------
// Preprocessing

Tensor<double> resize_bilinear(std::span<const std::uint8_t> frame, std::size_t height,
                               std::size_t width, std::size_t channels, std::size_t out_height,
                               std::size_t out_width) {
  if (frame.size() != height * width * channels) {
    throw ShapeError("resize_bilinear: frame buffer does not match dimensions");
  }
  Tensor<double> out({out_height, out_width, channels});
  const double sy = static_cast<double>(height) / static_cast<double>(out_height);
  const double sx = static_cast<double>(width) / static_cast<double>(out_width);
  auto source = [](double pos, std::size_t extent, std::size_t& i0, std::size_t& i1,
                   double& frac) {
    pos = std::clamp(pos, 0.0, static_cast<double>(extent - 1));
    i0 = static_cast<std::size_t>(std::floor(pos));
    i1 = std::min(i0 + 1, extent - 1);
    frac = pos - static_cast<double>(i0);
  };
  for (std::size_t y = 0; y < out_height; ++y) {
    std::size_t y0, y1;
    double fy;
    source((static_cast<double>(y) + 0.5) * sy - 0.5, height, y0, y1, fy);
    for (std::size_t x = 0; x < out_width; ++x) {
      std::size_t x0, x1;
      double fx;
      source((static_cast<double>(x) + 0.5) * sx - 0.5, width, x0, x1, fx);
      for (std::size_t c = 0; c < channels; ++c) {
        auto px = [&](std::size_t yy, std::size_t xx) {
          return static_cast<double>(frame[(yy * width + xx) * channels + c]);
        };
        const double top = px(y0, x0) + fx * (px(y0, x1) - px(y0, x0));
        const double bottom = px(y1, x0) + fx * (px(y1, x1) - px(y1, x0));
        out.at(y, x, c) = top + fy * (bottom - top);
      }
    }
  }
  return out;
}

std::vector<Tensor<float>> preprocess(const RawClip& clip, std::size_t target_h,
                                      std::size_t target_w) {
  if (target_h == 0 || target_w == 0 || target_h % 16 != 0 || target_w % 16 != 0) {
    throw ShapeError("preprocess: target " + std::to_string(target_h) + "x" +
                     std::to_string(target_w) + " must be positive multiples of 16");
  }
  std::vector<Tensor<float>> frames;
  frames.reserve(clip.frame_count);
  for (std::size_t f = 0; f < clip.frame_count; ++f) {
    const Tensor<double> resized = resize_bilinear(clip.frame(f), clip.height, clip.width,
                                                   clip.channels, target_h, target_w);
    Tensor<float> frame(resized.shape());
    for (std::size_t i = 0; i < frame.size(); ++i) {
      frame[i] = static_cast<float>(resized[i] / 255.0);
    }
    frames.push_back(std::move(frame));
  }
  return frames;
}

// ---------------------------------------------------------------------------
// Manifests

std::string to_string(Split split) {
  switch (split) {
    case Split::train: return "train";
    case Split::val: return "val";
    case Split::test: return "test";
  }
  return "train";
}

Split parse_split(const std::string& text) {
  if (text == "train") return Split::train;
  if (text == "val") return Split::val;
  if (text == "test") return Split::test;
  throw DataError("unknown split '" + text + "'");
}

std::vector<std::string> Manifest::classes() const {
  std::set<std::string> labels;
  for (const auto& row : rows) labels.insert(row.label);
  return {labels.begin(), labels.end()};
}

fs::path Manifest::resolve(const ManifestRow& row) const {
  fs::path p(row.path);
  return p.is_absolute() ? p : base_dir / p;
}

Manifest read_manifest(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open manifest " + path.string());
  Manifest m;
  m.base_dir = path.parent_path();
  std::string line;
  std::size_t line_no = 0;
  bool header = true;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) fields.push_back(field);
    if (header) {
      if (fields != std::vector<std::string>{"path", "label", "split"}) {
        throw DataError(path.string() + ": expected header 'path,label,split'");
      }
      header = false;
      continue;
    }
    if (fields.size() != 3) {
      throw DataError(path.string() + ":" + std::to_string(line_no) + ": expected 3 fields");
    }
    m.rows.push_back({fields[0], fields[1], parse_split(fields[2])});
  }
  if (header) throw DataError(path.string() + ": empty manifest");
  return m;
}

void write_manifest(const fs::path& path, const Manifest& manifest) {
  std::string text = "path,label,split\n";
  for (const auto& row : manifest.rows) {
    if (row.path.find_first_of(",\n") != std::string::npos ||
        row.label.find_first_of(",\n") != std::string::npos) {
      throw DataError("manifest fields may not contain commas or newlines: " + row.path);
    }
    text += row.path + ',' + row.label + ',' + to_string(row.split) + '\n';
  }
  write_file_atomic(path, {reinterpret_cast<const std::uint8_t*>(text.data()), text.size()});
}

std::vector<ManifestRow> split_dataset(std::vector<ManifestRow> rows, double train_fraction,
                                       std::uint64_t seed) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
    throw DataError("train fraction must lie in (0, 1)");
  }
  std::map<std::string, std::vector<std::size_t>> by_class;
  for (std::size_t i = 0; i < rows.size(); ++i) by_class[rows[i].label].push_back(i);
  Rng rng(seed);
  for (auto& [label, idx] : by_class) {
    const std::size_t n = idx.size();
    if (n < 2) {
      throw DataError("class '" + label + "' has " + std::to_string(n) +
                      " clip(s); stratified splitting needs at least 2");
    }
    rng.shuffle(idx.begin(), idx.end());
    // The small epsilon keeps exact products such as 0.7 * 10 from rounding up.
    auto n_train = static_cast<std::size_t>(std::ceil(train_fraction * static_cast<double>(n) - 1e-9));
    n_train = std::clamp<std::size_t>(n_train, 1, n - 1);
    for (std::size_t k = 0; k < n; ++k) {
      rows[idx[k]].split = k < n_train ? Split::train : Split::val;
    }
  }
  return rows;
}

// ---------------------------------------------------------------------------
// Samples

std::vector<ClipRecord> load_split(const Manifest& manifest, Split split,
                                   const std::vector<std::string>& classes, std::size_t height,
                                   std::size_t width, std::size_t sequence_length) {
  std::vector<ClipRecord> records;
  for (const auto& row : manifest.rows) {
    if (row.split != split) continue;
    auto it = std::find(classes.begin(), classes.end(), row.label);
    if (it == classes.end()) {
      throw DataError("label '" + row.label + "' of " + row.path + " is not a model class");
    }
    const std::size_t label = static_cast<std::size_t>(it - classes.begin());
    const RawClip clip = load_clip(manifest.resolve(row));
    ClipRecord record{row.path, label, {}};
    for (auto& window : make_sequences(preprocess(clip, height, width), sequence_length,
                                       sequence_length)) {
      record.windows.push_back({std::move(window), label});
    }
    records.push_back(std::move(record));
  }
  return records;
}

std::vector<ClipSample> windows_of(const std::vector<ClipRecord>& records) {
  std::vector<ClipSample> out;
  for (const auto& r : records) out.insert(out.end(), r.windows.begin(), r.windows.end());
  return out;
}

void shuffle_frame_order(std::vector<ClipRecord>& records, std::uint64_t seed) {
  Rng rng(seed);
  for (auto& record : records) {
    for (auto& window : record.windows) rng.shuffle(window.frames.begin(), window.frames.end());
  }
}

// ---------------------------------------------------------------------------
// Synthetic data

std::string motion_label(Motion motion) {
  switch (motion) {
    case Motion::left_to_right: return "left_to_right";
    case Motion::right_to_left: return "right_to_left";
    case Motion::oscillate_horizontal: return "oscillate_horizontal";
    case Motion::top_to_bottom: return "top_to_bottom";
    case Motion::bottom_to_top: return "bottom_to_top";
    case Motion::oscillate_vertical: return "oscillate_vertical";
  }
  return "unknown";
}

RawClip render_synthetic_clip(Motion motion, const SpriteStyle& style, std::size_t frames,
                              std::size_t size) {
  const std::size_t side = size / 4;
  if (side == 0 || frames < 2) throw DataError("synthetic clips need size >= 4 and >= 2 frames");
  if (style.offset + side > size) throw DataError("sprite offset outside the frame");
  const std::size_t travel = size - side;

  // Positions along the motion axis, evenly spaced over the full travel.
  auto grid = [&](std::size_t k) {
    return static_cast<std::size_t>(
        std::lround(static_cast<double>(k * travel) / static_cast<double>(frames - 1)));
  };
  auto position = [&](std::size_t t) -> std::size_t {
    switch (motion) {
      case Motion::left_to_right:
      case Motion::top_to_bottom:
        return grid(t);
      case Motion::right_to_left:
      case Motion::bottom_to_top:
        return grid(frames - 1 - t);
      case Motion::oscillate_horizontal:
      case Motion::oscillate_vertical: {
        // Out and back, visiting every other grid position.
        const std::size_t k = 2 * t < frames ? 2 * t : 2 * (frames - 1 - t);
        return grid(std::min(k, frames - 1));
      }
    }
    return 0;
  };
  const bool horizontal = motion == Motion::left_to_right || motion == Motion::right_to_left ||
                          motion == Motion::oscillate_horizontal;

  RawClip clip;
  clip.frame_count = frames;
  clip.height = size;
  clip.width = size;
  clip.channels = 3;

  std::vector<std::uint8_t> background(size * size * 3);
  Rng noise(style.noise_seed);
  for (auto& v : background) v = static_cast<std::uint8_t>(noise.below(41));

  clip.pixels.reserve(frames * background.size());
  for (std::size_t t = 0; t < frames; ++t) {
    std::vector<std::uint8_t> frame = background;
    const std::size_t along = position(t);
    const std::size_t y0 = horizontal ? style.offset : along;
    const std::size_t x0 = horizontal ? along : style.offset;
    for (std::size_t y = y0; y < y0 + side; ++y) {
      for (std::size_t x = x0; x < x0 + side; ++x) {
        for (std::size_t c = 0; c < 3; ++c) frame[(y * size + x) * 3 + c] = style.color[c];
      }
    }
    clip.pixels.insert(clip.pixels.end(), frame.begin(), frame.end());
  }
  return clip;
}

Manifest synth_dataset(const SynthSpec& spec, std::uint64_t seed, const fs::path& out_dir) {
  if (spec.num_classes < 2 || spec.num_classes > kMaxSynthClasses) {
    throw DataError("synthetic data supports 2.." + std::to_string(kMaxSynthClasses) +
                    " classes");
  }
  if (spec.clips_per_class < 2) throw DataError("need at least 2 clips per class");
  const std::size_t side = spec.size / 4;
  if (side == 0) throw DataError("synthetic frame size must be at least 4");

  fs::create_directories(out_dir / "clips");
  Rng rng(seed);
  Manifest manifest;
  manifest.base_dir = out_dir;
  for (std::size_t c = 0; c < spec.num_classes; ++c) {
    const auto motion = static_cast<Motion>(c);
    const std::string label = motion_label(motion);
    for (std::size_t i = 0; i < spec.clips_per_class; ++i) {
      SpriteStyle style;
      style.offset = rng.below(spec.size - side + 1);
      for (auto& ch : style.color) ch = static_cast<std::uint8_t>(120 + rng.below(136));
      style.noise_seed = rng.next();
      const RawClip clip = render_synthetic_clip(motion, style, spec.frames, spec.size);
      char name[64];
      std::snprintf(name, sizeof(name), "%s_%03zu.dacl", label.c_str(), i);
      const std::string rel = std::string("clips/") + name;
      save_clip(out_dir / rel, clip);
      manifest.rows.push_back({rel, label, Split::train});
    }
  }
  manifest.rows = split_dataset(std::move(manifest.rows), spec.train_fraction, rng.next());
  write_manifest(out_dir / "manifest.csv", manifest);
  return manifest;
}

}  // namespace dahar

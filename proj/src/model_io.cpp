#include "dahar/model_io.hpp"

#include <cstring>

#include "dahar/io.hpp"

namespace dahar {

namespace {

void write_config(ByteWriter& w, const ModelConfig& c) {
  const auto& b = c.backbone;
  const auto& r = c.recurrent;
  w.u32(static_cast<std::uint32_t>(b.input_height));
  w.u32(static_cast<std::uint32_t>(b.input_width));
  w.u32(static_cast<std::uint32_t>(b.input_channels));
  for (std::size_t k : b.stage_kernels) w.u32(static_cast<std::uint32_t>(k));
  w.u32(static_cast<std::uint32_t>(b.kernel_size));
  w.u32(static_cast<std::uint32_t>(b.attention_hidden));
  w.u8(b.attention_bias ? 1 : 0);
  w.u32(static_cast<std::uint32_t>(r.input_size));
  w.u32(static_cast<std::uint32_t>(r.hidden_size));
  w.u32(static_cast<std::uint32_t>(r.layers));
  w.u8(r.bidirectional ? 1 : 0);
  w.u8(r.bias ? 1 : 0);
  w.u32(static_cast<std::uint32_t>(r.sequence_length));
  w.u32(static_cast<std::uint32_t>(r.num_classes));
}

bool read_flag(ByteReader& r) {
  const std::uint8_t v = r.u8();
  if (v > 1) throw CorruptError("model config flag byte is " + std::to_string(v));
  return v == 1;
}

ModelConfig read_config(ByteReader& r) {
  ModelConfig c;
  auto& b = c.backbone;
  auto& rc = c.recurrent;
  b.input_height = r.u32();
  b.input_width = r.u32();
  b.input_channels = r.u32();
  for (std::size_t& k : b.stage_kernels) k = r.u32();
  b.kernel_size = r.u32();
  b.attention_hidden = r.u32();
  b.attention_bias = read_flag(r);
  rc.input_size = r.u32();
  rc.hidden_size = r.u32();
  rc.layers = r.u32();
  rc.bidirectional = read_flag(r);
  rc.bias = read_flag(r);
  rc.sequence_length = r.u32();
  rc.num_classes = r.u32();
  return c;
}

}  // namespace

std::vector<std::uint8_t> encode_model(const ModelBundle& bundle) {
  bundle.config.validate();
  if (bundle.labels.size() != bundle.config.recurrent.num_classes) {
    throw ShapeError("model has " + std::to_string(bundle.labels.size()) + " labels but " +
                     std::to_string(bundle.config.recurrent.num_classes) + " classes");
  }
  ByteWriter w;
  for (char c : kModelMagic) w.u8(static_cast<std::uint8_t>(c));
  w.u32(bundle.format_version);
  write_config(w, bundle.config);
  w.u32(static_cast<std::uint32_t>(bundle.labels.size()));
  for (const auto& label : bundle.labels) w.str(label);
  w.u32(static_cast<std::uint32_t>(tensor_count(bundle.params)));
  bundle.params.for_each([&](const Tensor<float>& t) {
    w.u32(static_cast<std::uint32_t>(t.rank()));
    for (std::size_t d : t.shape()) w.u32(static_cast<std::uint32_t>(d));
    for (float v : t.data()) w.f32(v);
  });
  return std::move(w.bytes());
}

ModelBundle decode_model(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < kModelMagic.size() ||
      std::memcmp(bytes.data(), kModelMagic.data(), kModelMagic.size()) != 0) {
    throw BadMagicError("not a model file (magic mismatch)");
  }
  ByteReader r(bytes);
  r.raw(kModelMagic.size());
  ModelBundle bundle;
  bundle.format_version = r.u32();
  if (bundle.format_version != ModelBundle::kFormatVersion) {
    throw UnsupportedVersionError("unsupported model version " +
                                  std::to_string(bundle.format_version));
  }
  bundle.config = read_config(r);
  try {
    bundle.config.validate();
  } catch (const ShapeError& e) {
    throw CorruptError(std::string("invalid model config: ") + e.what());
  }
  const std::uint32_t n_labels = r.u32();
  if (n_labels != bundle.config.recurrent.num_classes) {
    throw CorruptError("label count " + std::to_string(n_labels) + " differs from class count");
  }
  for (std::uint32_t i = 0; i < n_labels; ++i) bundle.labels.push_back(r.str());

  bundle.params = zero_model<float>(bundle.config);
  const std::uint32_t n_tensors = r.u32();
  if (n_tensors != tensor_count(bundle.params)) {
    throw CorruptError("model file has " + std::to_string(n_tensors) + " tensors, config implies " +
                       std::to_string(tensor_count(bundle.params)));
  }
  std::size_t index = 0;
  bundle.params.for_each([&](Tensor<float>& t) {
    const std::uint32_t rank = r.u32();
    Shape shape(rank);
    for (auto& d : shape) d = r.u32();
    if (shape != t.shape()) {
      throw CorruptError("tensor " + std::to_string(index) + " has shape " +
                         shape_string(shape) + ", expected " + shape_string(t.shape()));
    }
    for (float& v : t.data()) v = r.f32();
    ++index;
  });
  if (r.remaining() != 0) {
    throw CorruptError(std::to_string(r.remaining()) + " unexpected bytes after the last tensor");
  }
  return bundle;
}

void save_model(const ModelBundle& bundle, const std::filesystem::path& path) {
  write_file_atomic(path, encode_model(bundle));
}

ModelBundle load_model(const std::filesystem::path& path) {
  return decode_model(read_file(path));
}

std::size_t model_file_size(const ModelBundle& bundle) {
  std::size_t size = kModelMagic.size() + 4 + kModelConfigBlockSize;
  size += 4;
  for (const auto& label : bundle.labels) size += 4 + label.size();
  size += 4;
  bundle.params.for_each([&](const Tensor<float>& t) { size += 4 + 4 * t.rank(); });
  size += 4 * parameter_count(bundle.params);
  return size;
}

}  // namespace dahar

#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <type_traits>

#include "dahar/attention.hpp"

namespace dahar {

inline constexpr std::size_t kStages = 4;
inline constexpr std::size_t kConvLayers = 2 * kStages;

struct BackboneConfig {
  std::size_t input_height = 64;
  std::size_t input_width = 64;
  std::size_t input_channels = 3;
  std::array<std::size_t, kStages> stage_kernels{16, 32, 32, 64};
  std::size_t kernel_size = 3;
  std::size_t attention_hidden = 128;
  bool attention_bias = false;

  /// Throws ShapeError unless the four-stage chain is well formed.
  void validate() const;

  std::size_t feature_size() const { return stage_kernels.back(); }

  /// Input and output channel counts of conv layer `layer` (0..7).
  std::size_t conv_in(std::size_t layer) const;
  std::size_t conv_out(std::size_t layer) const { return stage_kernels[layer / 2]; }

  bool operator==(const BackboneConfig&) const = default;
};

/// Eight 3x3 conv kernel stacks and four attention blocks, in stage order.
template <typename S>
struct Backbone {
  std::array<S, kConvLayers> conv;
  std::array<AttentionBlock<S>, kStages> attention;

  template <typename F>
  void for_each(F&& f) {
    for (std::size_t s = 0; s < kStages; ++s) {
      f(conv[2 * s]);
      f(conv[2 * s + 1]);
      attention[s].for_each(f);
    }
  }
  template <typename F>
  void for_each(F&& f) const {
    for (std::size_t s = 0; s < kStages; ++s) {
      f(conv[2 * s]);
      f(conv[2 * s + 1]);
      attention[s].for_each(f);
    }
  }

  template <typename F>
  auto map(F&& f) const {
    using R = std::decay_t<std::invoke_result_t<F&, const S&>>;
    Backbone<R> out;
    for (std::size_t s = 0; s < kStages; ++s) {
      out.conv[2 * s] = f(conv[2 * s]);
      out.conv[2 * s + 1] = f(conv[2 * s + 1]);
      out.attention[s] = attention[s].map(f);
    }
    return out;
  }
};

template <typename T>
using BackboneParams = Backbone<Tensor<T>>;

/// Allocates all tensors; weights are fan-scaled uniform, deterministic in
/// `seed`.
template <typename T>
BackboneParams<T> build_backbone(const BackboneConfig& config, std::uint64_t seed);

/// Same, drawing from a caller-owned generator.
template <typename T>
BackboneParams<T> build_backbone(const BackboneConfig& config, Rng& rng);

/// All tensors zero.
template <typename T>
BackboneParams<T> zero_backbone(const BackboneConfig& config);

template <typename T>
Backbone<Var<T>> bind(Graph<T>& g, const BackboneParams<T>& params) {
  return params.map([&](const Tensor<T>& t) { return g.parameter(t); });
}

template <typename T>
struct BackboneTrace {
  std::array<AttentionTrace<T>, kStages> blocks;
  std::array<Var<T>, kStages> stage_outputs;
};

/// Per stage: conv-relu, conv-relu, 2x2 max pool, dual attention. Then global
/// average pool and flatten to a vector of `feature_size()` values.
template <typename T>
Var<T> backbone_forward(Var<T> frame, const Backbone<Var<T>>& params,
                        const BackboneConfig& config, BackboneTrace<T>* trace = nullptr);

/// Inference-only convenience wrapper.
template <typename T>
Tensor<T> backbone_features(const Tensor<T>& frame, const BackboneParams<T>& params,
                            const BackboneConfig& config);

/// Spatial gate a_s of each attention block; block s has spatial extent
/// input / 2^(s+1).
template <typename T>
std::array<Tensor<T>, kStages> saliency_maps(const Tensor<T>& frame,
                                             const BackboneParams<T>& params,
                                             const BackboneConfig& config);

}  // namespace dahar

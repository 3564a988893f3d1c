#include "dahar/backbone.hpp"

#include <string>

#include "dahar/init.hpp"

namespace dahar {

void BackboneConfig::validate() const {
  if (input_height == 0 || input_width == 0 || input_height % 16 != 0 ||
      input_width % 16 != 0) {
    throw ShapeError("backbone input " + std::to_string(input_height) + "x" +
                     std::to_string(input_width) + " must be positive multiples of 16");
  }
  if (input_channels == 0) throw ShapeError("backbone needs at least one input channel");
  if (kernel_size != 3) {
    throw ShapeError("backbone kernel size must be 3, got " + std::to_string(kernel_size));
  }
  for (std::size_t k : stage_kernels) {
    if (k == 0) throw ShapeError("stage kernel counts must be positive");
  }
  if (attention_hidden == 0) throw ShapeError("attention hidden width must be positive");
}

std::size_t BackboneConfig::conv_in(std::size_t layer) const {
  if (layer == 0) return input_channels;
  return conv_out(layer - 1);
}

template <typename T>
BackboneParams<T> zero_backbone(const BackboneConfig& config) {
  config.validate();
  BackboneParams<T> p;
  for (std::size_t l = 0; l < kConvLayers; ++l) {
    p.conv[l] = Tensor<T>({3, 3, config.conv_in(l), config.conv_out(l)});
  }
  for (std::size_t s = 0; s < kStages; ++s) {
    p.attention[s] = make_attention_block<T>(config.stage_kernels[s], config.attention_hidden,
                                             config.attention_bias);
  }
  return p;
}

template <typename T>
BackboneParams<T> build_backbone(const BackboneConfig& config, Rng& rng) {
  BackboneParams<T> p = zero_backbone<T>(config);
  for (std::size_t s = 0; s < kStages; ++s) {
    for (std::size_t l = 2 * s; l < 2 * s + 2; ++l) {
      fan_scaled_uniform(p.conv[l], 9 * config.conv_in(l), 9 * config.conv_out(l), rng);
    }
    init_attention_block(p.attention[s], rng);
  }
  return p;
}

template <typename T>
BackboneParams<T> build_backbone(const BackboneConfig& config, std::uint64_t seed) {
  Rng rng(seed);
  return build_backbone<T>(config, rng);
}

template <typename T>
Var<T> backbone_forward(Var<T> frame, const Backbone<Var<T>>& params,
                        const BackboneConfig& config, BackboneTrace<T>* trace) {
  const Shape expected{config.input_height, config.input_width, config.input_channels};
  if (frame.shape() != expected) {
    throw ShapeError("backbone_forward: frame " + shape_string(frame.shape()) +
                     " does not match configured input " + shape_string(expected));
  }
  Var<T> x = frame;
  for (std::size_t s = 0; s < kStages; ++s) {
    x = relu(conv2d(x, params.conv[2 * s]));
    x = relu(conv2d(x, params.conv[2 * s + 1]));
    x = maxpool2d(x);
    AttentionTrace<T> block = dual_attention(x, params.attention[s]);
    x = block.f_rm;
    if (trace) {
      trace->blocks[s] = block;
      trace->stage_outputs[s] = x;
    }
  }
  Var<T> pooled = global_pool(x, PoolMode::avg);
  return reshape(pooled, {config.feature_size()});
}

template <typename T>
Tensor<T> backbone_features(const Tensor<T>& frame, const BackboneParams<T>& params,
                            const BackboneConfig& config) {
  Graph<T> g(false);
  const Backbone<Var<T>> bound = bind(g, params);
  return backbone_forward(g.constant(frame), bound, config).value();
}

template <typename T>
std::array<Tensor<T>, kStages> saliency_maps(const Tensor<T>& frame,
                                             const BackboneParams<T>& params,
                                             const BackboneConfig& config) {
  Graph<T> g(false);
  const Backbone<Var<T>> bound = bind(g, params);
  BackboneTrace<T> trace;
  backbone_forward(g.constant(frame), bound, config, &trace);
  std::array<Tensor<T>, kStages> maps;
  for (std::size_t s = 0; s < kStages; ++s) maps[s] = trace.blocks[s].a_s.value();
  return maps;
}

#define DAHAR_INSTANTIATE(T)                                                               \
  template BackboneParams<T> zero_backbone<T>(const BackboneConfig&);                      \
  template BackboneParams<T> build_backbone<T>(const BackboneConfig&, Rng&);               \
  template BackboneParams<T> build_backbone<T>(const BackboneConfig&, std::uint64_t);      \
  template Var<T> backbone_forward(Var<T>, const Backbone<Var<T>>&, const BackboneConfig&, \
                                   BackboneTrace<T>*);                                     \
  template Tensor<T> backbone_features(const Tensor<T>&, const BackboneParams<T>&,         \
                                       const BackboneConfig&);                             \
  template std::array<Tensor<T>, kStages> saliency_maps(                                   \
      const Tensor<T>&, const BackboneParams<T>&, const BackboneConfig&);

DAHAR_INSTANTIATE(float)
DAHAR_INSTANTIATE(double)

#undef DAHAR_INSTANTIATE

}  // namespace dahar

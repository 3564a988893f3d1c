#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <type_traits>
#include <vector>

#include "dahar/backbone.hpp"
#include "dahar/recurrent.hpp"

namespace dahar {

struct ModelConfig {
  BackboneConfig backbone;
  RecurrentConfig recurrent;

  /// Checks each half and that the backbone feature width feeds the stack.
  void validate() const;

  bool operator==(const ModelConfig&) const = default;
};

/// Every learnable tensor of the network. for_each visits them in the fixed
/// declaration order used by the model file and the optimizer.
template <typename S>
struct Model {
  Backbone<S> backbone;
  BiGruStack<S> recurrent;

  template <typename F>
  void for_each(F&& f) {
    backbone.for_each(f);
    recurrent.for_each(f);
  }
  template <typename F>
  void for_each(F&& f) const {
    backbone.for_each(f);
    recurrent.for_each(f);
  }

  template <typename F>
  auto map(F&& f) const {
    using R = std::decay_t<std::invoke_result_t<F&, const S&>>;
    return Model<R>{backbone.map(f), recurrent.map(f)};
  }
};

template <typename T>
using ModelParams = Model<Tensor<T>>;

template <typename T>
Model<Var<T>> bind(Graph<T>& g, const ModelParams<T>& params) {
  return params.map([&](const Tensor<T>& t) { return g.parameter(t); });
}

template <typename T>
ModelParams<T> build_model(const ModelConfig& config, std::uint64_t seed) {
  config.validate();
  Rng rng(seed);
  ModelParams<T> params;
  params.backbone = build_backbone<T>(config.backbone, rng);
  params.recurrent = build_stack<T>(config.recurrent, rng);
  return params;
}

template <typename T>
ModelParams<T> zero_model(const ModelConfig& config) {
  config.validate();
  return ModelParams<T>{zero_backbone<T>(config.backbone), zero_stack<T>(config.recurrent)};
}

template <typename U, typename T>
ModelParams<U> cast_model(const ModelParams<T>& params) {
  return params.map([](const Tensor<T>& t) { return t.template cast<U>(); });
}

template <typename S>
std::size_t parameter_count(const Model<S>& params) {
  std::size_t n = 0;
  params.for_each([&](const auto& t) { n += t.size(); });
  return n;
}

template <typename S>
std::size_t tensor_count(const Model<S>& params) {
  std::size_t n = 0;
  params.for_each([&](const auto&) { ++n; });
  return n;
}

/// Class probabilities for one window of `sequence_length` frames. Frames go
/// through the backbone one by one, then through the recurrent stack.
template <typename T>
Var<T> model_forward(Graph<T>& g, const Model<Var<T>>& bound, const ModelConfig& config,
                     const std::vector<Tensor<T>>& frames);

/// Inference on one window.
template <typename T>
std::vector<T> predict_window(const ModelParams<T>& params, const ModelConfig& config,
                              const std::vector<Tensor<T>>& frames);

/// Mean class probabilities over several windows of one clip.
template <typename T>
std::vector<T> predict_windows(const ModelParams<T>& params, const ModelConfig& config,
                               const std::vector<std::vector<Tensor<T>>>& windows);

/// Everything needed to run or resume a trained network.
struct ModelBundle {
  static constexpr std::uint32_t kFormatVersion = 1;

  ModelConfig config;
  ModelParams<float> params;
  std::vector<std::string> labels;
  std::uint32_t format_version = kFormatVersion;
};

/// Random weights for `labels.size()` classes.
ModelBundle make_bundle(ModelConfig config, std::vector<std::string> labels,
                        std::uint64_t seed);

}  // namespace dahar

#include "dahar/model.hpp"

#include <string>

namespace dahar {

void ModelConfig::validate() const {
  backbone.validate();
  recurrent.validate();
  if (recurrent.input_size != backbone.feature_size()) {
    throw ShapeError("recurrent input size " + std::to_string(recurrent.input_size) +
                     " does not match backbone feature size " +
                     std::to_string(backbone.feature_size()));
  }
}

template <typename T>
Var<T> model_forward(Graph<T>& g, const Model<Var<T>>& bound, const ModelConfig& config,
                     const std::vector<Tensor<T>>& frames) {
  std::vector<Var<T>> features;
  features.reserve(frames.size());
  for (const Tensor<T>& frame : frames) {
    features.push_back(backbone_forward(g.constant(frame), bound.backbone, config.backbone));
  }
  Var<T> representation = stack_forward(features, bound.recurrent, config.recurrent);
  return classify(representation, bound.recurrent.classifier);
}

template <typename T>
std::vector<T> predict_window(const ModelParams<T>& params, const ModelConfig& config,
                              const std::vector<Tensor<T>>& frames) {
  Graph<T> g(false);
  const Model<Var<T>> bound = bind(g, params);
  const Tensor<T>& probs = model_forward(g, bound, config, frames).value();
  return {probs.data().begin(), probs.data().end()};
}

template <typename T>
std::vector<T> predict_windows(const ModelParams<T>& params, const ModelConfig& config,
                               const std::vector<std::vector<Tensor<T>>>& windows) {
  if (windows.empty()) throw DataError("predict_windows: no windows");
  std::vector<T> mean(config.recurrent.num_classes, T{0});
  for (const auto& window : windows) {
    const std::vector<T> p = predict_window(params, config, window);
    for (std::size_t k = 0; k < mean.size(); ++k) mean[k] += p[k];
  }
  for (T& v : mean) v /= static_cast<T>(windows.size());
  return mean;
}

ModelBundle make_bundle(ModelConfig config, std::vector<std::string> labels,
                        std::uint64_t seed) {
  config.recurrent.num_classes = labels.size();
  config.recurrent.input_size = config.backbone.feature_size();
  ModelBundle bundle;
  bundle.params = build_model<float>(config, seed);
  bundle.config = std::move(config);
  bundle.labels = std::move(labels);
  return bundle;
}

#define DAHAR_INSTANTIATE(T)                                                              \
  template Var<T> model_forward(Graph<T>&, const Model<Var<T>>&, const ModelConfig&,      \
                                const std::vector<Tensor<T>>&);                           \
  template std::vector<T> predict_window(const ModelParams<T>&, const ModelConfig&,       \
                                         const std::vector<Tensor<T>>&);                  \
  template std::vector<T> predict_windows(const ModelParams<T>&, const ModelConfig&,      \
                                          const std::vector<std::vector<Tensor<T>>>&);

DAHAR_INSTANTIATE(float)
DAHAR_INSTANTIATE(double)

#undef DAHAR_INSTANTIATE

}  // namespace dahar

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "dahar/data.hpp"
#include "dahar/model.hpp"

namespace dahar {

struct TrainConfig {
  double learning_rate = 1e-4;
  std::size_t batch_size = 16;
  std::size_t epochs = 200;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_epsilon = 1e-8;
  std::uint64_t seed = 0;
  std::size_t sequence_length = 16;

  void validate() const;
};

struct EpochRecord {
  std::size_t epoch = 0;  // 1-based
  double train_loss = 0;
  double train_accuracy = 0;
  double val_accuracy = 0;
  bool operator==(const EpochRecord&) const = default;
};

struct TrainHistory {
  std::vector<EpochRecord> epochs;

  /// `epoch,train_loss,train_acc,val_acc` with a header row.
  std::string to_csv() const;
  void save(const std::filesystem::path& path) const;
};

/// -log(max(probs[label], 1e-12)).
template <typename T>
T cross_entropy_loss(std::span<const T> probs, std::size_t label);

template <typename T>
struct AdamState {
  std::vector<Tensor<T>> m;
  std::vector<Tensor<T>> v;
  std::uint64_t step = 0;
};

/// One bias-corrected Adam update with a constant learning rate. Moments are
/// created on the first call.
template <typename T>
void adam_step(std::span<Tensor<T>* const> params, std::span<const Tensor<T>> grads,
               AdamState<T>& state, const TrainConfig& config);

/// Pointers to every tensor of `params` in declaration order.
template <typename T>
std::vector<Tensor<T>*> parameter_list(ModelParams<T>& params) {
  std::vector<Tensor<T>*> out;
  params.for_each([&](Tensor<T>& t) { out.push_back(&t); });
  return out;
}

template <typename T>
std::vector<Tensor<T>> zeros_like(const ModelParams<T>& params) {
  std::vector<Tensor<T>> out;
  params.for_each([&](const Tensor<T>& t) { out.emplace_back(t.shape()); });
  return out;
}

struct SampleResult {
  double loss = 0;
  std::vector<double> probabilities;
};

/// Forward + backward for one window; adds `scale` x dloss/dparam into
/// `grads` (declaration order, as zeros_like()).
template <typename T>
SampleResult accumulate_gradients(const ModelParams<T>& params, const ModelConfig& config,
                                  const std::vector<Tensor<T>>& frames, std::size_t label,
                                  T scale, std::vector<Tensor<T>>& grads);

struct EvalResult {
  double accuracy = 0;
  std::size_t correct = 0;
  std::size_t total = 0;
  /// confusion[true][predicted]
  std::vector<std::vector<std::size_t>> confusion;
};

/// Whole-clip accuracy: window probabilities are averaged per clip before the
/// argmax.
EvalResult evaluate(const ModelBundle& model, const std::vector<ClipRecord>& clips);
EvalResult evaluate(const ModelBundle& model, const Manifest& manifest, Split split);

struct TrainResult {
  ModelBundle final_model;
  ModelBundle best_model;  // highest validation accuracy, earliest on ties
  std::size_t best_epoch = 0;
  double best_val_accuracy = -1;
  TrainHistory history;
};

using EpochCallback = std::function<void(const EpochRecord&)>;

/// Mini-batch training: per epoch a seeded shuffle of the training windows,
/// batch loss is the mean cross-entropy (last partial batch included), one
/// Adam step per batch, then validation.
TrainResult train(ModelBundle model, const std::vector<ClipRecord>& train_set,
                  const std::vector<ClipRecord>& val_set, const TrainConfig& config,
                  const EpochCallback& on_epoch = {});

/// Loads the train and val splits of `manifest` at the model's input size.
TrainResult train(ModelBundle model, const Manifest& manifest, const TrainConfig& config,
                  const EpochCallback& on_epoch = {});

std::size_t argmax(std::span<const double> values);

}  // namespace dahar

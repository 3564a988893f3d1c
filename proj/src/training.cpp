#include "dahar/training.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <stdexcept>

#include "dahar/io.hpp"
#include "dahar/random.hpp"

namespace dahar {

void TrainConfig::validate() const {
  if (!(learning_rate > 0)) throw std::invalid_argument("learning rate must be positive");
  if (batch_size == 0) throw std::invalid_argument("batch size must be at least 1");
  if (!(adam_beta1 > 0 && adam_beta1 < 1) || !(adam_beta2 > 0 && adam_beta2 < 1)) {
    throw std::invalid_argument("Adam betas must lie in (0, 1)");
  }
  if (!(adam_epsilon > 0)) throw std::invalid_argument("Adam epsilon must be positive");
  if (sequence_length == 0) throw std::invalid_argument("sequence length must be positive");
}

std::string TrainHistory::to_csv() const {
  std::string out = "epoch,train_loss,train_acc,val_acc\n";
  char line[128];
  for (const auto& r : epochs) {
    std::snprintf(line, sizeof(line), "%zu,%.9g,%.6f,%.6f\n", r.epoch, r.train_loss,
                  r.train_accuracy, r.val_accuracy);
    out += line;
  }
  return out;
}

void TrainHistory::save(const std::filesystem::path& path) const {
  const std::string text = to_csv();
  write_file_atomic(path, {reinterpret_cast<const std::uint8_t*>(text.data()), text.size()});
}

template <typename T>
T cross_entropy_loss(std::span<const T> probs, std::size_t label) {
  if (label >= probs.size()) {
    throw std::out_of_range("label " + std::to_string(label) + " outside " +
                            std::to_string(probs.size()) + " classes");
  }
  return -std::log(std::max(probs[label], static_cast<T>(kProbabilityFloor)));
}

template <typename T>
void adam_step(std::span<Tensor<T>* const> params, std::span<const Tensor<T>> grads,
               AdamState<T>& state, const TrainConfig& config) {
  if (params.size() != grads.size()) {
    throw ShapeError("adam_step: " + std::to_string(params.size()) + " parameters but " +
                     std::to_string(grads.size()) + " gradients");
  }
  if (state.m.empty()) {
    for (const Tensor<T>* p : params) {
      state.m.emplace_back(p->shape());
      state.v.emplace_back(p->shape());
    }
  }
  ++state.step;
  const double b1 = config.adam_beta1, b2 = config.adam_beta2;
  const double c1 = 1.0 - std::pow(b1, static_cast<double>(state.step));
  const double c2 = 1.0 - std::pow(b2, static_cast<double>(state.step));
  const T lr = static_cast<T>(config.learning_rate);
  const T eps = static_cast<T>(config.adam_epsilon);
  for (std::size_t i = 0; i < params.size(); ++i) {
    Tensor<T>& p = *params[i];
    const Tensor<T>& g = grads[i];
    if (g.shape() != p.shape() || state.m[i].shape() != p.shape()) {
      throw ShapeError("adam_step: shape mismatch at tensor " + std::to_string(i));
    }
    Tensor<T>& m = state.m[i];
    Tensor<T>& v = state.v[i];
    for (std::size_t k = 0; k < p.size(); ++k) {
      m[k] = static_cast<T>(b1) * m[k] + static_cast<T>(1 - b1) * g[k];
      v[k] = static_cast<T>(b2) * v[k] + static_cast<T>(1 - b2) * g[k] * g[k];
      const T m_hat = m[k] / static_cast<T>(c1);
      const T v_hat = v[k] / static_cast<T>(c2);
      p[k] -= lr * m_hat / (std::sqrt(v_hat) + eps);
    }
  }
}

template <typename T>
SampleResult accumulate_gradients(const ModelParams<T>& params, const ModelConfig& config,
                                  const std::vector<Tensor<T>>& frames, std::size_t label,
                                  T scale, std::vector<Tensor<T>>& grads) {
  Graph<T> g;
  const Model<Var<T>> bound = bind(g, params);
  Var<T> probs = model_forward(g, bound, config, frames);
  Var<T> loss = cross_entropy(probs, label);
  g.backward(loss, scale);
  std::size_t i = 0;
  bound.for_each([&](const Var<T>& v) {
    Tensor<T>& dst = grads.at(i++);
    if (!g.has_grad(v)) return;
    const Tensor<T> src = g.grad(v);
    for (std::size_t k = 0; k < dst.size(); ++k) dst[k] += src[k];
  });
  SampleResult out;
  out.loss = static_cast<double>(loss.value()[0]);
  out.probabilities.assign(probs.value().data().begin(), probs.value().data().end());
  return out;
}

std::size_t argmax(std::span<const double> values) {
  return static_cast<std::size_t>(std::max_element(values.begin(), values.end()) -
                                  values.begin());
}

EvalResult evaluate(const ModelBundle& model, const std::vector<ClipRecord>& clips) {
  if (clips.empty()) throw DataError("evaluate: no clips");
  const std::size_t k = model.config.recurrent.num_classes;
  EvalResult r;
  r.confusion.assign(k, std::vector<std::size_t>(k, 0));
  for (const ClipRecord& clip : clips) {
    if (clip.label >= k) throw DataError("label outside the model's class set: " + clip.path);
    std::vector<std::vector<Tensor<float>>> windows;
    for (const auto& w : clip.windows) windows.push_back(w.frames);
    const std::vector<float> probs = predict_windows(model.params, model.config, windows);
    const std::vector<double> p(probs.begin(), probs.end());
    const std::size_t predicted = argmax(p);
    ++r.confusion[clip.label][predicted];
    if (predicted == clip.label) ++r.correct;
    ++r.total;
  }
  r.accuracy = static_cast<double>(r.correct) / static_cast<double>(r.total);
  return r;
}

EvalResult evaluate(const ModelBundle& model, const Manifest& manifest, Split split) {
  const auto& bb = model.config.backbone;
  return evaluate(model, load_split(manifest, split, model.labels, bb.input_height,
                                    bb.input_width, model.config.recurrent.sequence_length));
}

TrainResult train(ModelBundle model, const std::vector<ClipRecord>& train_set,
                  const std::vector<ClipRecord>& val_set, const TrainConfig& config,
                  const EpochCallback& on_epoch) {
  config.validate();
  model.config.validate();
  if (config.sequence_length != model.config.recurrent.sequence_length) {
    throw std::invalid_argument("training sequence length differs from the model's");
  }
  if (train_set.empty() || val_set.empty()) {
    throw DataError("training needs non-empty train and validation sets");
  }
  const std::vector<ClipSample> samples = windows_of(train_set);
  for (const ClipSample& s : samples) {
    if (s.frames.size() != config.sequence_length) {
      throw DataError("training window has " + std::to_string(s.frames.size()) + " frames");
    }
    if (s.label >= model.config.recurrent.num_classes) {
      throw DataError("training label " + std::to_string(s.label) + " outside the class set");
    }
  }

  Rng rng(config.seed);
  AdamState<float> adam;
  const std::vector<Tensor<float>*> param_ptrs = parameter_list(model.params);
  std::vector<std::size_t> order(samples.size());
  std::iota(order.begin(), order.end(), std::size_t{0});

  TrainResult result;
  for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
    rng.shuffle(order.begin(), order.end());
    double loss_sum = 0;
    std::size_t correct = 0;
    for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
      const std::size_t end = std::min(order.size(), start + config.batch_size);
      const float scale = 1.0f / static_cast<float>(end - start);
      std::vector<Tensor<float>> grads = zeros_like(model.params);
      for (std::size_t i = start; i < end; ++i) {
        const ClipSample& s = samples[order[i]];
        const SampleResult r =
            accumulate_gradients(model.params, model.config, s.frames, s.label, scale, grads);
        loss_sum += r.loss;
        if (argmax(r.probabilities) == s.label) ++correct;
      }
      adam_step<float>(param_ptrs, grads, adam, config);
    }
    EpochRecord record;
    record.epoch = epoch;
    record.train_loss = loss_sum / static_cast<double>(samples.size());
    record.train_accuracy = static_cast<double>(correct) / static_cast<double>(samples.size());
    record.val_accuracy = evaluate(model, val_set).accuracy;
    result.history.epochs.push_back(record);
    if (record.val_accuracy > result.best_val_accuracy) {
      result.best_val_accuracy = record.val_accuracy;
      result.best_epoch = epoch;
      result.best_model = model;
    }
    if (on_epoch) on_epoch(record);
  }
  if (result.best_epoch == 0) result.best_model = model;
  result.final_model = std::move(model);
  return result;
}

TrainResult train(ModelBundle model, const Manifest& manifest, const TrainConfig& config,
                  const EpochCallback& on_epoch) {
  const auto& bb = model.config.backbone;
  const std::size_t len = model.config.recurrent.sequence_length;
  const auto train_set =
      load_split(manifest, Split::train, model.labels, bb.input_height, bb.input_width, len);
  const auto val_set =
      load_split(manifest, Split::val, model.labels, bb.input_height, bb.input_width, len);
  return train(std::move(model), train_set, val_set, config, on_epoch);
}

#define DAHAR_INSTANTIATE(T)                                                                 \
  template T cross_entropy_loss(std::span<const T>, std::size_t);                            \
  template void adam_step(std::span<Tensor<T>* const>, std::span<const Tensor<T>>,           \
                          AdamState<T>&, const TrainConfig&);                                \
  template SampleResult accumulate_gradients(const ModelParams<T>&, const ModelConfig&,      \
                                             const std::vector<Tensor<T>>&, std::size_t, T,  \
                                             std::vector<Tensor<T>>&);

DAHAR_INSTANTIATE(float)
DAHAR_INSTANTIATE(double)

#undef DAHAR_INSTANTIATE

}  // namespace dahar

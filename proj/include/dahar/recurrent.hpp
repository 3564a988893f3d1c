#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <type_traits>
#include <vector>

#include "dahar/autodiff.hpp"
#include "dahar/random.hpp"

namespace dahar {

struct RecurrentConfig {
  std::size_t input_size = 64;
  std::size_t hidden_size = 32;
  std::size_t layers = 3;
  bool bidirectional = true;
  bool bias = false;
  std::size_t sequence_length = 16;
  std::size_t num_classes = 2;

  void validate() const;

  std::size_t directions() const { return bidirectional ? 2 : 1; }
  std::size_t layer_output_size() const { return hidden_size * directions(); }
  std::size_t layer_input_size(std::size_t layer) const {
    return layer == 0 ? input_size : layer_output_size();
  }
  std::size_t representation_size() const { return layer_output_size(); }

  bool operator==(const RecurrentConfig&) const = default;
};

/// Weights of one GRU direction. w_* map input -> hidden (input x hidden),
/// u_* map hidden -> hidden (hidden x hidden). No biases unless enabled.
template <typename S>
struct GruCell {
  S w_r, u_r;    // reset gate
  S w_mu, u_mu;  // update gate
  S w, u;        // candidate state
  std::optional<S> b_r, b_mu, b;

  template <typename F>
  void for_each(F&& f) {
    f(w_r), f(u_r), f(w_mu), f(u_mu), f(w), f(u);
    if (b_r) f(*b_r), f(*b_mu), f(*b);
  }
  template <typename F>
  void for_each(F&& f) const {
    f(w_r), f(u_r), f(w_mu), f(u_mu), f(w), f(u);
    if (b_r) f(*b_r), f(*b_mu), f(*b);
  }

  template <typename F>
  auto map(F&& f) const {
    using R = std::decay_t<std::invoke_result_t<F&, const S&>>;
    GruCell<R> out{f(w_r), f(u_r), f(w_mu), f(u_mu), f(w), f(u),
                   std::nullopt, std::nullopt, std::nullopt};
    if (b_r) {
      out.b_r = f(*b_r);
      out.b_mu = f(*b_mu);
      out.b = f(*b);
    }
    return out;
  }
};

/// layers[l][d]: layer l, direction d (0 forward, 1 backward), then the
/// output projection w_o (representation x num_classes).
template <typename S>
struct BiGruStack {
  std::vector<std::vector<GruCell<S>>> layers;
  S classifier;

  template <typename F>
  void for_each(F&& f) {
    for (auto& layer : layers)
      for (auto& cell : layer) cell.for_each(f);
    f(classifier);
  }
  template <typename F>
  void for_each(F&& f) const {
    for (const auto& layer : layers)
      for (const auto& cell : layer) cell.for_each(f);
    f(classifier);
  }

  template <typename F>
  auto map(F&& f) const {
    using R = std::decay_t<std::invoke_result_t<F&, const S&>>;
    BiGruStack<R> out;
    for (const auto& layer : layers) {
      auto& mapped = out.layers.emplace_back();
      for (const auto& cell : layer) mapped.push_back(cell.map(f));
    }
    out.classifier = f(classifier);
    return out;
  }
};

template <typename T>
using GruCellParams = GruCell<Tensor<T>>;
template <typename T>
using BiGruStackParams = BiGruStack<Tensor<T>>;

template <typename T>
GruCellParams<T> make_gru_cell(std::size_t input_size, std::size_t hidden_size,
                               bool bias = false);

template <typename T>
BiGruStackParams<T> zero_stack(const RecurrentConfig& config);

template <typename T>
BiGruStackParams<T> build_stack(const RecurrentConfig& config, Rng& rng);

template <typename T>
BiGruStackParams<T> build_stack(const RecurrentConfig& config, std::uint64_t seed) {
  Rng rng(seed);
  return build_stack<T>(config, rng);
}

template <typename T>
GruCell<Var<T>> bind(Graph<T>& g, const GruCellParams<T>& cell) {
  return cell.map([&](const Tensor<T>& t) { return g.parameter(t); });
}

template <typename T>
BiGruStack<Var<T>> bind(Graph<T>& g, const BiGruStackParams<T>& stack) {
  return stack.map([&](const Tensor<T>& t) { return g.parameter(t); });
}

template <typename T>
struct GruStepTrace {
  Var<T> r;        // reset gate
  Var<T> mu;       // update gate
  Var<T> h_tilde;  // candidate
  Var<T> h;        // new state
};

/// r = s(w_r x + u_r h), mu = s(w_mu x + u_mu h), h~ = tanh(w x + r * (u h)),
/// h' = (1 - mu) * h + mu * h~.
template <typename T>
GruStepTrace<T> gru_step(Var<T> x, Var<T> h_prev, const GruCell<Var<T>>& cell);

/// Runs one direction over `sequence` from a zero state. With `reverse`, the
/// cell reads t = n..1 and the returned states are indexed by original
/// position.
template <typename T>
std::vector<Var<T>> gru_layer(const std::vector<Var<T>>& sequence, const GruCell<Var<T>>& cell,
                              bool reverse = false);

/// output_t = concat(h_fwd_t, h_bwd_t).
template <typename T>
std::vector<Var<T>> bigru_layer(const std::vector<Var<T>>& sequence,
                                const GruCell<Var<T>>& fwd, const GruCell<Var<T>>& bwd);

/// Chains the configured layers and returns concat(h_fwd at t = n, h_bwd at
/// t = 1) of the last layer (just h_fwd at t = n when unidirectional).
template <typename T>
Var<T> stack_forward(const std::vector<Var<T>>& features, const BiGruStack<Var<T>>& stack,
                     const RecurrentConfig& config);

/// softmax(w_o . representation).
template <typename T>
Var<T> classify(Var<T> representation, Var<T> w_o);

}  // namespace dahar

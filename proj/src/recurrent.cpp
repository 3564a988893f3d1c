#include "dahar/recurrent.hpp"

#include <string>

#include "dahar/init.hpp"

namespace dahar {

void RecurrentConfig::validate() const {
  if (input_size == 0 || hidden_size == 0 || layers == 0) {
    throw ShapeError("recurrent stack needs positive input, hidden and layer counts");
  }
  if (sequence_length == 0) throw ShapeError("sequence length must be positive");
  if (num_classes < 2) {
    throw ShapeError("need at least 2 classes, got " + std::to_string(num_classes));
  }
}

template <typename T>
GruCellParams<T> make_gru_cell(std::size_t input_size, std::size_t hidden_size, bool bias) {
  GruCellParams<T> cell{Tensor<T>({input_size, hidden_size}),
                        Tensor<T>({hidden_size, hidden_size}),
                        Tensor<T>({input_size, hidden_size}),
                        Tensor<T>({hidden_size, hidden_size}),
                        Tensor<T>({input_size, hidden_size}),
                        Tensor<T>({hidden_size, hidden_size}),
                        std::nullopt,
                        std::nullopt,
                        std::nullopt};
  if (bias) {
    cell.b_r = Tensor<T>({hidden_size});
    cell.b_mu = Tensor<T>({hidden_size});
    cell.b = Tensor<T>({hidden_size});
  }
  return cell;
}

template <typename T>
BiGruStackParams<T> zero_stack(const RecurrentConfig& config) {
  config.validate();
  BiGruStackParams<T> stack;
  for (std::size_t l = 0; l < config.layers; ++l) {
    auto& layer = stack.layers.emplace_back();
    for (std::size_t d = 0; d < config.directions(); ++d) {
      layer.push_back(
          make_gru_cell<T>(config.layer_input_size(l), config.hidden_size, config.bias));
    }
  }
  stack.classifier = Tensor<T>({config.representation_size(), config.num_classes});
  return stack;
}

template <typename T>
BiGruStackParams<T> build_stack(const RecurrentConfig& config, Rng& rng) {
  BiGruStackParams<T> stack = zero_stack<T>(config);
  for (auto& layer : stack.layers) {
    for (auto& cell : layer) {
      // Biases stay zero.
      for (Tensor<T>* m : {&cell.w_r, &cell.u_r, &cell.w_mu, &cell.u_mu, &cell.w, &cell.u}) {
        fan_scaled_uniform(*m, m->dim(0), m->dim(1), rng);
      }
    }
  }
  fan_scaled_uniform(stack.classifier, stack.classifier.dim(0), stack.classifier.dim(1), rng);
  return stack;
}

namespace {

template <typename T>
Var<T> gate_input(Var<T> x, Var<T> h, Var<T> w, Var<T> u, const std::optional<Var<T>>& b) {
  return add(dense(x, w, b), dense(h, u));
}

}  // namespace

template <typename T>
GruStepTrace<T> gru_step(Var<T> x, Var<T> h_prev, const GruCell<Var<T>>& cell) {
  const std::size_t hidden = cell.u_r.value().dim(0);
  if (h_prev.value().size() != hidden) {
    throw ShapeError("gru_step: hidden state has " + std::to_string(h_prev.value().size()) +
                     " values, cell expects " + std::to_string(hidden));
  }
  Graph<T>& g = *x.graph;
  GruStepTrace<T> t;
  t.r = sigmoid(gate_input(x, h_prev, cell.w_r, cell.u_r, cell.b_r));
  t.mu = sigmoid(gate_input(x, h_prev, cell.w_mu, cell.u_mu, cell.b_mu));
  Var<T> recurrent = mul(t.r, dense(h_prev, cell.u));
  t.h_tilde = tanh(add(dense(x, cell.w, cell.b), recurrent));
  Var<T> keep = sub(g.constant(Tensor<T>({hidden}, T{1})), t.mu);
  t.h = add(mul(keep, h_prev), mul(t.mu, t.h_tilde));
  return t;
}

template <typename T>
std::vector<Var<T>> gru_layer(const std::vector<Var<T>>& sequence, const GruCell<Var<T>>& cell,
                              bool reverse) {
  if (sequence.empty()) throw ShapeError("gru_layer: empty sequence");
  Graph<T>& g = *sequence.front().graph;
  const std::size_t n = sequence.size();
  const std::size_t hidden = cell.u_r.value().dim(0);
  std::vector<Var<T>> states(n);
  Var<T> h = g.constant(Tensor<T>({hidden}));
  for (std::size_t step = 0; step < n; ++step) {
    const std::size_t t = reverse ? n - 1 - step : step;
    h = gru_step(sequence[t], h, cell).h;
    states[t] = h;
  }
  return states;
}

template <typename T>
std::vector<Var<T>> bigru_layer(const std::vector<Var<T>>& sequence,
                                const GruCell<Var<T>>& fwd, const GruCell<Var<T>>& bwd) {
  const std::vector<Var<T>> forward = gru_layer(sequence, fwd, false);
  const std::vector<Var<T>> backward = gru_layer(sequence, bwd, true);
  std::vector<Var<T>> out;
  out.reserve(sequence.size());
  for (std::size_t t = 0; t < sequence.size(); ++t) {
    out.push_back(concat_channels(forward[t], backward[t]));
  }
  return out;
}

template <typename T>
Var<T> stack_forward(const std::vector<Var<T>>& features, const BiGruStack<Var<T>>& stack,
                     const RecurrentConfig& config) {
  if (features.size() != config.sequence_length) {
    throw ShapeError("stack_forward: expected " + std::to_string(config.sequence_length) +
                     " steps, got " + std::to_string(features.size()));
  }
  std::vector<Var<T>> seq = features;
  if (!config.bidirectional) {
    for (const auto& layer : stack.layers) seq = gru_layer(seq, layer.at(0), false);
    return seq.back();
  }
  std::vector<Var<T>> fwd_states, bwd_states;
  for (const auto& layer : stack.layers) {
    fwd_states = gru_layer(seq, layer.at(0), false);
    bwd_states = gru_layer(seq, layer.at(1), true);
    std::vector<Var<T>> next;
    next.reserve(seq.size());
    for (std::size_t t = 0; t < seq.size(); ++t) {
      next.push_back(concat_channels(fwd_states[t], bwd_states[t]));
    }
    seq = std::move(next);
  }
  return concat_channels(fwd_states.back(), bwd_states.front());
}

template <typename T>
Var<T> classify(Var<T> representation, Var<T> w_o) {
  if (w_o.value().rank() != 2 || w_o.value().dim(1) < 2) {
    throw ShapeError("classify: w_o must be representation x num_classes with >= 2 classes");
  }
  return softmax(dense(representation, w_o));
}

#define DAHAR_INSTANTIATE(T)                                                                   \
  template GruCellParams<T> make_gru_cell<T>(std::size_t, std::size_t, bool);                  \
  template BiGruStackParams<T> zero_stack<T>(const RecurrentConfig&);                          \
  template BiGruStackParams<T> build_stack<T>(const RecurrentConfig&, Rng&);                   \
  template GruStepTrace<T> gru_step(Var<T>, Var<T>, const GruCell<Var<T>>&);                   \
  template std::vector<Var<T>> gru_layer(const std::vector<Var<T>>&, const GruCell<Var<T>>&,   \
                                         bool);                                                \
  template std::vector<Var<T>> bigru_layer(const std::vector<Var<T>>&, const GruCell<Var<T>>&, \
                                           const GruCell<Var<T>>&);                            \
  template Var<T> stack_forward(const std::vector<Var<T>>&, const BiGruStack<Var<T>>&,         \
                                const RecurrentConfig&);                                       \
  template Var<T> classify(Var<T>, Var<T>);

DAHAR_INSTANTIATE(float)
DAHAR_INSTANTIATE(double)

#undef DAHAR_INSTANTIATE

}  // namespace dahar

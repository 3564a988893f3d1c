#pragma once

#include <cstddef>
#include <deque>
#include <functional>
#include <optional>
#include <vector>

#include "dahar/tensor.hpp"

namespace dahar {

template <typename T>
class Graph;

/// Handle to a node recorded on a Graph.
template <typename T>
struct Var {
  Graph<T>* graph = nullptr;
  std::size_t id = 0;

  const Tensor<T>& value() const { return graph->value(id); }
  const Shape& shape() const { return value().shape(); }
};

enum class PoolMode { max, avg };
enum class Activation { relu, sigmoid, tanh, softmax };
enum class Binary { add, sub, mul };

/// Tape of executed primitive ops.
///
/// Nodes are appended in execution order, so the tape is topologically
/// sorted by construction. A graph built with `record == false` keeps the
/// forward values only and is used for inference.
template <typename T>
class Graph {
 public:
  using BackwardFn = std::function<void(Graph&, std::size_t self)>;

  explicit Graph(bool record = true) : record_(record) {}
  Graph(const Graph&) = delete;
  Graph& operator=(const Graph&) = delete;

  bool recording() const { return record_; }
  std::size_t size() const { return nodes_.size(); }

  /// Leaf holding its own copy of `value`.
  Var<T> constant(Tensor<T> value);

  /// Leaf referring to externally owned storage; `value` must outlive the
  /// graph and stay unmodified while it is in use.
  Var<T> parameter(const Tensor<T>& value);
  Var<T> parameter(Tensor<T>&&) = delete;

  /// Appends an op result. `backward` receives the graph and the new node id.
  Var<T> record(Tensor<T> value, std::vector<std::size_t> inputs,
                BackwardFn backward);

  const Tensor<T>& value(std::size_t id) const;
  const Tensor<T>& value(Var<T> v) const { return value(v.id); }

  bool has_grad(Var<T> v) const { return nodes_.at(v.id).has_grad; }

  /// Gradient of the last backward() loss with respect to `v`. Nodes the
  /// loss does not depend on report zeros.
  Tensor<T> grad(Var<T> v) const;

  /// Accumulation slot used by backward functions; zero-initialised on
  /// first touch.
  Tensor<T>& grad_slot(std::size_t id);
  const Tensor<T>& incoming(std::size_t id) const { return nodes_[id].grad; }

  /// Reverse sweep from a scalar node. Gradients sum over fan-out.
  void backward(Var<T> loss, T seed = T{1});

 private:
  struct Node {
    Tensor<T> owned;
    const Tensor<T>* ref = nullptr;
    std::vector<std::size_t> inputs;
    BackwardFn backward;
    Tensor<T> grad;
    bool has_grad = false;
  };

  Var<T> push(Node node);

  bool record_;
  std::deque<Node> nodes_;
};

// Primitive ops. Every op validates shapes and throws ShapeError.

/// 3x3 convolution, stride 1, zero padding 1.
/// input H x W x Cin, kernels 3 x 3 x Cin x Cout.
template <typename T>
Var<T> conv2d(Var<T> input, Var<T> kernels);

/// 2x2 max pool, stride 2, output ceil(H/2) x ceil(W/2) x C. Ties route the
/// gradient to the first maximum in row-major window order.
template <typename T>
Var<T> maxpool2d(Var<T> input);

/// H x W x C -> 1 x 1 x C.
template <typename T>
Var<T> global_pool(Var<T> input, PoolMode mode);

/// H x W x C -> H x W x 1, pooling across channels at each position.
template <typename T>
Var<T> channel_pool(Var<T> input, PoolMode mode);

/// input (any shape, m values) times weights m x n (+ bias n) -> vector n.
template <typename T>
Var<T> dense(Var<T> input, Var<T> weights,
             std::optional<Var<T>> bias = std::nullopt);

/// Softmax normalises over the last axis.
template <typename T>
Var<T> activation(Var<T> input, Activation kind);

/// Equal-rank elementwise op; an axis of extent 1 broadcasts.
template <typename T>
Var<T> elementwise(Var<T> a, Var<T> b, Binary kind);

/// Concatenation along the last axis; leading extents must agree.
template <typename T>
Var<T> concat_channels(Var<T> a, Var<T> b);

template <typename T>
Var<T> reshape(Var<T> input, Shape shape);

/// -log(max(probs[label], 1e-12)) as a 1-element tensor.
template <typename T>
Var<T> cross_entropy(Var<T> probs, std::size_t label);

template <typename T>
Var<T> add(Var<T> a, Var<T> b) { return elementwise(a, b, Binary::add); }
template <typename T>
Var<T> sub(Var<T> a, Var<T> b) { return elementwise(a, b, Binary::sub); }
template <typename T>
Var<T> mul(Var<T> a, Var<T> b) { return elementwise(a, b, Binary::mul); }
template <typename T>
Var<T> relu(Var<T> x) { return activation(x, Activation::relu); }
template <typename T>
Var<T> sigmoid(Var<T> x) { return activation(x, Activation::sigmoid); }
template <typename T>
Var<T> tanh(Var<T> x) { return activation(x, Activation::tanh); }
template <typename T>
Var<T> softmax(Var<T> x) { return activation(x, Activation::softmax); }

inline constexpr double kProbabilityFloor = 1e-12;

}  // namespace dahar

#include "dahar/autodiff.hpp"

#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <memory>
#include <stdexcept>
#include <string>

namespace dahar {

namespace {

template <typename T>
using RowMatrix = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
template <typename T>
using MatrixMap = Eigen::Map<RowMatrix<T>>;
template <typename T>
using ConstMatrixMap = Eigen::Map<const RowMatrix<T>>;

void require(bool ok, const std::string& message) {
  if (!ok) throw ShapeError(message);
}

void require_image(const Shape& s, const char* op) {
  require(s.size() == 3, std::string(op) + ": expected H x W x C input, got " +
                             shape_string(s));
}

// Patch matrix for a 3x3 / pad 1 convolution: row (y, x), column (ky, kx, ci).
template <typename T>
RowMatrix<T> im2col(const Tensor<T>& in) {
  const std::size_t h = in.dim(0), w = in.dim(1), c = in.dim(2);
  RowMatrix<T> cols = RowMatrix<T>::Zero(static_cast<Eigen::Index>(h * w),
                                         static_cast<Eigen::Index>(9 * c));
  const T* src = in.raw();
  for (std::size_t y = 0; y < h; ++y) {
    for (std::size_t x = 0; x < w; ++x) {
      T* row = cols.data() + (y * w + x) * 9 * c;
      for (int ky = 0; ky < 3; ++ky) {
        const long sy = static_cast<long>(y) + ky - 1;
        if (sy < 0 || sy >= static_cast<long>(h)) continue;
        for (int kx = 0; kx < 3; ++kx) {
          const long sx = static_cast<long>(x) + kx - 1;
          if (sx < 0 || sx >= static_cast<long>(w)) continue;
          std::copy_n(src + (static_cast<std::size_t>(sy) * w + static_cast<std::size_t>(sx)) * c,
                      c, row + static_cast<std::size_t>(ky * 3 + kx) * c);
        }
      }
    }
  }
  return cols;
}

template <typename T>
void col2im_add(const RowMatrix<T>& cols, Tensor<T>& out) {
  const std::size_t h = out.dim(0), w = out.dim(1), c = out.dim(2);
  T* dst = out.raw();
  for (std::size_t y = 0; y < h; ++y) {
    for (std::size_t x = 0; x < w; ++x) {
      const T* row = cols.data() + (y * w + x) * 9 * c;
      for (int ky = 0; ky < 3; ++ky) {
        const long sy = static_cast<long>(y) + ky - 1;
        if (sy < 0 || sy >= static_cast<long>(h)) continue;
        for (int kx = 0; kx < 3; ++kx) {
          const long sx = static_cast<long>(x) + kx - 1;
          if (sx < 0 || sx >= static_cast<long>(w)) continue;
          T* d = dst + (static_cast<std::size_t>(sy) * w + static_cast<std::size_t>(sx)) * c;
          const T* s = row + static_cast<std::size_t>(ky * 3 + kx) * c;
          for (std::size_t ci = 0; ci < c; ++ci) d[ci] += s[ci];
        }
      }
    }
  }
}

// Maps an output multi-index onto an operand that may have extent-1 axes.
struct BroadcastPlan {
  Shape out;
  std::vector<std::size_t> a_strides;
  std::vector<std::size_t> b_strides;
};

BroadcastPlan plan_broadcast(const Shape& a, const Shape& b) {
  require(a.size() == b.size(), "elementwise: rank mismatch " + shape_string(a) +
                                    " vs " + shape_string(b));
  BroadcastPlan plan;
  const std::size_t rank = a.size();
  plan.out.resize(rank);
  plan.a_strides.assign(rank, 0);
  plan.b_strides.assign(rank, 0);
  std::size_t sa = 1, sb = 1;
  for (std::size_t i = rank; i-- > 0;) {
    require(a[i] == b[i] || a[i] == 1 || b[i] == 1,
            "elementwise: incompatible shapes " + shape_string(a) + " vs " +
                shape_string(b));
    plan.out[i] = std::max(a[i], b[i]);
    plan.a_strides[i] = a[i] == 1 ? 0 : sa;
    plan.b_strides[i] = b[i] == 1 ? 0 : sb;
    sa *= a[i];
    sb *= b[i];
  }
  return plan;
}

// Calls f(out_index, a_index, b_index) for every output element in row-major
// order.
template <typename F>
void for_each_broadcast(const BroadcastPlan& plan, F&& f) {
  const std::size_t rank = plan.out.size();
  const std::size_t total = shape_size(plan.out);
  std::vector<std::size_t> idx(rank, 0);
  std::size_t ia = 0, ib = 0;
  for (std::size_t o = 0; o < total; ++o) {
    f(o, ia, ib);
    for (std::size_t ax = rank; ax-- > 0;) {
      ++idx[ax];
      ia += plan.a_strides[ax];
      ib += plan.b_strides[ax];
      if (idx[ax] < plan.out[ax]) break;
      ia -= plan.a_strides[ax] * idx[ax];
      ib -= plan.b_strides[ax] * idx[ax];
      idx[ax] = 0;
    }
  }
}

}  // namespace

// ---------------------------------------------------------------------------
// Graph

template <typename T>
Var<T> Graph<T>::push(Node node) {
  nodes_.push_back(std::move(node));
  return Var<T>{this, nodes_.size() - 1};
}

template <typename T>
Var<T> Graph<T>::constant(Tensor<T> value) {
  Node node;
  node.owned = std::move(value);
  return push(std::move(node));
}

template <typename T>
Var<T> Graph<T>::parameter(const Tensor<T>& value) {
  Node node;
  node.ref = &value;
  return push(std::move(node));
}

template <typename T>
Var<T> Graph<T>::record(Tensor<T> value, std::vector<std::size_t> inputs,
                        BackwardFn backward) {
  Node node;
  node.owned = std::move(value);
  if (record_) {
    node.inputs = std::move(inputs);
    node.backward = std::move(backward);
  }
  return push(std::move(node));
}

template <typename T>
const Tensor<T>& Graph<T>::value(std::size_t id) const {
  const Node& n = nodes_.at(id);
  return n.ref ? *n.ref : n.owned;
}

template <typename T>
Tensor<T> Graph<T>::grad(Var<T> v) const {
  const Node& n = nodes_.at(v.id);
  if (n.has_grad) return n.grad;
  return Tensor<T>(value(v.id).shape());
}

template <typename T>
Tensor<T>& Graph<T>::grad_slot(std::size_t id) {
  Node& n = nodes_[id];
  if (!n.has_grad) {
    n.grad = Tensor<T>(value(id).shape());
    n.has_grad = true;
  }
  return n.grad;
}

template <typename T>
void Graph<T>::backward(Var<T> loss, T seed) {
  if (!record_) throw std::logic_error("backward() on a non-recording graph");
  if (value(loss.id).size() != 1) {
    throw ShapeError("backward: loss must be scalar, got " +
                     shape_string(value(loss.id).shape()));
  }
  for (Node& n : nodes_) {
    n.has_grad = false;
    n.grad = Tensor<T>();
  }
  grad_slot(loss.id)[0] = seed;
  for (std::size_t id = loss.id + 1; id-- > 0;) {
    Node& n = nodes_[id];
    if (!n.has_grad || !n.backward) continue;
    n.backward(*this, id);
  }
}

// ---------------------------------------------------------------------------
// Ops

template <typename T>
Var<T> conv2d(Var<T> input, Var<T> kernels) {
  Graph<T>& g = *input.graph;
  const Tensor<T>& in = input.value();
  const Tensor<T>& k = kernels.value();
  require_image(in.shape(), "conv2d");
  require(k.rank() == 4 && k.dim(0) == 3 && k.dim(1) == 3,
          "conv2d: kernels must be 3 x 3 x Cin x Cout, got " + shape_string(k.shape()));
  require(k.dim(2) == in.dim(2), "conv2d: input has " + std::to_string(in.dim(2)) +
                                     " channels but kernels expect " +
                                     std::to_string(k.dim(2)));
  const std::size_t h = in.dim(0), w = in.dim(1), cin = in.dim(2), cout = k.dim(3);
  const auto rows = static_cast<Eigen::Index>(h * w);
  const auto inner = static_cast<Eigen::Index>(9 * cin);
  const auto outc = static_cast<Eigen::Index>(cout);

  Tensor<T> out({h, w, cout});
  {
    const RowMatrix<T> cols = im2col(in);
    MatrixMap<T>(out.raw(), rows, outc).noalias() =
        cols * ConstMatrixMap<T>(k.raw(), inner, outc);
  }
  const std::size_t in_id = input.id, k_id = kernels.id;
  return g.record(std::move(out), {in_id, k_id},
                  [=](Graph<T>& gr, std::size_t self) {
                    const Tensor<T>& gout = gr.incoming(self);
                    const Tensor<T>& xin = gr.value(in_id);
                    const Tensor<T>& kk = gr.value(k_id);
                    ConstMatrixMap<T> gm(gout.raw(), rows, outc);
                    const RowMatrix<T> cols = im2col(xin);
                    Tensor<T>& gk = gr.grad_slot(k_id);
                    MatrixMap<T>(gk.raw(), inner, outc).noalias() += cols.transpose() * gm;
                    const RowMatrix<T> gcols =
                        gm * ConstMatrixMap<T>(kk.raw(), inner, outc).transpose();
                    col2im_add(gcols, gr.grad_slot(in_id));
                  });
}

template <typename T>
Var<T> maxpool2d(Var<T> input) {
  Graph<T>& g = *input.graph;
  const Tensor<T>& in = input.value();
  require_image(in.shape(), "maxpool2d");
  const std::size_t h = in.dim(0), w = in.dim(1), c = in.dim(2);
  require(h >= 2 && w >= 2, "maxpool2d: spatial extents must be >= 2, got " +
                                shape_string(in.shape()));
  const std::size_t oh = (h + 1) / 2, ow = (w + 1) / 2;
  Tensor<T> out({oh, ow, c});
  std::vector<std::size_t> argmax(out.size());
  for (std::size_t oy = 0; oy < oh; ++oy) {
    for (std::size_t ox = 0; ox < ow; ++ox) {
      for (std::size_t ch = 0; ch < c; ++ch) {
        std::size_t best = (2 * oy * w + 2 * ox) * c + ch;
        for (std::size_t dy = 0; dy < 2 && 2 * oy + dy < h; ++dy) {
          for (std::size_t dx = 0; dx < 2 && 2 * ox + dx < w; ++dx) {
            const std::size_t idx = ((2 * oy + dy) * w + 2 * ox + dx) * c + ch;
            if (in[idx] > in[best]) best = idx;
          }
        }
        const std::size_t o = (oy * ow + ox) * c + ch;
        out[o] = in[best];
        argmax[o] = best;
      }
    }
  }
  const std::size_t in_id = input.id;
  return g.record(std::move(out), {in_id},
                  [in_id, argmax = std::move(argmax)](Graph<T>& gr, std::size_t self) {
                    const Tensor<T>& gout = gr.incoming(self);
                    Tensor<T>& gin = gr.grad_slot(in_id);
                    for (std::size_t o = 0; o < argmax.size(); ++o) gin[argmax[o]] += gout[o];
                  });
}

template <typename T>
Var<T> global_pool(Var<T> input, PoolMode mode) {
  Graph<T>& g = *input.graph;
  const Tensor<T>& in = input.value();
  require_image(in.shape(), "global_pool");
  const std::size_t positions = in.dim(0) * in.dim(1), c = in.dim(2);
  Tensor<T> out({1, 1, c});
  std::vector<std::size_t> argmax;
  if (mode == PoolMode::max) {
    argmax.resize(c);
    for (std::size_t ch = 0; ch < c; ++ch) {
      std::size_t best = ch;
      for (std::size_t p = 1; p < positions; ++p) {
        if (in[p * c + ch] > in[best]) best = p * c + ch;
      }
      argmax[ch] = best;
      out[ch] = in[best];
    }
  } else {
    for (std::size_t p = 0; p < positions; ++p) {
      for (std::size_t ch = 0; ch < c; ++ch) out[ch] += in[p * c + ch];
    }
    for (std::size_t ch = 0; ch < c; ++ch) out[ch] /= static_cast<T>(positions);
  }
  const std::size_t in_id = input.id;
  return g.record(std::move(out), {in_id},
                  [=, argmax = std::move(argmax)](Graph<T>& gr, std::size_t self) {
                    const Tensor<T>& gout = gr.incoming(self);
                    Tensor<T>& gin = gr.grad_slot(in_id);
                    if (mode == PoolMode::max) {
                      for (std::size_t ch = 0; ch < c; ++ch) gin[argmax[ch]] += gout[ch];
                    } else {
                      const T scale = T{1} / static_cast<T>(positions);
                      for (std::size_t p = 0; p < positions; ++p) {
                        for (std::size_t ch = 0; ch < c; ++ch) gin[p * c + ch] += gout[ch] * scale;
                      }
                    }
                  });
}

template <typename T>
Var<T> channel_pool(Var<T> input, PoolMode mode) {
  Graph<T>& g = *input.graph;
  const Tensor<T>& in = input.value();
  require_image(in.shape(), "channel_pool");
  const std::size_t positions = in.dim(0) * in.dim(1), c = in.dim(2);
  require(c >= 1, "channel_pool: no channels");
  Tensor<T> out({in.dim(0), in.dim(1), 1});
  std::vector<std::size_t> argmax;
  if (mode == PoolMode::max) argmax.resize(positions);
  for (std::size_t p = 0; p < positions; ++p) {
    const T* row = in.raw() + p * c;
    if (mode == PoolMode::max) {
      std::size_t best = 0;
      for (std::size_t ch = 1; ch < c; ++ch) {
        if (row[ch] > row[best]) best = ch;
      }
      argmax[p] = p * c + best;
      out[p] = row[best];
    } else {
      T acc{0};
      for (std::size_t ch = 0; ch < c; ++ch) acc += row[ch];
      out[p] = acc / static_cast<T>(c);
    }
  }
  const std::size_t in_id = input.id;
  return g.record(std::move(out), {in_id},
                  [=, argmax = std::move(argmax)](Graph<T>& gr, std::size_t self) {
                    const Tensor<T>& gout = gr.incoming(self);
                    Tensor<T>& gin = gr.grad_slot(in_id);
                    if (mode == PoolMode::max) {
                      for (std::size_t p = 0; p < positions; ++p) gin[argmax[p]] += gout[p];
                    } else {
                      const T scale = T{1} / static_cast<T>(c);
                      for (std::size_t p = 0; p < positions; ++p) {
                        for (std::size_t ch = 0; ch < c; ++ch) gin[p * c + ch] += gout[p] * scale;
                      }
                    }
                  });
}

template <typename T>
Var<T> dense(Var<T> input, Var<T> weights, std::optional<Var<T>> bias) {
  Graph<T>& g = *input.graph;
  const Tensor<T>& x = input.value();
  const Tensor<T>& wt = weights.value();
  require(wt.rank() == 2, "dense: weights must be m x n, got " + shape_string(wt.shape()));
  const std::size_t m = wt.dim(0), n = wt.dim(1);
  require(x.size() == m, "dense: input has " + std::to_string(x.size()) +
                             " values but weights expect " + std::to_string(m));
  if (bias) {
    require(bias->value().size() == n, "dense: bias length " +
                                           std::to_string(bias->value().size()) +
                                           " does not match " + std::to_string(n));
  }
  const auto mi = static_cast<Eigen::Index>(m), ni = static_cast<Eigen::Index>(n);
  Tensor<T> out({n});
  MatrixMap<T>(out.raw(), 1, ni).noalias() =
      ConstMatrixMap<T>(x.raw(), 1, mi) * ConstMatrixMap<T>(wt.raw(), mi, ni);
  std::vector<std::size_t> inputs{input.id, weights.id};
  if (bias) {
    const Tensor<T>& b = bias->value();
    for (std::size_t j = 0; j < n; ++j) out[j] += b[j];
    inputs.push_back(bias->id);
  }
  const std::size_t x_id = input.id, w_id = weights.id;
  const std::optional<std::size_t> b_id =
      bias ? std::optional<std::size_t>(bias->id) : std::nullopt;
  return g.record(std::move(out), std::move(inputs),
                  [=](Graph<T>& gr, std::size_t self) {
                    ConstMatrixMap<T> gout(gr.incoming(self).raw(), 1, ni);
                    const Tensor<T>& xv = gr.value(x_id);
                    const Tensor<T>& wv = gr.value(w_id);
                    MatrixMap<T>(gr.grad_slot(w_id).raw(), mi, ni).noalias() +=
                        ConstMatrixMap<T>(xv.raw(), 1, mi).transpose() * gout;
                    MatrixMap<T>(gr.grad_slot(x_id).raw(), 1, mi).noalias() +=
                        gout * ConstMatrixMap<T>(wv.raw(), mi, ni).transpose();
                    if (b_id) {
                      Tensor<T>& gb = gr.grad_slot(*b_id);
                      for (std::size_t j = 0; j < n; ++j) gb[j] += gout(0, static_cast<Eigen::Index>(j));
                    }
                  });
}

template <typename T>
Var<T> activation(Var<T> input, Activation kind) {
  Graph<T>& g = *input.graph;
  const Tensor<T>& in = input.value();
  Tensor<T> out(in.shape());
  const std::size_t n = in.size();
  switch (kind) {
    case Activation::relu:
      for (std::size_t i = 0; i < n; ++i) out[i] = in[i] > T{0} ? in[i] : T{0};
      break;
    case Activation::sigmoid:
      for (std::size_t i = 0; i < n; ++i) out[i] = T{1} / (T{1} + std::exp(-in[i]));
      break;
    case Activation::tanh:
      for (std::size_t i = 0; i < n; ++i) out[i] = std::tanh(in[i]);
      break;
    case Activation::softmax: {
      require(in.rank() >= 1 && !in.empty(), "softmax: empty input");
      const std::size_t width = in.shape().back();
      for (std::size_t r = 0; r < n / width; ++r) {
        const T* src = in.raw() + r * width;
        T* dst = out.raw() + r * width;
        const T top = *std::max_element(src, src + width);
        T total{0};
        for (std::size_t j = 0; j < width; ++j) {
          dst[j] = std::exp(src[j] - top);
          total += dst[j];
        }
        for (std::size_t j = 0; j < width; ++j) dst[j] /= total;
      }
      break;
    }
  }
  const std::size_t in_id = input.id;
  return g.record(std::move(out), {in_id}, [=](Graph<T>& gr, std::size_t self) {
    const Tensor<T>& gout = gr.incoming(self);
    const Tensor<T>& y = gr.value(self);
    const Tensor<T>& x = gr.value(in_id);
    Tensor<T>& gin = gr.grad_slot(in_id);
    switch (kind) {
      case Activation::relu:
        for (std::size_t i = 0; i < n; ++i) {
          if (x[i] > T{0}) gin[i] += gout[i];
        }
        break;
      case Activation::sigmoid:
        for (std::size_t i = 0; i < n; ++i) gin[i] += gout[i] * y[i] * (T{1} - y[i]);
        break;
      case Activation::tanh:
        for (std::size_t i = 0; i < n; ++i) gin[i] += gout[i] * (T{1} - y[i] * y[i]);
        break;
      case Activation::softmax: {
        const std::size_t width = y.shape().back();
        for (std::size_t r = 0; r < n / width; ++r) {
          const std::size_t base = r * width;
          T dot{0};
          for (std::size_t j = 0; j < width; ++j) dot += gout[base + j] * y[base + j];
          for (std::size_t j = 0; j < width; ++j) {
            gin[base + j] += y[base + j] * (gout[base + j] - dot);
          }
        }
        break;
      }
    }
  });
}

template <typename T>
Var<T> elementwise(Var<T> a, Var<T> b, Binary kind) {
  Graph<T>& g = *a.graph;
  const Tensor<T>& av = a.value();
  const Tensor<T>& bv = b.value();
  auto plan = std::make_shared<BroadcastPlan>(plan_broadcast(av.shape(), bv.shape()));
  Tensor<T> out(plan->out);
  for_each_broadcast(*plan, [&](std::size_t o, std::size_t ia, std::size_t ib) {
    switch (kind) {
      case Binary::add: out[o] = av[ia] + bv[ib]; break;
      case Binary::sub: out[o] = av[ia] - bv[ib]; break;
      case Binary::mul: out[o] = av[ia] * bv[ib]; break;
    }
  });
  const std::size_t a_id = a.id, b_id = b.id;
  return g.record(std::move(out), {a_id, b_id}, [=](Graph<T>& gr, std::size_t self) {
    const Tensor<T>& gout = gr.incoming(self);
    Tensor<T>& ga = gr.grad_slot(a_id);
    Tensor<T>& gb = gr.grad_slot(b_id);
    const Tensor<T>& x = gr.value(a_id);
    const Tensor<T>& y = gr.value(b_id);
    for_each_broadcast(*plan, [&](std::size_t o, std::size_t ia, std::size_t ib) {
      switch (kind) {
        case Binary::add:
          ga[ia] += gout[o];
          gb[ib] += gout[o];
          break;
        case Binary::sub:
          ga[ia] += gout[o];
          gb[ib] -= gout[o];
          break;
        case Binary::mul:
          ga[ia] += gout[o] * y[ib];
          gb[ib] += gout[o] * x[ia];
          break;
      }
    });
  });
}

template <typename T>
Var<T> concat_channels(Var<T> a, Var<T> b) {
  Graph<T>& g = *a.graph;
  const Tensor<T>& av = a.value();
  const Tensor<T>& bv = b.value();
  require(av.rank() == bv.rank() && av.rank() >= 1,
          "concat_channels: rank mismatch " + shape_string(av.shape()) + " vs " +
              shape_string(bv.shape()));
  for (std::size_t i = 0; i + 1 < av.rank(); ++i) {
    require(av.dim(i) == bv.dim(i), "concat_channels: leading extents differ " +
                                        shape_string(av.shape()) + " vs " +
                                        shape_string(bv.shape()));
  }
  const std::size_t ca = av.shape().back(), cb = bv.shape().back();
  Shape shape = av.shape();
  shape.back() = ca + cb;
  Tensor<T> out(shape);
  const std::size_t rows = ca + cb == 0 ? 0 : out.size() / (ca + cb);
  for (std::size_t r = 0; r < rows; ++r) {
    std::copy_n(av.raw() + r * ca, ca, out.raw() + r * (ca + cb));
    std::copy_n(bv.raw() + r * cb, cb, out.raw() + r * (ca + cb) + ca);
  }
  const std::size_t a_id = a.id, b_id = b.id;
  return g.record(std::move(out), {a_id, b_id}, [=](Graph<T>& gr, std::size_t self) {
    const Tensor<T>& gout = gr.incoming(self);
    Tensor<T>& ga = gr.grad_slot(a_id);
    Tensor<T>& gb = gr.grad_slot(b_id);
    for (std::size_t r = 0; r < rows; ++r) {
      for (std::size_t j = 0; j < ca; ++j) ga[r * ca + j] += gout[r * (ca + cb) + j];
      for (std::size_t j = 0; j < cb; ++j) gb[r * cb + j] += gout[r * (ca + cb) + ca + j];
    }
  });
}

template <typename T>
Var<T> reshape(Var<T> input, Shape shape) {
  Graph<T>& g = *input.graph;
  Tensor<T> out = input.value().reshaped(std::move(shape));
  const std::size_t in_id = input.id;
  return g.record(std::move(out), {in_id}, [=](Graph<T>& gr, std::size_t self) {
    const Tensor<T>& gout = gr.incoming(self);
    Tensor<T>& gin = gr.grad_slot(in_id);
    for (std::size_t i = 0; i < gin.size(); ++i) gin[i] += gout[i];
  });
}

template <typename T>
Var<T> cross_entropy(Var<T> probs, std::size_t label) {
  Graph<T>& g = *probs.graph;
  const Tensor<T>& p = probs.value();
  if (label >= p.size()) {
    throw std::out_of_range("cross_entropy: label " + std::to_string(label) +
                            " outside " + std::to_string(p.size()) + " classes");
  }
  const T floor = static_cast<T>(kProbabilityFloor);
  const T clipped = std::max(p[label], floor);
  Tensor<T> out({1}, {-std::log(clipped)});
  const std::size_t p_id = probs.id;
  return g.record(std::move(out), {p_id}, [=](Graph<T>& gr, std::size_t self) {
    const T gout = gr.incoming(self)[0];
    const T pl = gr.value(p_id)[label];
    if (pl > floor) gr.grad_slot(p_id)[label] -= gout / pl;
  });
}

#define DAHAR_INSTANTIATE(T)                                               \
  template class Graph<T>;                                                 \
  template Var<T> conv2d(Var<T>, Var<T>);                                  \
  template Var<T> maxpool2d(Var<T>);                                       \
  template Var<T> global_pool(Var<T>, PoolMode);                           \
  template Var<T> channel_pool(Var<T>, PoolMode);                          \
  template Var<T> dense(Var<T>, Var<T>, std::optional<Var<T>>);            \
  template Var<T> activation(Var<T>, Activation);                          \
  template Var<T> elementwise(Var<T>, Var<T>, Binary);                     \
  template Var<T> concat_channels(Var<T>, Var<T>);                         \
  template Var<T> reshape(Var<T>, Shape);                                  \
  template Var<T> cross_entropy(Var<T>, std::size_t);

DAHAR_INSTANTIATE(float)
DAHAR_INSTANTIATE(double)

#undef DAHAR_INSTANTIATE

}  // namespace dahar

#pragma once

#include <cstddef>
#include <optional>
#include <type_traits>

#include "dahar/autodiff.hpp"
#include "dahar/random.hpp"
#include "dahar/tensor.hpp"

namespace dahar {

/// Learnable pieces of one dual attention block.
///
/// `S` is the slot type: Tensor<T> for stored weights, Var<T> once bound to a
/// graph. The MLP (fc1, fc2) is shared by the max-pooled and avg-pooled
/// branches of the channel gate.
template <typename S>
struct AttentionBlock {
  S fc1;             // C x hidden
  S fc2;             // hidden x C
  S spatial_kernel;  // 3 x 3 x 2 x 1
  std::optional<S> fc1_bias;
  std::optional<S> fc2_bias;

  template <typename F>
  void for_each(F&& f) {
    f(fc1);
    f(fc2);
    f(spatial_kernel);
    if (fc1_bias) f(*fc1_bias);
    if (fc2_bias) f(*fc2_bias);
  }
  template <typename F>
  void for_each(F&& f) const {
    f(fc1);
    f(fc2);
    f(spatial_kernel);
    if (fc1_bias) f(*fc1_bias);
    if (fc2_bias) f(*fc2_bias);
  }

  template <typename F>
  auto map(F&& f) const {
    using R = std::decay_t<std::invoke_result_t<F&, const S&>>;
    AttentionBlock<R> out{f(fc1), f(fc2), f(spatial_kernel), std::nullopt, std::nullopt};
    if (fc1_bias) out.fc1_bias = f(*fc1_bias);
    if (fc2_bias) out.fc2_bias = f(*fc2_bias);
    return out;
  }
};

template <typename T>
using AttentionBlockParams = AttentionBlock<Tensor<T>>;

/// Zero-initialised block for `channels` feature maps.
template <typename T>
AttentionBlockParams<T> make_attention_block(std::size_t channels, std::size_t hidden,
                                             bool bias = false);

/// Fan-scaled uniform weights, zero biases.
template <typename T>
void init_attention_block(AttentionBlockParams<T>& block, Rng& rng);

template <typename T>
AttentionBlock<Var<T>> bind(Graph<T>& g, const AttentionBlockParams<T>& block) {
  return block.map([&](const Tensor<T>& t) { return g.parameter(t); });
}

template <typename T>
struct ChannelAttentionResult {
  Var<T> v_c_max;  // 1 x 1 x C
  Var<T> v_c_avg;  // 1 x 1 x C
  Var<T> a_c;      // 1 x 1 x C
  Var<T> att_c;    // H x W x C
};

template <typename T>
struct SpatialAttentionResult {
  Var<T> att_c_max;  // H x W x 1
  Var<T> att_c_avg;  // H x W x 1
  Var<T> a_s;        // H x W x 1
  Var<T> att_s;      // H x W x C
};

/// Every intermediate of one block, kept for saliency export and tests.
template <typename T>
struct AttentionTrace {
  Var<T> v_c_max, v_c_avg, a_c, att_c;
  Var<T> att_c_max, att_c_avg, a_s, att_s;
  Var<T> f_rm;
};

/// a_c = sigmoid(mlp(gmp(f_m)) + mlp(gap(f_m))), att_c = a_c * f_m.
template <typename T>
ChannelAttentionResult<T> channel_attention(Var<T> f_m, const AttentionBlock<Var<T>>& p);

/// a_s = sigmoid(conv3x3([max_c(att_c), mean_c(att_c)])), att_s = a_s * att_c.
template <typename T>
SpatialAttentionResult<T> spatial_attention(Var<T> att_c, const AttentionBlock<Var<T>>& p);

/// f_rm = att_s + f_m.
template <typename T>
AttentionTrace<T> dual_attention(Var<T> f_m, const AttentionBlock<Var<T>>& p);

}  // namespace dahar

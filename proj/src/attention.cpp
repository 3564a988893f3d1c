#include "dahar/attention.hpp"

#include <string>

#include "dahar/init.hpp"

namespace dahar {

template <typename T>
AttentionBlockParams<T> make_attention_block(std::size_t channels, std::size_t hidden,
                                             bool bias) {
  if (channels == 0 || hidden == 0) {
    throw ShapeError("attention block needs positive channel and hidden widths");
  }
  AttentionBlockParams<T> block{Tensor<T>({channels, hidden}),
                                Tensor<T>({hidden, channels}),
                                Tensor<T>({3, 3, 2, 1}),
                                std::nullopt,
                                std::nullopt};
  if (bias) {
    block.fc1_bias = Tensor<T>({hidden});
    block.fc2_bias = Tensor<T>({channels});
  }
  return block;
}

template <typename T>
void init_attention_block(AttentionBlockParams<T>& block, Rng& rng) {
  const std::size_t c = block.fc1.dim(0), hidden = block.fc1.dim(1);
  fan_scaled_uniform(block.fc1, c, hidden, rng);
  fan_scaled_uniform(block.fc2, hidden, c, rng);
  fan_scaled_uniform(block.spatial_kernel, 18, 9, rng);
  if (block.fc1_bias) block.fc1_bias->fill(T{0});
  if (block.fc2_bias) block.fc2_bias->fill(T{0});
}

namespace {

template <typename T>
Var<T> shared_mlp(Var<T> pooled, const AttentionBlock<Var<T>>& p) {
  Var<T> hidden = relu(dense(pooled, p.fc1, p.fc1_bias));
  Var<T> out = dense(hidden, p.fc2, p.fc2_bias);
  return reshape(out, {1, 1, out.value().size()});
}

}  // namespace

template <typename T>
ChannelAttentionResult<T> channel_attention(Var<T> f_m, const AttentionBlock<Var<T>>& p) {
  const Shape& s = f_m.shape();
  if (s.size() != 3 || s[2] != p.fc1.value().dim(0)) {
    throw ShapeError("channel_attention: feature map " + shape_string(s) +
                     " does not match block width " +
                     std::to_string(p.fc1.value().dim(0)));
  }
  ChannelAttentionResult<T> r;
  r.v_c_max = shared_mlp(global_pool(f_m, PoolMode::max), p);
  r.v_c_avg = shared_mlp(global_pool(f_m, PoolMode::avg), p);
  r.a_c = sigmoid(add(r.v_c_max, r.v_c_avg));
  r.att_c = mul(r.a_c, f_m);
  return r;
}

template <typename T>
SpatialAttentionResult<T> spatial_attention(Var<T> att_c, const AttentionBlock<Var<T>>& p) {
  SpatialAttentionResult<T> r;
  r.att_c_max = channel_pool(att_c, PoolMode::max);
  r.att_c_avg = channel_pool(att_c, PoolMode::avg);
  r.a_s = sigmoid(conv2d(concat_channels(r.att_c_max, r.att_c_avg), p.spatial_kernel));
  r.att_s = mul(r.a_s, att_c);
  return r;
}

template <typename T>
AttentionTrace<T> dual_attention(Var<T> f_m, const AttentionBlock<Var<T>>& p) {
  const ChannelAttentionResult<T> ca = channel_attention(f_m, p);
  const SpatialAttentionResult<T> sa = spatial_attention(ca.att_c, p);
  AttentionTrace<T> t{ca.v_c_max, ca.v_c_avg, ca.a_c,  ca.att_c, sa.att_c_max,
                      sa.att_c_avg, sa.a_s,   sa.att_s, Var<T>{}};
  t.f_rm = add(sa.att_s, f_m);
  return t;
}

#define DAHAR_INSTANTIATE(T)                                                              \
  template AttentionBlockParams<T> make_attention_block<T>(std::size_t, std::size_t, bool); \
  template void init_attention_block(AttentionBlockParams<T>&, Rng&);                   \
  template ChannelAttentionResult<T> channel_attention(Var<T>, const AttentionBlock<Var<T>>&); \
  template SpatialAttentionResult<T> spatial_attention(Var<T>, const AttentionBlock<Var<T>>&); \
  template AttentionTrace<T> dual_attention(Var<T>, const AttentionBlock<Var<T>>&);

DAHAR_INSTANTIATE(float)
DAHAR_INSTANTIATE(double)

#undef DAHAR_INSTANTIATE

}  // namespace dahar

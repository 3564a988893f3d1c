#pragma once

// Naive reference implementations. Nothing here calls into the library's
// numeric code; values travel as plain vectors.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <vector>

#include "dahar/random.hpp"
#include "dahar/tensor.hpp"

namespace oracle {

using Vec = std::vector<double>;

inline Vec random_vec(std::size_t n, dahar::Rng& rng, double lo = -1, double hi = 1) {
  Vec v(n);
  for (double& x : v) x = rng.uniform(lo, hi);
  return v;
}

template <typename T>
dahar::Tensor<T> to_tensor(const Vec& v, dahar::Shape shape) {
  return dahar::Tensor<T>(std::move(shape), std::vector<T>(v.begin(), v.end()));
}

template <typename T>
Vec to_vec(const dahar::Tensor<T>& t) {
  return Vec(t.data().begin(), t.data().end());
}

/// 3x3, stride 1, zero padding 1; input h x w x cin, kernel 3 x 3 x cin x cout.
inline Vec conv3x3(const Vec& in, std::size_t h, std::size_t w, std::size_t cin, const Vec& k,
                   std::size_t cout) {
  Vec out(h * w * cout, 0.0);
  for (std::size_t y = 0; y < h; ++y)
    for (std::size_t x = 0; x < w; ++x)
      for (std::size_t o = 0; o < cout; ++o) {
        double acc = 0;
        for (int dy = -1; dy <= 1; ++dy)
          for (int dx = -1; dx <= 1; ++dx) {
            const long sy = static_cast<long>(y) + dy;
            const long sx = static_cast<long>(x) + dx;
            if (sy < 0 || sx < 0 || sy >= static_cast<long>(h) || sx >= static_cast<long>(w))
              continue;
            for (std::size_t i = 0; i < cin; ++i) {
              const double v = in[(static_cast<std::size_t>(sy) * w + static_cast<std::size_t>(sx)) * cin + i];
              const double kv =
                  k[((static_cast<std::size_t>(dy + 1) * 3 + static_cast<std::size_t>(dx + 1)) * cin + i) * cout + o];
              acc += v * kv;
            }
          }
        out[(y * w + x) * cout + o] = acc;
      }
  return out;
}

/// 2x2 window, stride 2, partial windows at odd edges kept.
inline Vec maxpool2x2(const Vec& in, std::size_t h, std::size_t w, std::size_t c) {
  const std::size_t oh = (h + 1) / 2, ow = (w + 1) / 2;
  Vec out(oh * ow * c);
  for (std::size_t y = 0; y < oh; ++y)
    for (std::size_t x = 0; x < ow; ++x)
      for (std::size_t ch = 0; ch < c; ++ch) {
        double best = -INFINITY;
        for (std::size_t yy = 2 * y; yy < std::min(h, 2 * y + 2); ++yy)
          for (std::size_t xx = 2 * x; xx < std::min(w, 2 * x + 2); ++xx)
            best = std::max(best, in[(yy * w + xx) * c + ch]);
        out[(y * ow + x) * c + ch] = best;
      }
  return out;
}

/// Equal-rank broadcast: extent-1 axes repeat.
inline Vec broadcast(const Vec& a, const dahar::Shape& sa, const Vec& b, const dahar::Shape& sb,
                     const std::function<double(double, double)>& op, dahar::Shape& out_shape) {
  const std::size_t rank = sa.size();
  out_shape.assign(rank, 0);
  for (std::size_t i = 0; i < rank; ++i) out_shape[i] = std::max(sa[i], sb[i]);
  std::size_t total = 1;
  for (std::size_t d : out_shape) total *= d;
  Vec out(total);
  std::vector<std::size_t> idx(rank, 0);
  for (std::size_t n = 0; n < total; ++n) {
    std::size_t ia = 0, ib = 0;
    for (std::size_t i = 0; i < rank; ++i) {
      ia = ia * sa[i] + (sa[i] == 1 ? 0 : idx[i]);
      ib = ib * sb[i] + (sb[i] == 1 ? 0 : idx[i]);
    }
    out[n] = op(a[ia], b[ib]);
    for (std::size_t i = rank; i-- > 0;) {
      if (++idx[i] < out_shape[i]) break;
      idx[i] = 0;
    }
  }
  return out;
}

/// Bilinear sampling with pixel centres at +0.5, edges clamped.
inline Vec bilinear(const std::vector<unsigned char>& in, std::size_t h, std::size_t w,
                    std::size_t c, std::size_t oh, std::size_t ow) {
  auto coord = [](std::size_t o, std::size_t n_in, std::size_t n_out) {
    double s = (static_cast<double>(o) + 0.5) * static_cast<double>(n_in) /
                   static_cast<double>(n_out) -
               0.5;
    return std::clamp(s, 0.0, static_cast<double>(n_in - 1));
  };
  Vec out(oh * ow * c);
  for (std::size_t y = 0; y < oh; ++y) {
    const double sy = coord(y, h, oh);
    const auto y0 = static_cast<std::size_t>(std::floor(sy));
    const std::size_t y1 = std::min(y0 + 1, h - 1);
    const double fy = sy - static_cast<double>(y0);
    for (std::size_t x = 0; x < ow; ++x) {
      const double sx = coord(x, w, ow);
      const auto x0 = static_cast<std::size_t>(std::floor(sx));
      const std::size_t x1 = std::min(x0 + 1, w - 1);
      const double fx = sx - static_cast<double>(x0);
      for (std::size_t ch = 0; ch < c; ++ch) {
        auto px = [&](std::size_t yy, std::size_t xx) {
          return static_cast<double>(in[(yy * w + xx) * c + ch]);
        };
        const double top = px(y0, x0) * (1 - fx) + px(y0, x1) * fx;
        const double bottom = px(y1, x0) * (1 - fx) + px(y1, x1) * fx;
        out[(y * ow + x) * c + ch] = top * (1 - fy) + bottom * fy;
      }
    }
  }
  return out;
}

inline double sigmoid(double v) { return 1.0 / (1.0 + std::exp(-v)); }

/// One GRU step with scalar input, state and weights.
struct ScalarGru {
  double w_r, u_r, w_mu, u_mu, w, u;

  double step(double x, double h) const {
    const double r = sigmoid(w_r * x + u_r * h);
    const double mu = sigmoid(w_mu * x + u_mu * h);
    const double cand = std::tanh(w * x + r * (u * h));
    return (1 - mu) * h + mu * cand;
  }
};

/// out_j = sum_i x_i W[i][j], W stored m x n row-major.
inline Vec matvec(const Vec& x, const Vec& W, std::size_t n) {
  Vec out(n, 0.0);
  for (std::size_t i = 0; i < x.size(); ++i)
    for (std::size_t j = 0; j < n; ++j) out[j] += x[i] * W[i * n + j];
  return out;
}

struct AttentionWeights {
  std::size_t channels = 0, hidden = 0;
  Vec fc1, fc2, spatial;  // c x hidden, hidden x c, 3 x 3 x 2 x 1
};

struct AttentionOut {
  Vec a_c, att_c, a_s, att_s, f_rm;
};

/// Channel gate, spatial gate and residual add on an h x w x c map.
inline AttentionOut dual_attention(const Vec& f, std::size_t h, std::size_t w,
                                   const AttentionWeights& p) {
  const std::size_t c = p.channels;
  Vec mx(c, -INFINITY), avg(c, 0.0);
  for (std::size_t i = 0; i < h * w; ++i)
    for (std::size_t ch = 0; ch < c; ++ch) {
      mx[ch] = std::max(mx[ch], f[i * c + ch]);
      avg[ch] += f[i * c + ch] / static_cast<double>(h * w);
    }
  auto mlp = [&](const Vec& v) {
    Vec hid = matvec(v, p.fc1, p.hidden);
    for (double& x : hid) x = std::max(0.0, x);
    return matvec(hid, p.fc2, c);
  };
  const Vec vm = mlp(mx), va = mlp(avg);
  AttentionOut o;
  o.a_c.resize(c);
  for (std::size_t ch = 0; ch < c; ++ch) o.a_c[ch] = sigmoid(vm[ch] + va[ch]);
  o.att_c.resize(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) o.att_c[i] = f[i] * o.a_c[i % c];

  Vec pooled(h * w * 2);
  for (std::size_t i = 0; i < h * w; ++i) {
    double m = -INFINITY, s = 0;
    for (std::size_t ch = 0; ch < c; ++ch) {
      m = std::max(m, o.att_c[i * c + ch]);
      s += o.att_c[i * c + ch];
    }
    pooled[i * 2] = m;
    pooled[i * 2 + 1] = s / static_cast<double>(c);
  }
  o.a_s = conv3x3(pooled, h, w, 2, p.spatial, 1);
  for (double& v : o.a_s) v = sigmoid(v);
  o.att_s.resize(f.size());
  o.f_rm.resize(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) {
    o.att_s[i] = o.att_c[i] * o.a_s[i / c];
    o.f_rm[i] = o.att_s[i] + f[i];
  }
  return o;
}

struct GruWeights {
  std::size_t hidden = 0;
  Vec w_r, u_r, w_mu, u_mu, w, u;  // input x hidden / hidden x hidden
};

inline Vec gru_step(const Vec& x, const Vec& h, const GruWeights& p) {
  const std::size_t n = p.hidden;
  const Vec xr = matvec(x, p.w_r, n), hr = matvec(h, p.u_r, n);
  const Vec xm = matvec(x, p.w_mu, n), hm = matvec(h, p.u_mu, n);
  const Vec xc = matvec(x, p.w, n), hc = matvec(h, p.u, n);
  Vec out(n);
  for (std::size_t j = 0; j < n; ++j) {
    const double r = sigmoid(xr[j] + hr[j]);
    const double mu = sigmoid(xm[j] + hm[j]);
    const double cand = std::tanh(xc[j] + r * hc[j]);
    out[j] = (1 - mu) * h[j] + mu * cand;
  }
  return out;
}

/// States indexed by original position; `reverse` reads t = n..1.
inline std::vector<Vec> gru_run(const std::vector<Vec>& seq, const GruWeights& p, bool reverse) {
  std::vector<Vec> states(seq.size());
  Vec h(p.hidden, 0.0);
  for (std::size_t k = 0; k < seq.size(); ++k) {
    const std::size_t t = reverse ? seq.size() - 1 - k : k;
    h = gru_step(seq[t], h, p);
    states[t] = h;
  }
  return states;
}

inline std::vector<Vec> bigru(const std::vector<Vec>& seq, const GruWeights& fwd,
                              const GruWeights& bwd) {
  const auto f = gru_run(seq, fwd, false);
  const auto b = gru_run(seq, bwd, true);
  std::vector<Vec> out(seq.size());
  for (std::size_t t = 0; t < seq.size(); ++t) {
    out[t] = f[t];
    out[t].insert(out[t].end(), b[t].begin(), b[t].end());
  }
  return out;
}

/// Bias-corrected Adam on a single scalar.
struct ScalarAdam {
  double lr, b1, b2, eps;
  double m = 0, v = 0;
  int t = 0;

  double step(double p, double g) {
    ++t;
    m = b1 * m + (1 - b1) * g;
    v = b2 * v + (1 - b2) * g * g;
    const double mh = m / (1 - std::pow(b1, t));
    const double vh = v / (1 - std::pow(b2, t));
    return p - lr * mh / (std::sqrt(vh) + eps);
  }
};

/// Central difference of `f` with respect to `x[i]`.
template <typename T>
double central_difference(const std::function<double()>& f, T& x, double step) {
  const T saved = x;
  x = saved + static_cast<T>(step);
  const double up = f();
  x = saved - static_cast<T>(step);
  const double down = f();
  x = saved;
  return (up - down) / (2 * step);
}

/// |a - n| / max(|a|, |n|, floor).
inline double relative_error(double analytic, double numeric, double floor = 1e-6) {
  return std::abs(analytic - numeric) /
         std::max({std::abs(analytic), std::abs(numeric), floor});
}

}  // namespace oracle

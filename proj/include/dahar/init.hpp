#pragma once

#include <cmath>
#include <cstddef>

#include "dahar/random.hpp"
#include "dahar/tensor.hpp"

namespace dahar {

/// Fills `t` from U(-b, b) with b = sqrt(6 / (fan_in + fan_out)).
template <typename T>
void fan_scaled_uniform(Tensor<T>& t, std::size_t fan_in, std::size_t fan_out, Rng& rng) {
  const double bound = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
  for (T& v : t.data()) v = static_cast<T>(rng.uniform(-bound, bound));
}

}  // namespace dahar

#pragma once

#include <algorithm>
#include <cmath>
#include <random>

#include "pldc/core.hpp"
#include "pldc/dataset.hpp"

namespace pldc::testing {

inline double rel_diff(double a, double b) { return std::abs(a - b) / std::max(1.0, std::max(std::abs(a), std::abs(b))); }

/// Gaussian x and y; labels become +-1 when `binary`.
inline Dataset random_instance(std::uint64_t seed, Index n, Index d, bool binary = false) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  RowMatrix x(n, d);
  Vector y(n);
  for (Index i = 0; i < n; ++i) {
    for (Index k = 0; k < d; ++k) x(i, k) = g(rng);
    y[i] = g(rng);
  }
  if (binary) {
    for (Index i = 0; i < n; ++i) y[i] = y[i] >= 0.0 ? 1.0 : -1.0;
    // Both labels present.
    y[0] = 1.0;
    y[1] = -1.0;
  }
  return Dataset(x, y);
}

inline Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<Index>(v.size()));
  Index k = 0;
  for (double x : v) out[k++] = x;
  return out;
}

}  // namespace pldc::testing

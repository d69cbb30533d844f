// Copyright 2026 The semuq Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// Log-space helpers. Everything here is templated on the scalar so the same
// code runs in double for production and long double where callers want
// extra headroom.

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>

namespace semuq {

template <typename T>
constexpr T neg_infinity() {
  return -std::numeric_limits<T>::infinity();
}

// log(exp(a) + exp(b))
template <typename T>
T log_add(T a, T b) {
  if (a < b) std::swap(a, b);
  if (a == neg_infinity<T>()) return a;
  return a + std::log1p(std::exp(b - a));
}

// log(sum_i exp(x_i)). Returns -inf for an empty range.
template <typename T>
T log_sum_exp(std::span<const T> xs) {
  if (xs.empty()) return neg_infinity<T>();
  const T max_x = *std::max_element(xs.begin(), xs.end());
  if (max_x == neg_infinity<T>()) return max_x;
  if (!std::isfinite(max_x)) return max_x;
  T sum = 0;
  for (T x : xs) sum += std::exp(x - max_x);
  return max_x + std::log(sum);
}

// Shannon entropy (nats) of the distribution proportional to exp(log_weights).
// Weights need not be normalized; 0 log 0 is taken as 0.
template <typename T>
T entropy_from_log_weights(std::span<const T> log_weights) {
  const T total = log_sum_exp(log_weights);
  if (!std::isfinite(total)) return T(0);
  T h = 0;
  for (T w : log_weights) {
    if (w == neg_infinity<T>()) continue;
    const T log_p = w - total;
    h -= std::exp(log_p) * log_p;
  }
  return h < T(0) ? T(0) : h;
}

// Entropy (nats) of a probability vector given directly.
template <typename T>
T entropy_from_probs(std::span<const T> probs) {
  T h = 0;
  for (T p : probs) {
    if (p > T(0)) h -= p * std::log(p);
  }
  return h < T(0) ? T(0) : h;
}

// Binary entropy of Bernoulli(p), nats.
template <typename T>
T binary_entropy(T p) {
  const T probs[2] = {p, T(1) - p};
  return entropy_from_probs<T>(probs);
}

// log(1 + exp(x)) without overflow.
template <typename T>
T softplus(T x) {
  return std::max(x, T(0)) + std::log1p(std::exp(-std::abs(x)));
}

template <typename T>
T sigmoid(T x) {
  if (x >= T(0)) return T(1) / (T(1) + std::exp(-x));
  const T e = std::exp(x);
  return e / (T(1) + e);
}

constexpr double kNatsToBits = 1.4426950408889634;  // 1 / ln 2

}  // namespace semuq

#pragma once

// Reference implementations written without reference to the library code.
// They favour obviousness over speed.

#include <cstddef>
#include <set>
#include <vector>

namespace apisum::testing {

using Matrix = std::vector<std::vector<double>>;

// Plain fixed-point iteration of S = (1-d) + d * P^T S with P the
// row-normalized weight matrix; rows with zero sum contribute nothing.
inline std::vector<double> brute_force_textrank(const Matrix& w, double d, int iterations) {
  const std::size_t n = w.size();
  std::vector<double> row_sum(n, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t k = 0; k < n; ++k) row_sum[j] += w[j][k];
  }
  std::vector<double> s(n, 1.0);
  for (int it = 0; it < iterations; ++it) {
    std::vector<double> next(n, 1.0 - d);
    for (std::size_t i = 0; i < n; ++i) {
      double acc = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        if (row_sum[j] == 0.0) continue;
        acc += w[j][i] / row_sum[j] * s[j];
      }
      next[i] += d * acc;
    }
    s = next;
  }
  return s;
}

// {0} u M u {m-1, m+1 : m in M}, restricted to [0, k).
inline std::set<std::size_t> expected_selection(std::size_t k, const std::set<std::size_t>& mentions) {
  std::set<long long> raw{0};
  for (auto m : mentions) {
    raw.insert(static_cast<long long>(m));
    raw.insert(static_cast<long long>(m) - 1);
    raw.insert(static_cast<long long>(m) + 1);
  }
  std::set<std::size_t> out;
  for (auto x : raw) {
    if (x >= 0 && x < static_cast<long long>(k)) out.insert(static_cast<std::size_t>(x));
  }
  return out;
}

}  // namespace apisum::testing

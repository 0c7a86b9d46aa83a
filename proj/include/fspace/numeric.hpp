#pragma once

// Small numeric kernels shared by every norm: exponent handling for p, q in
// (0, inf], deterministic pairwise summation, and l^q aggregation.

#include <cmath>
#include <cstddef>
#include <limits>
#include <span>

namespace fspace {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

inline bool is_inf(double p) { return std::isinf(p); }

// 1/p with 1/inf = 0.
inline double reciprocal(double p) { return is_inf(p) ? 0.0 : 1.0 / p; }

// |x|^p with fast paths for the common exponents.
inline double pow_abs(double x, double p) {
  const double a = std::fabs(x);
  if (p == 2.0) return a * a;
  if (p == 1.0) return a;
  if (a == 0.0) return 0.0;
  return std::pow(a, p);
}

// Sum of term(i) for i in [0, n) using a fixed binary tree over blocks of 64.
// The association order depends only on n, so results are reproducible
// regardless of how callers schedule the work that produced the terms.
template <typename Term>
double pairwise_sum(std::size_t begin, std::size_t end, const Term& term) {
  constexpr std::size_t kBlock = 64;
  if (end - begin <= kBlock) {
    double s = 0.0;
    for (std::size_t i = begin; i < end; ++i) s += term(i);
    return s;
  }
  const std::size_t mid = begin + (end - begin) / 2;
  return pairwise_sum(begin, mid, term) + pairwise_sum(mid, end, term);
}

template <typename Term>
double pairwise_sum(std::size_t n, const Term& term) {
  return pairwise_sum(std::size_t{0}, n, term);
}

inline double pairwise_sum(std::span<const double> values) {
  return pairwise_sum(values.size(), [&](std::size_t i) { return values[i]; });
}

// (sum_i |t_i|^q)^(1/q), max_i |t_i| when q = inf.
inline double lq_aggregate(std::span<const double> terms, double q) {
  if (terms.empty()) return 0.0;
  if (is_inf(q)) {
    double m = 0.0;
    for (double t : terms) m = std::fmax(m, std::fabs(t));
    return m;
  }
  const double s = pairwise_sum(terms.size(), [&](std::size_t i) { return pow_abs(terms[i], q); });
  return s == 0.0 ? 0.0 : std::pow(s, 1.0 / q);
}

}  // namespace fspace

#pragma once

// Finite differences, moduli of smoothness, the dyadic difference seminorm,
// growth diagnostics for membership questions, and the Hoelder and W^1_p norms.

#include <string>
#include <vector>

#include <json.hpp>

#include "fspace/grid.hpp"

namespace fspace::diff {

// M-th forward difference with step k * 2^-L along `axis`, on the box shrunk
// by M k 2^-L on the right of that axis. M is 1 or 2.
GridFunction difference(const GridFunction& f, int M, std::size_t k, int axis = 0);
// Same with a real step h; rejected unless h is a positive multiple of 2^-L.
GridFunction difference_h(const GridFunction& f, int M, double h, int axis = 0);

// profile[k-1] = max over axes of || Delta^M_{k 2^-L} f | L_p || for k = 1..k_max.
std::vector<double> difference_profile(const GridFunction& f, int M, double p, std::size_t k_max);

// Sup over grid steps 0 < h <= t (axis directions) of the L_p norm of the
// M-th difference. t must be a grid multiple.
double modulus(const GridFunction& f, int M, double p, double t);

enum class Verdict { Bounded, PowerGrowth, Inconclusive };
std::string to_string(Verdict v);

// Evidence for membership of f in a smoothness space from partial quasi-norms.
struct GrowthReport {
  int j0 = 0;
  std::vector<double> a;  // a_j = 2^{js} omega(2^-j), j = j0..J
  std::vector<double> S;  // l^q partial sums S_J, J = j0..J
  double slope = 0.0;     // fitted exponent of S_J against (J - j0 + 1)
  double r2 = 0.0;
  Verdict verdict = Verdict::Inconclusive;
  double alpha = 0.0;     // slope, when verdict is power-growth
};

// Fixed thresholds of the verdict rule.
inline constexpr double kBoundedCap = 1.1;
inline constexpr double kSlopeFloor = 0.05;
inline constexpr double kR2Floor = 0.9;
inline constexpr int kTailWindow = 3;

// Verdict from partial sums: bounded when S_J / S_J0 <= 1.1 for all J >= J0,
// J0 = max(j0, Jmax - 3); otherwise power-growth when the log2-log2 regression
// of S_J against J - j0 + 1 has slope > 0.05 and R^2 >= 0.9; otherwise inconclusive.
GrowthReport growth_report(std::vector<double> a, double q, int j0);

struct SeminormResult {
  double value = 0.0;
  GrowthReport report;
};

// l^q aggregation over j = j0..J of 2^{j sigma} modulus(f, M, p, 2^-j); 0 < sigma < M, J <= L.
SeminormResult besov_diff_seminorm(const GridFunction& f, double sigma, int M, double p, double q, int j0, int J);

// Same aggregation read as a membership diagnostic for smoothness s.
GrowthReport membership_diagnostic(const GridFunction& f, double s, double p, double q, int M, int j0, int J);

// ||f||_inf + sup over node pairs with 0 < |x-y| <= 1 of |f(x)-f(y)| / |x-y|^s.
double holder_norm(const GridFunction& f, double s);

// lp_norm(f, p) plus, per axis, the L_p norm of the forward-difference
// gradient: each difference quotient is integrated exactly over its cell
// along the axis, with trapezoid weights across the other axes.
double w1p_norm(const GridFunction& f, double p);

nlohmann::json to_json(const GrowthReport& r);

}  // namespace fspace::diff

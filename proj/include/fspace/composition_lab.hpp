#pragma once

// Lipschitz scaling functions g, the operators g o f and |g| o f, inverse
// scalers and the composition experiments.

#include <functional>
#include <string>
#include <vector>

#include <json.hpp>

#include "fspace/differences.hpp"
#include "fspace/grid.hpp"
#include "fspace/spaces.hpp"
#include "fspace/truncation_lab.hpp"

namespace fspace::comp {

enum class ScalerKind { Linear, Sinusoidal, Table, Custom };
std::string to_string(ScalerKind k);

// Strictly increasing g with g(0) = 0 and claimed slope bounds
// L1 (t2 - t1) <= g(t2) - g(t1) <= L2 (t2 - t1).
class LipschitzScaler {
 public:
  // g(t) = a t, a > 0.
  static LipschitzScaler linear(double a);
  // g(t) = a t + b sin t, a > |b|; L1 = a - |b|, L2 = a + |b|.
  static LipschitzScaler sinusoidal(double a, double b);
  // Piecewise linear through (nodes[i], values[i]), extended linearly beyond
  // the end nodes. Claimed bounds are the extreme segment slopes.
  static LipschitzScaler table(std::vector<double> nodes, std::vector<double> values);
  // Any callable with caller-supplied bounds; not serializable.
  static LipschitzScaler custom(std::function<double(double)> g, double l1, double l2, std::string name = "custom");

  double operator()(double t) const { return eval_(t); }
  double l1() const { return l1_; }
  double l2() const { return l2_; }
  ScalerKind kind() const { return kind_; }
  const std::string& name() const { return name_; }

  // {"kind":"linear","a":..} | {"kind":"sinusoidal","a":..,"b":..} | {"kind":"table","nodes":[..],"values":[..]}
  nlohmann::json to_json() const;
  static LipschitzScaler from_json(const nlohmann::json& j);

 private:
  ScalerKind kind_ = ScalerKind::Linear;
  std::string name_;
  double l1_ = 1.0, l2_ = 1.0;
  std::vector<double> params_, nodes_, values_;
  std::function<double(double)> eval_;
};

struct ScalerBounds {
  double l1 = 0.0, l2 = 0.0;  // extreme divided differences on the validation grid
};
// Divided differences over consecutive points lo, lo + step, ..., hi (0 is
// added to the grid). Throws ValidationError when |g(0)| > 1e-12, when a slope
// is <= 0, or when a slope leaves [L1 (1 - 1e-9), L2 (1 + 1e-9)].
ScalerBounds validate_scaler(const LipschitzScaler& g, double lo, double hi, double step);

GridFunction compose(const LipschitzScaler& g, const GridFunction& f);
GridFunction abs_compose(const LipschitzScaler& g, const GridFunction& f);

// Bisection on [-|tau|/L1, |tau|/L1] to machine resolution; throws
// ValidationError when the interval does not bracket tau or |g(t) - tau| > tol.
double invert_scaler(const LipschitzScaler& g, double tau, double tol = 1e-10);

struct LpBounds {
  double norm_f = 0.0, norm_gf = 0.0, norm_abs_gf = 0.0;
  double residual = 0.0;         // | ||g o f|| - |||g| o f|| |
  bool lower_ok = true, upper_ok = true;  // L1 ||f|| <= ||g o f|| <= L2 ||f||, relative slack 1e-12
  std::size_t pointwise_violations = 0;   // samples with |g(f)| outside [L1 |f|, L2 |f|]
};
LpBounds lp_bounds_check(const LipschitzScaler& g, const GridFunction& f, double p);

// L1 [f] <= [g o f] <= L2 [f] at every dyadic cube, with 8 ulp relative slack.
lab::BracketCheck bracket_composition_check(const LipschitzScaler& g, const GridFunction& f);

// Sampled g' (central differences) on a level-`level` grid over an integer box
// around [lo, hi], diagnosed in the difference seminorm with sigma = 1/p, M = 1, q = inf.
struct GPrimeReport {
  double p = 2.0;
  double seminorm = 0.0;
  diff::GrowthReport growth;
  bool finite = false;  // verdict bounded
};
GPrimeReport gprime_check(const LipschitzScaler& g, double p, double lo, double hi, int level = 10);

enum class Slot { Compose, AbsCompose };
std::string to_string(Slot s);
Slot parse_slot(const std::string& name);

// Ratios norm(g o f) / norm(f) or norm(|g| o f) / norm(f) with the
// composition verdict. The scaler is validated over the corpus range widened
// by 10% first. Under oscillation norms the term-wise bracket sandwich is
// counted into extra. For B spaces with 1 < p < inf the measured constant
// max ||g o f|| / (G ||f||) is reported, G = sup |g| on the range plus the
// M = 2 difference seminorm of g with sigma = 1 + 1/p, q = 1.
lab::EquivalenceReport composition_experiment(const std::vector<GridFunction>& corpus, const LipschitzScaler& g,
                                              lab::NormKind kind, const spaces::SpaceParams& sp,
                                              Slot slot = Slot::Compose);

}  // namespace fspace::comp

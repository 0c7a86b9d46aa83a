#pragma once

// Tensor Haar system on dyadic cubes and its discrete sequence quasi-norm.
//
// A type vector G in {F, M}^n is stored as a bitmask: bit l set means the
// l-th factor is the mother step h_M. At level 0 every mask is allowed; at
// levels j >= 1 the all-F mask is excluded.

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "fspace/grid.hpp"

namespace fspace::haar {

using Mask = std::uint32_t;

std::string mask_to_string(Mask g, int n);
Mask mask_from_string(const std::string& text);
bool valid_mask(int j, Mask g, int n);

// h_F = 1 on [0,1); h_M = 1 on [0,1/2), -1 on [1/2,1); both 0 elsewhere.
double h_F(double y);
double h_M(double y);

double haar_eval(int j, Mask g, std::span<const std::int64_t> m, std::span<const double> x);

// Coefficients lambda^{j,G}_m for cubes Q_{j,m} inside an integer cube box.
// Storage is dense per (level, mask) and allocated on first write; absent
// levels read as zero.
class HaarCoeffs {
 public:
  HaarCoeffs() = default;
  HaarCoeffs(int dim, int max_level, std::vector<std::int64_t> corner, std::int64_t side);

  int dim() const { return dim_; }
  int max_level() const { return max_level_; }
  const std::vector<std::int64_t>& corner() const { return corner_; }
  std::int64_t side() const { return side_; }

  // Cubes per axis at level j, and in total.
  std::size_t per_axis(int j) const { return static_cast<std::size_t>(side_) << j; }
  std::size_t cube_count(int j) const;

  // Absolute cube index m; zero outside the box or above max_level.
  double get(int j, Mask g, std::span<const std::int64_t> m) const;
  void set(int j, Mask g, std::span<const std::int64_t> m, double value);

  // Dense values over cubes at (j, g), flattened row-major relative to the box
  // corner. Empty when nothing was stored.
  std::span<const double> level(int j, Mask g) const;
  std::vector<double>& level_mut(int j, Mask g);

  // Absolute cube index of flat position k at level j.
  void cube_index(int j, std::size_t k, std::span<std::int64_t> m) const;

  // Highest level holding a nonzero coefficient, -1 if none.
  int highest_nonzero_level() const;
  std::size_t nonzero_count() const;

 private:
  std::size_t flat(int j, std::span<const std::int64_t> m, bool& inside) const;
  void check(int j, Mask g) const;

  int dim_ = 1;
  int max_level_ = 0;
  std::vector<std::int64_t> corner_;
  std::int64_t side_ = 1;
  std::map<int, std::vector<std::vector<double>>> levels_;  // level -> mask -> dense values
};

// lambda^{j,G}_m = 2^{jn} (f, h^j_{G,m}) for j <= J, where f is read as the step
// function whose value on each level-L cell is its lower-left sample. Exact up
// to floating summation; levels j >= L vanish identically.
HaarCoeffs analyze(const GridFunction& f, int J);

// Pointwise sum of lambda h at every node of the level-L grid on the
// coefficients' box (half-open cells, right faces read 0). Requires L above
// every level that carries a nonzero coefficient.
GridFunction synthesize(const HaarCoeffs& c, int L);

// f_j = sum_m h^j_{(M..M),m} over the unit cube, sampled at level L >= j+1.
GridFunction alternating_haar_sum(int j, int n, int L);

// (sum_j 2^{j(s-n/p)q} sum_G (sum_m |lambda|^p)^{q/p})^{1/q}, sup forms at infinity.
double b_sequence_norm(const HaarCoeffs& c, double s, double p, double q);

// max(n(1/p-1), 1/p-1) < s < min(1/p, 1).
bool in_isomorphism_range(double s, double p, int n);

nlohmann::json to_json(const HaarCoeffs& c);
HaarCoeffs haar_coeffs_from_json(const nlohmann::json& j);

}  // namespace fspace::haar

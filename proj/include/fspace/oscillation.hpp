#pragma once

// Oscillation brackets over dyadic cubes and the norms built from them.
//
// Cubes are closed: the sample set of Q_{j,m} is every node in
// 2^-j m + [0, 2^-j]^n, so neighbouring cubes share their face nodes. Only
// cubes lying entirely inside the grid box are used.

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "fspace/grid.hpp"

namespace fspace::osc {

struct OscArray {
  int level = 0;
  std::vector<std::int64_t> first;  // absolute cube index m of the first cube per axis
  std::vector<std::size_t> counts;  // cubes per axis
  std::vector<double> bracket;      // sup - inf over the closed cube
  std::vector<double> min_abs;      // min |f| over the closed cube

  int dim() const { return static_cast<int>(counts.size()); }
  std::size_t size() const { return bracket.size(); }
  // Absolute cube index of flat entry i (row-major, last axis fastest).
  std::vector<std::int64_t> index(std::size_t i) const;
  // Flat entry of absolute cube index m; throws ValidationError when outside.
  std::size_t flat(std::span<const std::int64_t> m) const;
};

// Brackets at level j, 0 <= j <= L.
OscArray osc_brackets(const GridFunction& f, int j);
// Brackets at every level 0..J, computed bottom-up from level L. J = -1 means L.
std::vector<OscArray> osc_pyramid(const GridFunction& f, int J = -1);

// Best degree-M approximation error per cube at level j, in the order of
// osc_brackets(f, j). (M = 0, u = inf) is half the bracket. u = 2 is the root
// mean square residual of the least-squares fit of degree M over the cube's
// samples with uniform weights. Other (M, u) are rejected.
std::vector<double> osc_poly(const GridFunction& f, int M, double u, int j);

struct OscNorm {
  double value = 0.0;
  double lp_part = 0.0;
  double bracket_part = 0.0;
  // Norm with levels up to L minus the norm with levels up to L - 1.
  double tail = 0.0;
  // Whether s lies in the parameter window where the norm characterizes the space.
  bool in_window = false;
};

// lp_norm(f, p) + (sum_j 2^{j(s-n/p)q} (sum_m [f]_{j,m}^p)^{q/p})^{1/q}, j = 0..L.
double b_osc_norm(const GridFunction& f, double s, double p, double q);
OscNorm b_osc_norm_detail(const GridFunction& f, double s, double p, double q);

// lp_norm(f, p) + || (sum_j 2^{jsq} [f]_{j,m_j(x)}^q)^{1/q} | L_p ||. The inner
// function is constant on open level-L cells and is integrated exactly.
double f_osc_norm(const GridFunction& f, double s, double p, double q);
OscNorm f_osc_norm_detail(const GridFunction& f, double s, double p, double q);

// Rows j,m0,...,m{n-1},bracket,min_abs.
void write_csv(std::ostream& out, const OscArray& a);

}  // namespace fspace::osc

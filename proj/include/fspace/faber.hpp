#pragma once

// One-dimensional Faber (hat) system: second-difference coefficients,
// synthesis, and the discrete B and F quasi-norms built from them.

#include <cstdint>
#include <map>
#include <span>
#include <vector>

#include <json.hpp>

#include "fspace/grid.hpp"

namespace fspace::faber {

enum class Domain { UnitInterval, RealLine };

std::string to_string(Domain d);
Domain parse_domain(const std::string& name);

// Tent of height 1 on [2^-j m, 2^-j (m+1)], peak at the midpoint.
double hat_eval(int j, std::int64_t m, double x);

// d_{j,m} = f(2^-j (m+1)) - 2 f(2^-j m + 2^-j-1) + f(2^-j m), for the hats
// whose support lies in the box [corner, corner + side].
class FaberCoeffs {
 public:
  FaberCoeffs() = default;
  FaberCoeffs(Domain domain, int max_level, std::int64_t corner, std::int64_t side);

  Domain domain() const { return domain_; }
  int max_level() const { return max_level_; }
  std::int64_t corner() const { return corner_; }
  std::int64_t side() const { return side_; }

  // m runs over [corner 2^j, (corner + side) 2^j).
  std::int64_t first_index(int j) const { return corner_ << j; }
  std::size_t count(int j) const { return static_cast<std::size_t>(side_) << j; }

  double get(int j, std::int64_t m) const;
  void set(int j, std::int64_t m, double value);
  std::span<const double> level(int j) const;
  std::vector<double>& level_mut(int j);

  int highest_nonzero_level() const;

 private:
  Domain domain_ = Domain::UnitInterval;
  int max_level_ = 0;
  std::int64_t corner_ = 0;
  std::int64_t side_ = 1;
  std::map<int, std::vector<double>> levels_;
};

// Exact node arithmetic for j = 0..J, J <= L-1. Unit-interval kind needs box
// [0,1] with f(0) = f(1) = 0; real-line kind needs f(k) = 0 at every integer
// node of the box. Boundary values beyond 1e-12 are rejected naming the node.
FaberCoeffs faber_analyze(const GridFunction& f, int J, Domain domain = Domain::UnitInterval);

// -1/2 sum d_{j,m} v_{j,m} at every node of the level-L grid on the box, L >= J+1.
GridFunction faber_synthesize(const FaberCoeffs& c, int L);

enum class Assembly { Global, PerUnitInterval };

// (sum_j 2^{j(s-1/p)q} (sum_m |d_{j,m}|^p)^{q/p})^{1/q}. PerUnitInterval sums
// the p-th powers interval by interval and requires p = q.
double b_faber_norm(const FaberCoeffs& c, double s, double p, double q, Assembly mode = Assembly::Global);

// || (sum_j sum_m 2^{jsq} |d_{j,m}|^q chi_{j,m})^{1/q} | L_p ||. The integrand is
// constant on level-J cells and is integrated exactly over level-`level` cells
// (level >= J, default J).
double f_faber_norm(const FaberCoeffs& c, double s, double p, double q, int level = -1);

// Parameter windows of the Faber characterizations (advisory).
bool b_window(double s, double p);
bool f_window(double s, double p, double q);

struct HomogeneityResult {
  double ratio = 1.0;
  bool zero_input = false;
};

// f supported in [0, 2^-J]: b_faber_norm(f(2^-J .)) / (2^{-J(s-1/p)} b_faber_norm(f)),
// both sides with real-line analysis at the finest admissible level.
HomogeneityResult homogeneity_ratio(const GridFunction& f, int J, double s, double p, double q);

nlohmann::json to_json(const FaberCoeffs& c);
FaberCoeffs faber_coeffs_from_json(const nlohmann::json& j);

}  // namespace fspace::faber

#pragma once

// Uniform dyadic grids and the functions sampled on them.
//
// A grid at level L has spacing 2^-L. Nodes are addressed by integer offsets
// from the origin node; coordinates are (origin + i) * 2^-L per axis, which is
// exact in binary floating point. Boxes are closed: both end nodes are stored.
// Flat sample order is row-major (last axis fastest).

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

namespace fspace {

class Grid {
 public:
  Grid() = default;
  // origin[l] is the node index of the first node along axis l (coordinate origin[l] * 2^-L).
  Grid(int level, std::vector<std::int64_t> origin, std::vector<std::size_t> counts);

  // The closed cube [corner, corner + side]^dim sampled at level L.
  static Grid cube(int dim, int level, std::span<const std::int64_t> corner, std::int64_t side);
  static Grid cube(int dim, int level, std::int64_t corner, std::int64_t side);

  int dim() const { return static_cast<int>(counts_.size()); }
  int level() const { return level_; }
  double spacing() const;
  std::int64_t cells_per_unit() const { return std::int64_t{1} << level_; }

  std::int64_t origin(int axis) const { return origin_[axis]; }
  std::size_t count(int axis) const { return counts_[axis]; }
  const std::vector<std::int64_t>& origins() const { return origin_; }
  const std::vector<std::size_t>& counts() const { return counts_; }
  std::size_t size() const;
  std::size_t stride(int axis) const { return strides_[axis]; }

  double coordinate(int axis, std::size_t i) const;
  std::size_t flat(std::span<const std::size_t> index) const;
  void unravel(std::size_t flat, std::span<std::size_t> index) const;

  // Trapezoid-type quadrature weight of a node: 2^-Ln, halved once per box face it lies on.
  double node_weight(std::span<const std::size_t> index) const;

  // True when every axis starts and ends on an integer coordinate.
  bool unit_aligned() const;
  // True when unit aligned and all axes have the same extent (a cube box).
  bool is_cube() const;
  // Integer corner and side of a cube box; throws ValidationError otherwise.
  std::vector<std::int64_t> corner() const;
  std::int64_t side() const;

  bool operator==(const Grid& other) const {
    return level_ == other.level_ && origin_ == other.origin_ && counts_ == other.counts_;
  }

 private:
  void compute_strides();

  int level_ = 0;
  std::vector<std::int64_t> origin_;
  std::vector<std::size_t> counts_;
  std::vector<std::size_t> strides_;
};

class GridFunction {
 public:
  GridFunction() = default;
  GridFunction(Grid grid, std::vector<double> samples, std::string tag = {});

  const Grid& grid() const { return grid_; }
  int dim() const { return grid_.dim(); }
  int level() const { return grid_.level(); }
  std::size_t size() const { return samples_.size(); }
  std::span<const double> samples() const { return samples_; }
  double operator[](std::size_t i) const { return samples_[i]; }
  const std::string& tag() const { return tag_; }
  GridFunction with_tag(std::string tag) const;

  // Applies op to every sample, keeping the grid.
  GridFunction map(const std::function<double(double)>& op, std::string tag = {}) const;

  // Combinable only on identical grids.
  bool combinable(const GridFunction& other) const { return grid_ == other.grid_; }
  GridFunction operator+(const GridFunction& other) const;
  GridFunction operator-(const GridFunction& other) const;
  GridFunction operator*(double c) const;

  double min() const;
  double max() const;

 private:
  Grid grid_;
  std::vector<double> samples_;
  std::string tag_;
};

using Generator = std::function<double(std::span<const double>)>;
using Generator1D = std::function<double(double)>;

// samples[m] = generator(node m). Non-finite values are rejected naming the node.
GridFunction sample(const Generator& generator, const Grid& grid, std::string tag = {});
GridFunction sample(const Generator& generator, int level, std::int64_t corner, std::int64_t side, int dim,
                    std::string tag = {});
GridFunction sample(const Generator1D& generator, int level, std::int64_t corner, std::int64_t side,
                    std::string tag = {});

// Riemann sum with trapezoid face weights; p = inf gives max |sample|.
double lp_norm(const GridFunction& f, double p);

enum class CorpusKind { PiecewiseLinearRandomKnots, SmoothBumpSum, HaarStep, SignOscillating };

std::string to_string(CorpusKind kind);
CorpusKind parse_corpus_kind(const std::string& name);

struct CorpusSpec {
  std::uint64_t seed = 0;
  std::size_t count = 1;
  CorpusKind kind = CorpusKind::PiecewiseLinearRandomKnots;
  double amplitude_lo = -1.0;
  double amplitude_hi = 1.0;
  bool zero_mean = false;
  // Resolution of the random structure: knot level for piecewise-linear, cell
  // level for haar-step, maximal frequency level for sign-oscillating, and
  // the number of bumps per unit cube for smooth-bump-sum.
  int structure_level = 3;
};

// Equal specs produce bit-identical corpora.
// Piecewise-linear, bump and oscillating kinds vanish on every integer
// hyperplane, so their 1-d slices satisfy f(k) = 0 at integers.
std::vector<GridFunction> generate_corpus(const CorpusSpec& spec, const Grid& grid);
std::vector<GridFunction> generate_corpus(const CorpusSpec& spec, int level, std::int64_t corner,
                                          std::int64_t side, int dim);

// Serialization: {dim, level, box:{corner, side}, samples, tag}. Cube boxes
// write an integer corner array and scalar side; other boxes write per-axis
// real corner and side arrays.
nlohmann::json to_json(const GridFunction& f);
GridFunction grid_function_from_json(const nlohmann::json& j);
nlohmann::json to_json(const CorpusSpec& spec);
CorpusSpec corpus_spec_from_json(const nlohmann::json& j);

// One node per row: x0,...,x{n-1},value.
void write_csv(std::ostream& out, const GridFunction& f);

}  // namespace fspace

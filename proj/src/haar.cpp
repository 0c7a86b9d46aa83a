#include "fspace/haar.hpp"

#include <algorithm>
#include <cmath>

#include "fspace/error.hpp"
#include "fspace/numeric.hpp"
#include "fspace/parallel.hpp"

namespace fspace::haar {

std::string mask_to_string(Mask g, int n) {
  std::string out(n, 'F');
  for (int l = 0; l < n; ++l)
    if ((g >> l) & 1U) out[l] = 'M';
  return out;
}

Mask mask_from_string(const std::string& text) {
  if (text.empty() || text.size() > 16) throw ValidationError("Haar type vector must have 1 to 16 letters");
  Mask g = 0;
  for (std::size_t l = 0; l < text.size(); ++l) {
    if (text[l] == 'M')
      g |= Mask{1} << l;
    else if (text[l] != 'F')
      throw ValidationError("Haar type vector letters must be F or M, got '" + text + "'");
  }
  return g;
}

bool valid_mask(int j, Mask g, int n) {
  if (n < 1 || n > 16 || j < 0) return false;
  if (g >= (Mask{1} << n)) return false;
  return j == 0 || g != 0;
}

double h_F(double y) { return (y >= 0.0 && y < 1.0) ? 1.0 : 0.0; }

double h_M(double y) {
  if (y >= 0.0 && y < 0.5) return 1.0;
  if (y >= 0.5 && y < 1.0) return -1.0;
  return 0.0;
}

double haar_eval(int j, Mask g, std::span<const std::int64_t> m, std::span<const double> x) {
  double v = 1.0;
  for (std::size_t l = 0; l < x.size() && v != 0.0; ++l) {
    const double y = std::ldexp(x[l], j) - static_cast<double>(m[l]);
    v *= ((g >> l) & 1U) ? h_M(y) : h_F(y);
  }
  return v;
}

// ---------------------------------------------------------------------------

HaarCoeffs::HaarCoeffs(int dim, int max_level, std::vector<std::int64_t> corner, std::int64_t side)
    : dim_(dim), max_level_(max_level), corner_(std::move(corner)), side_(side) {
  if (dim_ < 1 || dim_ > 16) throw ValidationError("Haar dimension must lie in [1, 16]");
  if (max_level_ < 0 || max_level_ > 30) throw ValidationError("Haar max level must lie in [0, 30]");
  if (static_cast<int>(corner_.size()) != dim_) throw ValidationError("box corner needs one entry per axis");
  if (side_ < 1) throw ValidationError("box side must be at least 1");
}

std::size_t HaarCoeffs::cube_count(int j) const {
  std::size_t c = 1;
  for (int l = 0; l < dim_; ++l) c *= per_axis(j);
  return c;
}

void HaarCoeffs::check(int j, Mask g) const {
  if (!valid_mask(j, g, dim_))
    throw ValidationError("invalid Haar type " + mask_to_string(g, dim_) + " at level " + std::to_string(j));
}

std::size_t HaarCoeffs::flat(int j, std::span<const std::int64_t> m, bool& inside) const {
  const auto k = static_cast<std::int64_t>(per_axis(j));
  std::size_t f = 0;
  inside = static_cast<int>(m.size()) == dim_;
  for (int l = 0; l < dim_ && inside; ++l) {
    const std::int64_t rel = m[l] - corner_[l] * (std::int64_t{1} << j);
    if (rel < 0 || rel >= k) inside = false;
    f = f * static_cast<std::size_t>(k) + static_cast<std::size_t>(rel);
  }
  return f;
}

double HaarCoeffs::get(int j, Mask g, std::span<const std::int64_t> m) const {
  if (j < 0 || j > max_level_ || !valid_mask(j, g, dim_)) return 0.0;
  const auto values = level(j, g);
  if (values.empty()) return 0.0;
  bool inside = false;
  const std::size_t k = flat(j, m, inside);
  return inside ? values[k] : 0.0;
}

void HaarCoeffs::set(int j, Mask g, std::span<const std::int64_t> m, double value) {
  if (j < 0 || j > max_level_) throw ValidationError("Haar level " + std::to_string(j) + " outside [0, J]");
  check(j, g);
  bool inside = false;
  const std::size_t k = flat(j, m, inside);
  if (!inside) throw ValidationError("Haar cube index outside the coefficient box");
  level_mut(j, g)[k] = value;
}

std::span<const double> HaarCoeffs::level(int j, Mask g) const {
  const auto it = levels_.find(j);
  if (it == levels_.end() || g >= it->second.size()) return {};
  return it->second[g];
}

std::vector<double>& HaarCoeffs::level_mut(int j, Mask g) {
  if (j < 0 || j > max_level_) throw ValidationError("Haar level " + std::to_string(j) + " outside [0, J]");
  check(j, g);
  auto& masks = levels_[j];
  if (masks.empty()) masks.resize(std::size_t{1} << dim_);
  auto& values = masks[g];
  if (values.empty()) values.assign(cube_count(j), 0.0);
  return values;
}

void HaarCoeffs::cube_index(int j, std::size_t k, std::span<std::int64_t> m) const {
  const std::size_t per = per_axis(j);
  for (int l = dim_ - 1; l >= 0; --l) {
    m[l] = corner_[l] * (std::int64_t{1} << j) + static_cast<std::int64_t>(k % per);
    k /= per;
  }
}

int HaarCoeffs::highest_nonzero_level() const {
  for (auto it = levels_.rbegin(); it != levels_.rend(); ++it)
    for (const auto& values : it->second)
      if (std::any_of(values.begin(), values.end(), [](double v) { return v != 0.0; })) return it->first;
  return -1;
}

std::size_t HaarCoeffs::nonzero_count() const {
  std::size_t c = 0;
  for (const auto& [j, masks] : levels_)
    for (const auto& values : masks)
      c += static_cast<std::size_t>(std::count_if(values.begin(), values.end(), [](double v) { return v != 0.0; }));
  return c;
}

// ---------------------------------------------------------------------------

namespace {

// Per-axis child offset of child number e (bit l of e is the offset along axis l).
inline std::size_t child_flat(std::size_t parent, int n, std::size_t parent_per_axis, unsigned e) {
  // parent is row-major over parent_per_axis^n; the child lives in (2*per)^n.
  std::size_t idx[16];
  std::size_t rem = parent;
  for (int l = n - 1; l >= 0; --l) {
    idx[l] = rem % parent_per_axis;
    rem /= parent_per_axis;
  }
  std::size_t f = 0;
  const std::size_t child_per_axis = 2 * parent_per_axis;
  for (int l = 0; l < n; ++l) f = f * child_per_axis + 2 * idx[l] + ((e >> l) & 1U);
  return f;
}

// Product over M-axes of +1 (lower half) or -1 (upper half).
inline double child_sign(Mask g, unsigned e) {
  return (__builtin_popcount(g & e) & 1) ? -1.0 : 1.0;
}

}  // namespace

HaarCoeffs analyze(const GridFunction& f, int J) {
  const Grid& grid = f.grid();
  const int L = grid.level();
  const int n = grid.dim();
  if (J < 0) throw ValidationError("Haar analysis level must be nonnegative");
  if (J > L) throw ValidationError("Haar analysis level J = " + std::to_string(J) + " exceeds grid level L = " +
                                   std::to_string(L) + "; quadrature would be inexact");
  if (!grid.is_cube()) throw ValidationError("Haar analysis needs an integer cube box");
  if (n > 16) throw ValidationError("Haar analysis supports at most 16 dimensions");
  HaarCoeffs c(n, J, grid.corner(), grid.side());

  // Block sums S_j over level-j cubes, built from level-L cell values.
  const auto cells_per_axis = static_cast<std::size_t>(grid.side()) << L;
  std::size_t cells = 1;
  for (int l = 0; l < n; ++l) cells *= cells_per_axis;
  std::vector<double> sums(cells);
  {
    std::vector<std::size_t> node(n);
    for (std::size_t k = 0; k < cells; ++k) {
      std::size_t rem = k;
      for (int l = n - 1; l >= 0; --l) {
        node[l] = rem % cells_per_axis;
        rem /= cells_per_axis;
      }
      sums[k] = f[grid.flat(node)];
    }
  }

  const unsigned children = 1U << n;
  for (int j = L - 1; j >= 0; --j) {
    const std::size_t per = c.per_axis(j);
    const std::size_t count = c.cube_count(j);
    std::vector<double> parent(count);
    const bool keep = j <= J;
    const double weight = std::ldexp(1.0, (j - L) * n);
    std::vector<std::vector<double>*> out(children, nullptr);
    if (keep)
      for (Mask g = (j == 0 ? 0 : 1); g < children; ++g) out[g] = &c.level_mut(j, g);
    parallel::parallel_for(count, [&](std::size_t k) {
      double child[64];
      std::vector<double> big;
      double* vals = child;
      if (children > 64) {
        big.resize(children);
        vals = big.data();
      }
      double total = 0.0;
      for (unsigned e = 0; e < children; ++e) {
        vals[e] = sums[child_flat(k, n, per, e)];
        total += vals[e];
      }
      parent[k] = total;
      if (!keep) return;
      for (Mask g = (j == 0 ? 0 : 1); g < children; ++g) {
        double acc = 0.0;
        for (unsigned e = 0; e < children; ++e) acc += child_sign(g, e) * vals[e];
        (*out[g])[k] = weight * acc;
      }
    });
    sums = std::move(parent);
  }
  // The all-F level-0 coefficient carries the remaining mean (already set
  // above through mask 0 at j = 0 when L >= 1). For L = 0 the cells are the
  // level-0 cubes themselves.
  if (L == 0) {
    auto& mean = c.level_mut(0, 0);
    for (std::size_t k = 0; k < mean.size(); ++k) mean[k] = sums[k];
  }
  return c;
}

GridFunction synthesize(const HaarCoeffs& c, int L) {
  const int n = c.dim();
  const int top = c.highest_nonzero_level();
  if (L < 0 || L > 30) throw ValidationError("synthesis level must lie in [0, 30]");
  if (top >= 0 && L < top + 1)
    throw ValidationError("synthesis level L = " + std::to_string(L) + " cannot resolve Haar level " +
                          std::to_string(top) + "; need L >= " + std::to_string(top + 1));
  const Grid grid = Grid::cube(n, L, c.corner(), c.side());

  // Cell values level by level: V_{j+1}(2m+e) = V_j(m) + sum_G lambda^{j,G}_m sign(G, e).
  std::vector<double> values(c.cube_count(0), 0.0);
  const auto base = c.level(0, 0);
  if (!base.empty()) std::copy(base.begin(), base.end(), values.begin());
  const unsigned children = 1U << n;
  const int depth = std::max(top + 1, 0);
  for (int j = 0; j < depth; ++j) {
    std::vector<double> next(c.cube_count(j + 1));
    const std::size_t per = c.per_axis(j);
    std::vector<std::span<const double>> coeffs(children);
    for (Mask g = 1; g < children; ++g) coeffs[g] = c.level(j, g);
    parallel::parallel_for(values.size(), [&](std::size_t k) {
      for (unsigned e = 0; e < children; ++e) {
        double v = values[k];
        for (Mask g = 1; g < children; ++g)
          if (!coeffs[g].empty()) v += child_sign(g, e) * coeffs[g][k];
        next[child_flat(k, n, per, e)] = v;
      }
    });
    values = std::move(next);
  }
  // Constant on level-`depth` cubes; sample at nodes (right faces are outside).
  const std::size_t per = c.per_axis(depth);
  const int shift = L - depth;
  std::vector<double> samples(grid.size(), 0.0);
  std::vector<std::size_t> idx(n);
  for (std::size_t k = 0; k < samples.size(); ++k) {
    grid.unravel(k, idx);
    std::size_t flat = 0;
    bool inside = true;
    for (int l = 0; l < n; ++l) {
      const std::size_t cube = idx[l] >> shift;
      if (cube >= per) {
        inside = false;
        break;
      }
      flat = flat * per + cube;
    }
    if (inside) samples[k] = values[flat];
  }
  return GridFunction(grid, std::move(samples), "haar-synthesis");
}

GridFunction alternating_haar_sum(int j, int n, int L) {
  if (j < 0) throw ValidationError("example level j must be nonnegative");
  if (L < j + 1) throw ValidationError("example f_j needs grid level L >= j + 1");
  const Grid grid = Grid::cube(n, L, 0, 1);
  return sample(
      [j](std::span<const double> x) {
        double v = 1.0;
        for (double xl : x) {
          if (xl < 0.0 || xl >= 1.0) return 0.0;
          const double y = std::ldexp(xl, j);
          v *= h_M(y - std::floor(y));
        }
        return v;
      },
      grid, "f_" + std::to_string(j));
}

double b_sequence_norm(const HaarCoeffs& c, double s, double p, double q) {
  if (!(p > 0.0) || !(q > 0.0)) throw ValidationError("sequence norm exponents p, q must be positive");
  const int n = c.dim();
  std::vector<double> terms;
  for (int j = 0; j <= c.max_level(); ++j) {
    const double weight = std::exp2(j * (s - n * reciprocal(p)));
    for (Mask g = 0; g < (Mask{1} << n); ++g) {
      if (!valid_mask(j, g, n)) continue;
      const auto values = c.level(j, g);
      if (values.empty()) continue;
      terms.push_back(weight * lq_aggregate(values, p));
    }
  }
  return lq_aggregate(terms, q);
}

bool in_isomorphism_range(double s, double p, int n) {
  const double r = reciprocal(p);
  return std::max(n * (r - 1.0), r - 1.0) < s && s < std::min(r, 1.0);
}

nlohmann::json to_json(const HaarCoeffs& c) {
  nlohmann::json entries = nlohmann::json::array();
  std::vector<std::int64_t> m(c.dim());
  for (int j = 0; j <= c.max_level(); ++j)
    for (Mask g = 0; g < (Mask{1} << c.dim()); ++g) {
      const auto values = c.level(j, g);
      for (std::size_t k = 0; k < values.size(); ++k) {
        if (values[k] == 0.0) continue;
        c.cube_index(j, k, m);
        entries.push_back({{"j", j}, {"G", mask_to_string(g, c.dim())}, {"m", m}, {"value", values[k]}});
      }
    }
  return {{"n", c.dim()}, {"J", c.max_level()}, {"box", {{"corner", c.corner()}, {"side", c.side()}}},
          {"entries", entries}};
}

HaarCoeffs haar_coeffs_from_json(const nlohmann::json& j) {
  try {
    const int n = j.at("n").get<int>();
    std::vector<std::int64_t> corner(std::max(n, 1), 0);
    std::int64_t side = 1;
    if (j.contains("box")) {
      corner = j.at("box").at("corner").get<std::vector<std::int64_t>>();
      side = j.at("box").at("side").get<std::int64_t>();
    }
    HaarCoeffs c(n, j.at("J").get<int>(), corner, side);
    for (const auto& e : j.at("entries")) {
      const auto g = mask_from_string(e.at("G").get<std::string>());
      const auto m = e.at("m").get<std::vector<std::int64_t>>();
      c.set(e.at("j").get<int>(), g, m, e.at("value").get<double>());
    }
    return c;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("malformed Haar coefficient JSON: ") + e.what());
  }
}

}  // namespace fspace::haar

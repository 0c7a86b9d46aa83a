#include "fspace/faber.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "fspace/error.hpp"
#include "fspace/numeric.hpp"
#include "fspace/parallel.hpp"

namespace fspace::faber {

namespace {
constexpr double kBoundaryTolerance = 1e-12;
}

std::string to_string(Domain d) { return d == Domain::UnitInterval ? "unit-interval" : "real-line"; }

Domain parse_domain(const std::string& name) {
  if (name == "unit-interval") return Domain::UnitInterval;
  if (name == "real-line") return Domain::RealLine;
  throw ValidationError("unknown Faber domain kind '" + name + "'");
}

double hat_eval(int j, std::int64_t m, double x) {
  const double y = std::ldexp(x, j) - static_cast<double>(m);  // position inside the cell, in [0,1)
  if (y < 0.0 || y >= 1.0) return 0.0;
  return y < 0.5 ? 2.0 * y : 2.0 * (1.0 - y);
}

// ---------------------------------------------------------------------------

FaberCoeffs::FaberCoeffs(Domain domain, int max_level, std::int64_t corner, std::int64_t side)
    : domain_(domain), max_level_(max_level), corner_(corner), side_(side) {
  if (max_level_ < 0 || max_level_ > 40) throw ValidationError("Faber max level must lie in [0, 40]");
  if (side_ < 1) throw ValidationError("box side must be at least 1");
  if (domain_ == Domain::UnitInterval && (corner_ != 0 || side_ != 1))
    throw ValidationError("unit-interval Faber coefficients live on the box [0,1]");
}

double FaberCoeffs::get(int j, std::int64_t m) const {
  const auto it = levels_.find(j);
  if (it == levels_.end()) return 0.0;
  const std::int64_t rel = m - first_index(j);
  if (rel < 0 || rel >= static_cast<std::int64_t>(count(j))) return 0.0;
  return it->second[static_cast<std::size_t>(rel)];
}

void FaberCoeffs::set(int j, std::int64_t m, double value) {
  const std::int64_t rel = m - first_index(j);
  if (j < 0 || j > max_level_) throw ValidationError("Faber level " + std::to_string(j) + " outside [0, J]");
  if (rel < 0 || rel >= static_cast<std::int64_t>(count(j)))
    throw ValidationError("Faber index m = " + std::to_string(m) + " outside the box at level " + std::to_string(j));
  level_mut(j)[static_cast<std::size_t>(rel)] = value;
}

std::span<const double> FaberCoeffs::level(int j) const {
  const auto it = levels_.find(j);
  if (it == levels_.end()) return {};
  return it->second;
}

std::vector<double>& FaberCoeffs::level_mut(int j) {
  if (j < 0 || j > max_level_) throw ValidationError("Faber level " + std::to_string(j) + " outside [0, J]");
  auto& v = levels_[j];
  if (v.empty()) v.assign(count(j), 0.0);
  return v;
}

int FaberCoeffs::highest_nonzero_level() const {
  for (auto it = levels_.rbegin(); it != levels_.rend(); ++it)
    if (std::any_of(it->second.begin(), it->second.end(), [](double v) { return v != 0.0; })) return it->first;
  return -1;
}

// ---------------------------------------------------------------------------

namespace {

void check_zero(const GridFunction& f, std::size_t node, const char* what) {
  if (std::fabs(f[node]) > kBoundaryTolerance) {
    std::ostringstream msg;
    msg << what << " violated at node " << node << " (x = " << f.grid().coordinate(0, node)
        << ", f = " << f[node] << ")";
    throw ValidationError(msg.str());
  }
}

}  // namespace

FaberCoeffs faber_analyze(const GridFunction& f, int J, Domain domain) {
  const Grid& grid = f.grid();
  if (grid.dim() != 1) throw ValidationError("Faber analysis is one-dimensional");
  if (!grid.is_cube()) throw ValidationError("Faber analysis needs an integer box");
  const int L = grid.level();
  if (J < 0 || J > L - 1)
    throw ValidationError("Faber analysis level J = " + std::to_string(J) + " must lie in [0, L-1] with L = " +
                          std::to_string(L));
  const std::int64_t corner = grid.corner()[0];
  const std::int64_t side = grid.side();
  if (domain == Domain::UnitInterval) {
    if (corner != 0 || side != 1) throw ValidationError("unit-interval Faber analysis needs the box [0,1]");
    check_zero(f, 0, "boundary condition f(0) = 0");
    check_zero(f, f.size() - 1, "boundary condition f(1) = 0");
  } else {
    const auto per_unit = static_cast<std::size_t>(grid.cells_per_unit());
    for (std::size_t node = 0; node < f.size(); node += per_unit) check_zero(f, node, "condition f(k) = 0 at integers");
  }

  FaberCoeffs c(domain, J, corner, side);
  const auto values = f.samples();
  for (int j = 0; j <= J; ++j) {
    auto& d = c.level_mut(j);
    const std::size_t step = std::size_t{1} << (L - j);
    parallel::parallel_for(d.size(), [&](std::size_t k) {
      const std::size_t a = k * step;
      d[k] = values[a + step] - 2.0 * values[a + step / 2] + values[a];
    });
  }
  return c;
}

GridFunction faber_synthesize(const FaberCoeffs& c, int L) {
  const int top = c.highest_nonzero_level();
  if (L < top + 1)
    throw ValidationError("Faber synthesis level L = " + std::to_string(L) + " cannot resolve level-" +
                          std::to_string(top) + " hats; need L >= " + std::to_string(top + 1));
  if (L > 40) throw ValidationError("synthesis level must be at most 40");
  const Grid grid = Grid::cube(1, L, c.corner(), c.side());
  std::vector<double> samples(grid.size(), 0.0);
  parallel::parallel_for(samples.size(), [&](std::size_t node) {
    const double x = grid.coordinate(0, node);
    double v = 0.0;
    for (int j = 0; j <= c.max_level(); ++j) {
      const auto d = c.level(j);
      if (d.empty()) continue;
      const auto m = static_cast<std::int64_t>(std::floor(std::ldexp(x, j)));
      const std::int64_t rel = m - c.first_index(j);
      if (rel < 0 || rel >= static_cast<std::int64_t>(d.size())) continue;
      v += d[static_cast<std::size_t>(rel)] * hat_eval(j, m, x);
    }
    samples[node] = -0.5 * v;
  });
  return GridFunction(grid, std::move(samples), "faber-synthesis");
}

double b_faber_norm(const FaberCoeffs& c, double s, double p, double q, Assembly mode) {
  if (!(p > 0.0) || !(q > 0.0)) throw ValidationError("Faber norm exponents p, q must be positive");
  if (mode == Assembly::PerUnitInterval) {
    if (p != q) throw ValidationError("interval-by-interval assembly requires p = q");
    if (is_inf(p)) return b_faber_norm(c, s, p, q, Assembly::Global);
    // sum over unit intervals k of ||f | B(k + I)||_d^p
    std::vector<double> per_interval(static_cast<std::size_t>(c.side()), 0.0);
    for (std::size_t k = 0; k < per_interval.size(); ++k) {
      std::vector<double> terms;
      for (int j = 0; j <= c.max_level(); ++j) {
        const auto d = c.level(j);
        if (d.empty()) continue;
        const std::size_t per = std::size_t{1} << j;
        const double w = std::exp2(j * (s - 1.0 / p));
        terms.push_back(w * lq_aggregate(d.subspan(k * per, per), p));
      }
      per_interval[k] = std::pow(lq_aggregate(terms, p), p);
    }
    const double total = pairwise_sum(per_interval);
    return total == 0.0 ? 0.0 : std::pow(total, 1.0 / p);
  }
  std::vector<double> terms;
  for (int j = 0; j <= c.max_level(); ++j) {
    const auto d = c.level(j);
    if (d.empty()) continue;
    terms.push_back(std::exp2(j * (s - reciprocal(p))) * lq_aggregate(d, p));
  }
  return lq_aggregate(terms, q);
}

double f_faber_norm(const FaberCoeffs& c, double s, double p, double q, int level) {
  if (!(p > 0.0) || !(q > 0.0)) throw ValidationError("Faber norm exponents p, q must be positive");
  const int J = c.max_level();
  if (level < 0) level = J;
  if (level < J) throw ValidationError("F-norm integration level must be at least J");
  if (level > 40) throw ValidationError("F-norm integration level must be at most 40");
  const std::size_t cells = static_cast<std::size_t>(c.side()) << level;
  std::vector<double> g(cells, 0.0);  // (sum_j 2^{jsq}|d|^q)^{1/q} per cell
  parallel::parallel_for(cells, [&](std::size_t k) {
    double acc = 0.0;
    for (int j = 0; j <= J; ++j) {
      const auto d = c.level(j);
      if (d.empty()) continue;
      const double t = std::exp2(j * s) * std::fabs(d[k >> (level - j)]);
      acc = is_inf(q) ? std::fmax(acc, t) : acc + pow_abs(t, q);
    }
    g[k] = (is_inf(q) || acc == 0.0) ? acc : std::pow(acc, 1.0 / q);
  });
  if (is_inf(p)) return *std::max_element(g.begin(), g.end());
  const double h = std::ldexp(1.0, -level);
  const double total = pairwise_sum(cells, [&](std::size_t k) { return h * pow_abs(g[k], p); });
  return total == 0.0 ? 0.0 : std::pow(total, 1.0 / p);
}

bool b_window(double s, double p) {
  const double r = reciprocal(p);
  return r < s && s < 1.0 + std::min(r, 1.0);
}

bool f_window(double s, double p, double q) {
  const double rp = reciprocal(p), rq = reciprocal(q);
  if (is_inf(p)) return false;
  if (!is_inf(q) && std::max({rp, rq, 1.0}) < s && s < 1.0 + std::min({rp, rq, 1.0})) return true;
  if (p > 1.0 && q > 1.0 && !is_inf(q) && s == 1.0) return true;
  return p > 1.0 && q > 1.0 && std::max(rp, rq) < s && s < 1.0;
}

HomogeneityResult homogeneity_ratio(const GridFunction& f, int J, double s, double p, double q) {
  const Grid& grid = f.grid();
  if (grid.dim() != 1 || !grid.is_cube()) throw ValidationError("homogeneity check needs a 1-d integer box");
  const int L = grid.level();
  if (J < 0 || L - J < 1) throw ValidationError("homogeneity check needs 0 <= J <= L-1");
  const std::int64_t corner = grid.corner()[0];
  if (corner > 0 || corner + grid.side() < 1) throw ValidationError("box must contain [0,1]");

  // Support in [0, 2^-J]: nodes outside must vanish, and so must the end nodes.
  const auto origin = static_cast<std::size_t>(-corner * grid.cells_per_unit());
  const std::size_t width = std::size_t{1} << (L - J);
  for (std::size_t k = 0; k < f.size(); ++k) {
    if (k > origin && k < origin + width) continue;
    if (std::fabs(f[k]) > kBoundaryTolerance) {
      std::ostringstream msg;
      msg << "support hypothesis violated at node " << k << " (x = " << grid.coordinate(0, k) << ", f = " << f[k]
          << ")";
      throw ValidationError(msg.str());
    }
  }

  // g = f(2^-J .) sampled at level L-J on [0,1] uses the same node values.
  std::vector<double> g_samples(width + 1);
  for (std::size_t k = 0; k <= width; ++k) g_samples[k] = f[origin + k];
  const GridFunction g(Grid::cube(1, L - J, 0, 1), std::move(g_samples), "rescaled");

  const double nf = b_faber_norm(faber_analyze(f, L - 1, Domain::RealLine), s, p, q);
  const double ng = b_faber_norm(faber_analyze(g, L - J - 1, Domain::RealLine), s, p, q);
  if (nf == 0.0) return {1.0, true};
  const double lambda_pow = std::exp2(-J * (s - reciprocal(p)));
  return {ng / (lambda_pow * nf), false};
}

nlohmann::json to_json(const FaberCoeffs& c) {
  nlohmann::json entries = nlohmann::json::array();
  for (int j = 0; j <= c.max_level(); ++j) {
    const auto d = c.level(j);
    for (std::size_t k = 0; k < d.size(); ++k)
      if (d[k] != 0.0)
        entries.push_back({{"j", j}, {"m", c.first_index(j) + static_cast<std::int64_t>(k)}, {"value", d[k]}});
  }
  return {{"kind", to_string(c.domain())},
          {"J", c.max_level()},
          {"box", {{"corner", c.corner()}, {"side", c.side()}}},
          {"entries", entries}};
}

FaberCoeffs faber_coeffs_from_json(const nlohmann::json& j) {
  try {
    const Domain d = parse_domain(j.value("kind", std::string("unit-interval")));
    std::int64_t corner = 0, side = 1;
    if (j.contains("box")) {
      corner = j.at("box").at("corner").get<std::int64_t>();
      side = j.at("box").at("side").get<std::int64_t>();
    }
    FaberCoeffs c(d, j.at("J").get<int>(), corner, side);
    for (const auto& e : j.at("entries")) c.set(e.at("j").get<int>(), e.at("m").get<std::int64_t>(), e.at("value"));
    return c;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("malformed Faber coefficient JSON: ") + e.what());
  }
}

}  // namespace fspace::faber

#include "fspace/oscillation.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <string>

#include "fspace/error.hpp"
#include "fspace/numeric.hpp"
#include "fspace/parallel.hpp"

namespace fspace::osc {
namespace {

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
  std::int64_t q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

std::int64_t ceil_div(std::int64_t a, std::int64_t b) { return -floor_div(-a, b); }

void check_level(const GridFunction& f, int j) {
  if (j < 0 || j > f.level())
    throw ValidationError("cube level " + std::to_string(j) + " outside 0.." + std::to_string(f.level()));
}

// Empty array describing the level-j cubes contained in the box.
OscArray layout(const Grid& g, int j) {
  OscArray a;
  a.level = j;
  const std::int64_t r = std::int64_t{1} << (g.level() - j);
  for (int l = 0; l < g.dim(); ++l) {
    const std::int64_t lo = g.origin(l);
    const std::int64_t hi = lo + static_cast<std::int64_t>(g.count(l)) - 1;
    const std::int64_t first = ceil_div(lo, r);
    const std::int64_t end = floor_div(hi, r);
    a.first.push_back(first);
    a.counts.push_back(end > first ? static_cast<std::size_t>(end - first) : 0);
  }
  std::size_t total = 1;
  for (std::size_t c : a.counts) total *= c;
  a.bracket.assign(total, 0.0);
  a.min_abs.assign(total, 0.0);
  return a;
}

// Absolute cube index of entry i, written into m.
void unravel(const OscArray& a, std::size_t i, std::int64_t* m) {
  for (int l = a.dim() - 1; l >= 0; --l) {
    m[l] = a.first[l] + static_cast<std::int64_t>(i % a.counts[l]);
    i /= a.counts[l];
  }
}

// Entry of absolute index m, or size() when outside.
std::size_t locate(const OscArray& a, const std::int64_t* m) {
  std::size_t i = 0;
  for (int l = 0; l < a.dim(); ++l) {
    const std::int64_t k = m[l] - a.first[l];
    if (k < 0 || k >= static_cast<std::int64_t>(a.counts[l])) return a.size();
    i = i * a.counts[l] + static_cast<std::size_t>(k);
  }
  return i;
}

struct Extremes {
  std::vector<double> hi, lo, abs_lo;
};

OscArray finish(OscArray a, const Extremes& e) {
  for (std::size_t i = 0; i < a.size(); ++i) {
    a.bracket[i] = e.hi[i] - e.lo[i];
    a.min_abs[i] = e.abs_lo[i];
  }
  return a;
}

// Extremes over level-L cells from their 2^n corner nodes.
Extremes cell_extremes(const GridFunction& f, const OscArray& cells) {
  const Grid& g = f.grid();
  const int n = g.dim();
  Extremes e{std::vector<double>(cells.size()), std::vector<double>(cells.size()),
             std::vector<double>(cells.size())};
  parallel::parallel_for(cells.size(), [&](std::size_t i) {
    std::vector<std::int64_t> m(n);
    unravel(cells, i, m.data());
    std::size_t base = 0;
    for (int l = 0; l < n; ++l) base += static_cast<std::size_t>(m[l] - g.origin(l)) * g.stride(l);
    double hi = -kInf, lo = kInf, alo = kInf;
    for (unsigned corner = 0; corner < (1u << n); ++corner) {
      std::size_t k = base;
      for (int l = 0; l < n; ++l)
        if (corner & (1u << l)) k += g.stride(l);
      const double v = f[k];
      hi = std::max(hi, v);
      lo = std::min(lo, v);
      alo = std::min(alo, std::fabs(v));
    }
    e.hi[i] = hi;
    e.lo[i] = lo;
    e.abs_lo[i] = alo;
  });
  return e;
}

// Parent extremes from the 2^n children one level finer.
Extremes coarsen(const OscArray& parent, const OscArray& child_layout, const Extremes& child) {
  const int n = parent.dim();
  Extremes e{std::vector<double>(parent.size()), std::vector<double>(parent.size()),
             std::vector<double>(parent.size())};
  parallel::parallel_for(parent.size(), [&](std::size_t i) {
    std::vector<std::int64_t> m(n), c(n);
    unravel(parent, i, m.data());
    double hi = -kInf, lo = kInf, alo = kInf;
    for (unsigned corner = 0; corner < (1u << n); ++corner) {
      for (int l = 0; l < n; ++l) c[l] = 2 * m[l] + ((corner >> l) & 1u);
      const std::size_t k = locate(child_layout, c.data());
      hi = std::max(hi, child.hi[k]);
      lo = std::min(lo, child.lo[k]);
      alo = std::min(alo, child.abs_lo[k]);
    }
    e.hi[i] = hi;
    e.lo[i] = lo;
    e.abs_lo[i] = alo;
  });
  return e;
}

double window_weight(double s, double n, double p, int j) { return std::exp2(j * (s - n * reciprocal(p))); }

}  // namespace

std::vector<std::int64_t> OscArray::index(std::size_t i) const {
  if (i >= size()) throw ValidationError("oscillation entry out of range");
  std::vector<std::int64_t> m(dim());
  unravel(*this, i, m.data());
  return m;
}

std::size_t OscArray::flat(std::span<const std::int64_t> m) const {
  if (static_cast<int>(m.size()) != dim()) throw ValidationError("cube index has the wrong dimension");
  const std::size_t i = locate(*this, m.data());
  if (i == size()) throw ValidationError("cube outside the box");
  return i;
}

std::vector<OscArray> osc_pyramid(const GridFunction& f, int J) {
  const int L = f.level();
  if (J < 0) J = L;
  check_level(f, J);
  if (f.dim() > 16) throw ValidationError("dimension too large for cube scans");
  std::vector<OscArray> out(J + 1);
  OscArray cur = layout(f.grid(), L);
  Extremes e = cell_extremes(f, cur);
  for (int j = L; j >= 0; --j) {
    if (j <= J) out[j] = finish(cur, e);
    if (j == 0) break;
    OscArray parent = layout(f.grid(), j - 1);
    e = coarsen(parent, cur, e);
    cur = std::move(parent);
  }
  return out;
}

OscArray osc_brackets(const GridFunction& f, int j) {
  check_level(f, j);
  return std::move(osc_pyramid(f, f.level())[j]);
}

std::vector<double> osc_poly(const GridFunction& f, int M, double u, int j) {
  check_level(f, j);
  if (M == 0 && is_inf(u)) {
    auto b = osc_brackets(f, j).bracket;
    for (double& v : b) v *= 0.5;
    return b;
  }
  if (!((M == 0 || M == 1) && u == 2.0))
    throw ValidationError("oscillation of degree " + std::to_string(M) + " with u = " + std::to_string(u) +
                          " is not supported; use (0, inf), (0, 2) or (1, 2)");
  const Grid& g = f.grid();
  const int n = g.dim();
  const OscArray a = layout(g, j);
  const std::int64_t r = std::int64_t{1} << (f.level() - j);
  const std::size_t side = static_cast<std::size_t>(r) + 1;
  std::size_t per_cube = 1;
  for (int l = 0; l < n; ++l) per_cube *= side;
  // Centered node offsets (k - r/2) along one axis, in grid units.
  const double half = 0.5 * static_cast<double>(r);
  double centered_sq = 0.0;
  for (std::size_t k = 0; k < side; ++k) centered_sq += (k - half) * (k - half);

  std::vector<double> out(a.size());
  parallel::parallel_for(a.size(), [&](std::size_t i) {
    std::vector<std::int64_t> m(n);
    std::vector<std::size_t> local(n);
    unravel(a, i, m.data());
    std::size_t base = 0;
    for (int l = 0; l < n; ++l) base += static_cast<std::size_t>(m[l] * r - g.origin(l)) * g.stride(l);
    auto node = [&](std::size_t t) {
      std::size_t k = base;
      for (int l = n - 1; l >= 0; --l) {
        local[l] = t % side;
        t /= side;
        k += local[l] * g.stride(l);
      }
      return f[k];
    };
    const double mean = pairwise_sum(per_cube, node) / static_cast<double>(per_cube);
    std::vector<double> beta(n, 0.0);
    if (M == 1) {
      // Centered coordinates are orthogonal on the tensor node set, so each
      // slope is an independent projection.
      for (int l = 0; l < n; ++l) {
        const double num = pairwise_sum(per_cube, [&](std::size_t t) {
          const double v = node(t);
          return (v - mean) * (static_cast<double>(local[l]) - half);
        });
        beta[l] = num / (centered_sq * static_cast<double>(per_cube / side));
      }
    }
    const double ss = pairwise_sum(per_cube, [&](std::size_t t) {
      double v = node(t) - mean;
      for (int l = 0; l < n; ++l) v -= beta[l] * (static_cast<double>(local[l]) - half);
      return v * v;
    });
    out[i] = std::sqrt(ss / static_cast<double>(per_cube));
  });
  return out;
}

OscNorm b_osc_norm_detail(const GridFunction& f, double s, double p, double q) {
  if (!(p > 0.0) || !(q > 0.0)) throw ValidationError("p and q must be positive");
  const int L = f.level();
  const double n = f.dim();
  const auto pyramid = osc_pyramid(f);
  std::vector<double> terms(L + 1);
  for (int j = 0; j <= L; ++j) terms[j] = window_weight(s, n, p, j) * lq_aggregate(pyramid[j].bracket, p);

  OscNorm r;
  r.lp_part = lp_norm(f, p);
  r.bracket_part = lq_aggregate(terms, q);
  r.value = r.lp_part + r.bracket_part;
  r.tail = r.bracket_part - lq_aggregate(std::span<const double>(terms).first(L), q);
  r.in_window = n / p < s && s < 1.0;
  return r;
}

double b_osc_norm(const GridFunction& f, double s, double p, double q) { return b_osc_norm_detail(f, s, p, q).value; }

OscNorm f_osc_norm_detail(const GridFunction& f, double s, double p, double q) {
  if (!(p > 0.0) || !(q > 0.0)) throw ValidationError("p and q must be positive");
  if (is_inf(p)) throw ValidationError("the F-norm needs p < inf");
  const Grid& g = f.grid();
  const int L = f.level();
  const int n = g.dim();
  const auto pyramid = osc_pyramid(f);
  const OscArray& cells = pyramid[L];
  std::vector<double> weight(L + 1);
  for (int j = 0; j <= L; ++j) weight[j] = std::exp2(j * s);

  // Per cell: the inner l^q function with all levels and without level L.
  std::vector<double> full(cells.size()), coarse(cells.size());
  parallel::parallel_for(cells.size(), [&](std::size_t i) {
    std::vector<std::int64_t> c(n), m(n);
    unravel(cells, i, c.data());
    double acc_full = 0.0, acc_coarse = 0.0;
    for (int j = 0; j <= L; ++j) {
      for (int l = 0; l < n; ++l) m[l] = c[l] >> (L - j);
      const std::size_t k = locate(pyramid[j], m.data());
      if (k == pyramid[j].size()) continue;
      const double t = weight[j] * pyramid[j].bracket[k];
      if (is_inf(q)) {
        acc_full = std::max(acc_full, t);
        if (j < L) acc_coarse = std::max(acc_coarse, t);
      } else {
        const double tq = pow_abs(t, q);
        acc_full += tq;
        if (j < L) acc_coarse += tq;
      }
    }
    if (!is_inf(q) && q != p) {
      acc_full = acc_full == 0.0 ? 0.0 : std::pow(acc_full, 1.0 / q);
      acc_coarse = acc_coarse == 0.0 ? 0.0 : std::pow(acc_coarse, 1.0 / q);
    }
    // With q = p the p-th power of the inner function is the accumulated sum.
    full[i] = acc_full;
    coarse[i] = acc_coarse;
  });
  const double cell_volume = std::exp2(-static_cast<double>(L) * n);
  auto integrate = [&](const std::vector<double>& values) {
    const bool powered = !is_inf(q) && q == p;
    const double sum = pairwise_sum(values.size(), [&](std::size_t i) {
      return powered ? values[i] : pow_abs(values[i], p);
    });
    const double total = cell_volume * sum;
    return total == 0.0 ? 0.0 : std::pow(total, 1.0 / p);
  };

  OscNorm r;
  r.lp_part = lp_norm(f, p);
  r.bracket_part = integrate(full);
  r.value = r.lp_part + r.bracket_part;
  r.tail = r.bracket_part - integrate(coarse);
  r.in_window = n * std::max(1.0 / p, reciprocal(q)) < s && s < 1.0;
  return r;
}

double f_osc_norm(const GridFunction& f, double s, double p, double q) { return f_osc_norm_detail(f, s, p, q).value; }

void write_csv(std::ostream& out, const OscArray& a) {
  out << "j";
  for (int l = 0; l < a.dim(); ++l) out << ",m" << l;
  out << ",bracket,min_abs\n";
  const auto precision = out.precision(17);
  std::vector<std::int64_t> m(a.dim());
  for (std::size_t i = 0; i < a.size(); ++i) {
    unravel(a, i, m.data());
    out << a.level;
    for (std::int64_t v : m) out << ',' << v;
    out << ',' << a.bracket[i] << ',' << a.min_abs[i] << '\n';
  }
  out.precision(precision);
}

}  // namespace fspace::osc

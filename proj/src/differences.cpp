#include "fspace/differences.hpp"

#include <algorithm>
#include <cmath>

#include "fspace/error.hpp"
#include "fspace/numeric.hpp"
#include "fspace/parallel.hpp"

namespace fspace::diff {

namespace {

void check_order(int M) {
  if (M != 1 && M != 2) throw ValidationError("difference order M must be 1 or 2");
}

void check_p(double p) {
  if (!(p > 0.0)) throw ValidationError("L_p exponent must be positive");
}

// Largest step k (in grid units) for which the shrunk box is nonempty.
std::size_t max_step(const Grid& g, int M, int axis) {
  return (g.count(axis) - 1) / static_cast<std::size_t>(M);
}

}  // namespace

GridFunction difference(const GridFunction& f, int M, std::size_t k, int axis) {
  check_order(M);
  const Grid& g = f.grid();
  if (axis < 0 || axis >= g.dim()) throw ValidationError("difference axis out of range");
  if (k < 1) throw ValidationError("difference step must be positive");
  if (k > max_step(g, M, axis)) throw ValidationError("difference step exceeds the box");

  std::vector<std::size_t> counts = g.counts();
  counts[axis] -= static_cast<std::size_t>(M) * k;
  const Grid shrunk(g.level(), g.origins(), counts);
  const std::size_t shift = k * g.stride(axis);
  std::vector<double> out(shrunk.size());
  const int n = g.dim();
  parallel::parallel_for(out.size(), [&](std::size_t i) {
    std::size_t idx[16];
    std::vector<std::size_t> big;
    std::span<std::size_t> index;
    if (n <= 16) {
      index = std::span<std::size_t>(idx, n);
    } else {
      big.resize(n);
      index = big;
    }
    shrunk.unravel(i, index);
    const std::size_t base = g.flat(index);
    out[i] = M == 1 ? f[base + shift] - f[base] : f[base + 2 * shift] - 2.0 * f[base + shift] + f[base];
  });
  return GridFunction(shrunk, std::move(out), f.tag());
}

GridFunction difference_h(const GridFunction& f, int M, double h, int axis) {
  const double k = std::ldexp(h, f.level());
  if (!(h > 0.0) || k != std::floor(k))
    throw ValidationError("difference step h = " + std::to_string(h) + " is not a positive multiple of 2^-" +
                          std::to_string(f.level()));
  return difference(f, M, static_cast<std::size_t>(k), axis);
}

std::vector<double> difference_profile(const GridFunction& f, int M, double p, std::size_t k_max) {
  check_order(M);
  check_p(p);
  const Grid& g = f.grid();
  std::vector<double> profile(k_max, 0.0);
  if (g.dim() == 1) {
    // Trapezoid L_p norm of the difference on the shrunk box, without materializing it.
    const auto v = f.samples();
    const double h = g.spacing();
    const std::size_t limit = std::min(k_max, max_step(g, M, 0));
    parallel::parallel_for(limit, [&](std::size_t idx) {
      const std::size_t k = idx + 1;
      const std::size_t count = v.size() - static_cast<std::size_t>(M) * k;
      auto delta = [&](std::size_t i) {
        return M == 1 ? v[i + k] - v[i] : v[i + 2 * k] - 2.0 * v[i + k] + v[i];
      };
      if (is_inf(p)) {
        double m = 0.0;
        for (std::size_t i = 0; i < count; ++i) m = std::fmax(m, std::fabs(delta(i)));
        profile[idx] = m;
        return;
      }
      const double sum = pairwise_sum(count, [&](std::size_t i) {
        const double w = (count > 1 && (i == 0 || i + 1 == count)) ? 0.5 * h : h;
        return w * pow_abs(delta(i), p);
      });
      profile[idx] = sum == 0.0 ? 0.0 : std::pow(sum, 1.0 / p);
    });
    return profile;
  }
  for (int axis = 0; axis < g.dim(); ++axis) {
    const std::size_t limit = std::min(k_max, max_step(g, M, axis));
    for (std::size_t k = 1; k <= limit; ++k)
      profile[k - 1] = std::max(profile[k - 1], lp_norm(difference(f, M, k, axis), p));
  }
  return profile;
}

double modulus(const GridFunction& f, int M, double p, double t) {
  const double kt = std::ldexp(t, f.level());
  if (!(t > 0.0) || kt != std::floor(kt))
    throw ValidationError("modulus argument t must be a positive grid multiple");
  const auto profile = difference_profile(f, M, p, static_cast<std::size_t>(kt));
  return profile.empty() ? 0.0 : *std::max_element(profile.begin(), profile.end());
}

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::Bounded: return "bounded";
    case Verdict::PowerGrowth: return "power-growth";
    case Verdict::Inconclusive: return "inconclusive";
  }
  return "inconclusive";
}

GrowthReport growth_report(std::vector<double> a, double q, int j0) {
  if (!(q > 0.0)) throw ValidationError("l^q exponent must be positive");
  GrowthReport r;
  r.j0 = j0;
  r.a = std::move(a);
  r.S.resize(r.a.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < r.a.size(); ++i) {
    if (is_inf(q)) {
      acc = std::fmax(acc, std::fabs(r.a[i]));
      r.S[i] = acc;
    } else {
      acc += pow_abs(r.a[i], q);
      r.S[i] = acc == 0.0 ? 0.0 : std::pow(acc, 1.0 / q);
    }
  }
  if (r.S.empty()) return r;

  // log2 S_J against log2(J - j0 + 1), over the levels with S_J > 0.
  double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
  std::size_t count = 0;
  for (std::size_t i = 0; i < r.S.size(); ++i) {
    if (!(r.S[i] > 0.0)) continue;
    const double x = std::log2(static_cast<double>(i + 1));
    const double y = std::log2(r.S[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    syy += y * y;
    ++count;
  }
  if (count >= 2) {
    const double cnt = static_cast<double>(count);
    const double vx = sxx - sx * sx / cnt;
    const double vy = syy - sy * sy / cnt;
    const double cxy = sxy - sx * sy / cnt;
    r.slope = vx > 0 ? cxy / vx : 0.0;
    r.r2 = (vx > 0 && vy > 0) ? (cxy * cxy) / (vx * vy) : (vy == 0 ? 1.0 : 0.0);
  }

  const std::size_t last = r.S.size() - 1;
  const std::size_t tail = last >= static_cast<std::size_t>(kTailWindow) ? last - kTailWindow : 0;
  const double base = r.S[tail];
  bool bounded = true;
  for (std::size_t i = tail; i <= last; ++i) {
    if (base == 0.0 ? r.S[i] > 0.0 : r.S[i] / base > kBoundedCap) bounded = false;
  }
  if (bounded) {
    r.verdict = Verdict::Bounded;
  } else if (r.slope > kSlopeFloor && r.r2 >= kR2Floor) {
    r.verdict = Verdict::PowerGrowth;
    r.alpha = r.slope;
  }
  return r;
}

SeminormResult besov_diff_seminorm(const GridFunction& f, double sigma, int M, double p, double q, int j0, int J) {
  check_order(M);
  check_p(p);
  if (!(q > 0.0)) throw ValidationError("l^q exponent must be positive");
  if (!(sigma > 0.0 && sigma < M))
    throw ValidationError("difference seminorm needs 0 < sigma < M (sigma = " + std::to_string(sigma) +
                          ", M = " + std::to_string(M) + ")");
  const int L = f.level();
  if (j0 < 0 || j0 > J || J > L) throw ValidationError("level range must satisfy 0 <= j0 <= J <= L");

  const auto profile = difference_profile(f, M, p, std::size_t{1} << (L - j0));
  // Prefix maxima give the modulus at every dyadic t = 2^-j.
  std::vector<double> prefix(profile.size());
  double run = 0.0;
  for (std::size_t i = 0; i < profile.size(); ++i) prefix[i] = run = std::max(run, profile[i]);

  std::vector<double> a;
  for (int j = j0; j <= J; ++j) {
    const std::size_t k = std::size_t{1} << (L - j);
    a.push_back(std::exp2(j * sigma) * prefix[k - 1]);
  }
  SeminormResult out;
  out.report = growth_report(std::move(a), q, j0);
  out.value = out.report.S.empty() ? 0.0 : out.report.S.back();
  return out;
}

GrowthReport membership_diagnostic(const GridFunction& f, double s, double p, double q, int M, int j0, int J) {
  return besov_diff_seminorm(f, s, M, p, q, j0, J).report;
}

double holder_norm(const GridFunction& f, double s) {
  if (!(s > 0.0 && s < 1.0)) throw ValidationError("Hoelder exponent must lie in (0,1)");
  const Grid& g = f.grid();
  const int n = g.dim();
  const double sup = lp_norm(f, kInf);
  const auto r = static_cast<std::int64_t>(g.cells_per_unit());
  const double h = g.spacing();

  // Lattice offsets with 0 < |delta| h <= 1, first nonzero component positive.
  std::vector<std::vector<std::int64_t>> offsets;
  std::vector<double> factor;
  {
    std::vector<std::int64_t> d(n, -r);
    for (;;) {
      std::int64_t norm2 = 0;
      for (auto v : d) norm2 += v * v;
      int first = 0;
      while (first < n && d[first] == 0) ++first;
      bool fits = norm2 > 0 && norm2 <= r * r && first < n && d[first] > 0;
      for (int l = 0; l < n && fits; ++l)
        if (std::llabs(d[l]) >= static_cast<std::int64_t>(g.count(l))) fits = false;
      if (fits) {
        offsets.push_back(d);
        factor.push_back(1.0 / std::pow(std::sqrt(static_cast<double>(norm2)) * h, s));
      }
      int l = n - 1;
      while (l >= 0 && d[l] == r) d[l--] = -r;
      if (l < 0) break;
      ++d[l];
    }
  }

  std::vector<double> best(f.size(), 0.0);
  parallel::parallel_for(f.size(), [&](std::size_t k) {
    std::vector<std::size_t> idx(n), other(n);
    g.unravel(k, idx);
    double m = 0.0;
    for (std::size_t o = 0; o < offsets.size(); ++o) {
      bool inside = true;
      for (int l = 0; l < n && inside; ++l) {
        const std::int64_t t = static_cast<std::int64_t>(idx[l]) + offsets[o][l];
        if (t < 0 || t >= static_cast<std::int64_t>(g.count(l))) inside = false;
        other[l] = static_cast<std::size_t>(t);
      }
      if (!inside) continue;
      m = std::fmax(m, std::fabs(f[g.flat(other)] - f[k]) * factor[o]);
    }
    best[k] = m;
  });
  return sup + (best.empty() ? 0.0 : *std::max_element(best.begin(), best.end()));
}

double w1p_norm(const GridFunction& f, double p) {
  check_p(p);
  const Grid& g = f.grid();
  const int n = g.dim();
  const double h = g.spacing();
  double total = lp_norm(f, p);
  std::vector<std::size_t> idx(n);
  for (int axis = 0; axis < n; ++axis) {
    if (g.count(axis) < 2) continue;
    const std::size_t stride = g.stride(axis);
    auto term = [&](std::size_t k, std::vector<std::size_t>& index, double& weight) -> double {
      g.unravel(k, index);
      if (index[axis] + 1 == g.count(axis)) return 0.0;
      weight = std::ldexp(1.0, -g.level() * n);
      for (int l = 0; l < n; ++l)
        if (l != axis && g.count(l) > 1 && (index[l] == 0 || index[l] + 1 == g.count(l))) weight *= 0.5;
      return (f[k + stride] - f[k]) / h;
    };
    if (is_inf(p)) {
      double m = 0.0;
      double w = 0.0;
      for (std::size_t k = 0; k < f.size(); ++k) m = std::fmax(m, std::fabs(term(k, idx, w)));
      total += m;
      continue;
    }
    std::vector<double> terms(f.size(), 0.0);
    for (std::size_t k = 0; k < f.size(); ++k) {
      double w = 0.0;
      const double d = term(k, idx, w);
      if (d != 0.0) terms[k] = w * pow_abs(d, p);
    }
    const double sum = pairwise_sum(terms);
    total += sum == 0.0 ? 0.0 : std::pow(sum, 1.0 / p);
  }
  return total;
}

nlohmann::json to_json(const GrowthReport& r) {
  nlohmann::json j{{"j0", r.j0}, {"a", r.a}, {"S", r.S}, {"slope", r.slope}, {"r2", r.r2},
                   {"verdict", to_string(r.verdict)}};
  if (r.verdict == Verdict::PowerGrowth) j["alpha"] = r.alpha;
  return j;
}

}  // namespace fspace::diff

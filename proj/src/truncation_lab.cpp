#include "fspace/truncation_lab.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "fspace/differences.hpp"
#include "fspace/error.hpp"
#include "fspace/faber.hpp"
#include "fspace/haar.hpp"
#include "fspace/numeric.hpp"
#include "fspace/oscillation.hpp"
#include "fspace/parallel.hpp"

namespace fspace::lab {
namespace {

void require_line(const GridFunction& f, NormKind kind) {
  if (f.dim() != 1) throw ValidationError(to_string(kind) + " norms are one-dimensional; got dimension " +
                                          std::to_string(f.dim()));
}

faber::FaberCoeffs faber_of(const GridFunction& f) {
  if (f.level() < 1) throw ValidationError("Faber norms need level L >= 1");
  return faber::faber_analyze(f, f.level() - 1, faber::Domain::RealLine);
}

// Value of the multilinear interpolant of f at x (x inside the box).
double interpolate(const GridFunction& f, std::span<const double> x) {
  const Grid& g = f.grid();
  const int n = g.dim();
  const double scale = static_cast<double>(g.cells_per_unit());
  std::vector<std::size_t> base(n);
  std::vector<double> frac(n);
  for (int l = 0; l < n; ++l) {
    const double u = x[l] * scale - static_cast<double>(g.origin(l));
    const double top = static_cast<double>(g.count(l) - 1);
    const double c = std::clamp(u, 0.0, top);
    std::size_t i = static_cast<std::size_t>(std::floor(c));
    if (i + 1 >= g.count(l) && i > 0) i = g.count(l) - 2;
    base[l] = g.count(l) == 1 ? 0 : i;
    frac[l] = g.count(l) == 1 ? 0.0 : c - static_cast<double>(i);
  }
  double v = 0.0;
  for (unsigned corner = 0; corner < (1u << n); ++corner) {
    double w = 1.0;
    std::size_t k = 0;
    for (int l = 0; l < n; ++l) {
      const bool up = (corner >> l) & 1u;
      if (up && g.count(l) == 1) {
        w = 0.0;
        break;
      }
      w *= up ? frac[l] : 1.0 - frac[l];
      k += (base[l] + (up ? 1 : 0)) * g.stride(l);
    }
    if (w != 0.0) v += w * f[k];
  }
  return v;
}

double distance(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t l = 0; l < a.size(); ++l) s += (a[l] - b[l]) * (a[l] - b[l]);
  return std::sqrt(s);
}

std::vector<double> node_point(const GridFunction& f, std::size_t k) {
  const Grid& g = f.grid();
  std::vector<std::size_t> idx(g.dim());
  g.unravel(k, idx);
  std::vector<double> x(g.dim());
  for (int l = 0; l < g.dim(); ++l) x[l] = g.coordinate(l, idx[l]);
  return x;
}

// Three-point bound for one pair; returns false on violation.
bool witness_holds(const GridFunction& f, std::size_t ix, std::size_t iy, double s) {
  const auto x = node_point(f, ix), y = node_point(f, iy);
  const double fx = f[ix], fy = f[iy];
  const double dxy = distance(x, y);
  // Scan the segment finely enough to cross every cell, then bisect the first sign change.
  const std::size_t steps = 4 * static_cast<std::size_t>(std::ceil(dxy * f.grid().cells_per_unit())) + 4;
  std::vector<double> pt(x.size());
  auto at = [&](double t) {
    for (std::size_t l = 0; l < x.size(); ++l) pt[l] = (1 - t) * x[l] + t * y[l];
    return interpolate(f, pt);
  };
  double t0 = 0.0, t1 = 1.0;
  for (std::size_t k = 1; k <= steps; ++k) {
    const double t = static_cast<double>(k) / static_cast<double>(steps);
    const double v = at(t);
    if (v <= 0.0) {
      t1 = t;
      break;
    }
    t0 = t;
  }
  for (int it = 0; it < 200 && t1 - t0 > 1e-15; ++it) {
    const double mid = 0.5 * (t0 + t1);
    (at(mid) > 0.0 ? t0 : t1) = mid;
  }
  // z is a zero of the interpolant up to bisection resolution; its residual is rounding noise.
  const double tz = t1;
  for (std::size_t l = 0; l < x.size(); ++l) pt[l] = (1 - tz) * x[l] + tz * y[l];
  const double dxz = distance(x, pt), dyz = distance(y, pt);
  if (dxz == 0.0 || dyz == 0.0) return true;
  const double lhs = (fx - fy) / std::pow(dxy, s);
  const double rhs = std::fabs(fx) / std::pow(dxz, s) + std::fabs(fy) / std::pow(dyz, s);
  return lhs <= rhs * (1 + 1e-12) + 1e-12;
}

nlohmann::json number(double v) {
  if (is_inf(v)) return "inf";
  return v;
}

}  // namespace

std::string to_string(NormKind k) {
  switch (k) {
    case NormKind::HaarSeq:
      return "haar-seq";
    case NormKind::FaberB:
      return "faber-B";
    case NormKind::FaberF:
      return "faber-F";
    case NormKind::OscB:
      return "osc-B";
    case NormKind::OscF:
      return "osc-F";
    case NormKind::DiffSeminorm:
      return "diff-seminorm";
    case NormKind::Holder:
      return "holder";
    case NormKind::W1p:
      break;
  }
  return "w1p";
}

NormKind parse_norm_kind(const std::string& name) {
  if (name == "haar-seq" || name == "haar") return NormKind::HaarSeq;
  if (name == "faber-B" || name == "faber-b") return NormKind::FaberB;
  if (name == "faber-F" || name == "faber-f") return NormKind::FaberF;
  if (name == "osc-B" || name == "osc-b") return NormKind::OscB;
  if (name == "osc-F" || name == "osc-f") return NormKind::OscF;
  if (name == "diff-seminorm" || name == "diff") return NormKind::DiffSeminorm;
  if (name == "holder") return NormKind::Holder;
  if (name == "w1p") return NormKind::W1p;
  throw ValidationError("unknown norm kind '" + name + "'");
}

double evaluate_norm(const GridFunction& f, NormKind kind, const spaces::SpaceParams& sp) {
  switch (kind) {
    case NormKind::HaarSeq:
      return haar::b_sequence_norm(haar::analyze(f, f.level()), sp.s, sp.p, sp.q);
    case NormKind::FaberB:
      require_line(f, kind);
      return faber::b_faber_norm(faber_of(f), sp.s, sp.p, sp.q);
    case NormKind::FaberF:
      require_line(f, kind);
      return faber::f_faber_norm(faber_of(f), sp.s, sp.p, sp.q);
    case NormKind::OscB:
      return osc::b_osc_norm(f, sp.s, sp.p, sp.q);
    case NormKind::OscF:
      return osc::f_osc_norm(f, sp.s, sp.p, sp.q);
    case NormKind::DiffSeminorm:
      return diff::besov_diff_seminorm(f, sp.s, sp.s < 1 ? 1 : 2, sp.p, sp.q, 0, f.level()).value;
    case NormKind::Holder:
      return diff::holder_norm(f, sp.s);
    case NormKind::W1p:
      return diff::w1p_norm(f, sp.p);
  }
  throw ValidationError("unknown norm kind");
}

Truncation truncate(const GridFunction& f) {
  return {f.map([](double v) { return std::fabs(v); }, f.tag()),
          f.map([](double v) { return std::max(v, 0.0); }, f.tag()),
          f.map([](double v) { return std::min(v, 0.0); }, f.tag())};
}

std::string to_string(Operator op) {
  switch (op) {
    case Operator::Abs:
      return "abs";
    case Operator::Pos:
      return "pos";
    case Operator::Neg:
      break;
  }
  return "neg";
}

Operator parse_operator(const std::string& name) {
  if (name == "abs") return Operator::Abs;
  if (name == "pos") return Operator::Pos;
  if (name == "neg") return Operator::Neg;
  throw ValidationError("unknown truncation operator '" + name + "'");
}

GridFunction apply(Operator op, const GridFunction& f) {
  switch (op) {
    case Operator::Abs:
      return f.map([](double v) { return std::fabs(v); }, f.tag());
    case Operator::Pos:
      return f.map([](double v) { return std::max(v, 0.0); }, f.tag());
    case Operator::Neg:
      break;
  }
  return f.map([](double v) { return std::min(v, 0.0); }, f.tag());
}

RatioStats ratio_stats(const std::vector<RatioRow>& rows) {
  if (rows.empty()) throw ValidationError("no function left for ratio statistics");
  RatioStats st;
  st.min = kInf;
  st.max = 0.0;
  std::vector<double> logs;
  for (const auto& r : rows) {
    st.min = std::min(st.min, r.ratio);
    st.max = std::max(st.max, r.ratio);
    logs.push_back(std::log(r.ratio));
  }
  st.geo_mean = std::exp(pairwise_sum(logs) / static_cast<double>(logs.size()));
  st.spread = st.max / st.min;
  return st;
}

EquivalenceReport ratio_experiment(const std::vector<GridFunction>& corpus, NormKind kind,
                                   const spaces::SpaceParams& sp, Operator op) {
  sp.validate();
  if (corpus.empty()) throw ValidationError("empty corpus");
  for (const auto& f : corpus)
    if (!f.combinable(corpus.front())) throw ValidationError("corpus functions live on different grids");
  std::vector<RatioRow> all(corpus.size());
  parallel::parallel_for(corpus.size(), [&](std::size_t i) {
    const GridFunction& f = corpus[i];
    RatioRow& r = all[i];
    r.tag = f.tag();
    r.norm_f = evaluate_norm(f, kind, sp);
    r.norm_t = evaluate_norm(apply(op, f), kind, sp);
    r.ratio = r.norm_t / r.norm_f;
  });

  EquivalenceReport rep;
  rep.experiment = "truncation";
  rep.kind = kind;
  rep.space = sp;
  rep.op = to_string(op);
  rep.level = corpus.front().level();
  for (auto& r : all) {
    if (r.norm_f < kNegligibleNorm || r.norm_t < kNegligibleNorm) {
      ++rep.skipped;
      continue;
    }
    rep.rows.push_back(std::move(r));
  }
  if (rep.rows.empty())
    throw ValidationError("every corpus function has negligible norm (" + std::to_string(rep.skipped) + " skipped)");
  rep.stats = ratio_stats(rep.rows);
  rep.verdict = spaces::to_json(spaces::truncation_verdict(sp));
  return rep;
}

nlohmann::json to_json(const EquivalenceReport& r) {
  auto rows = nlohmann::json::array();
  for (const auto& row : r.rows)
    rows.push_back({{"tag", row.tag}, {"norm_f", row.norm_f}, {"norm_T", row.norm_t}, {"ratio", row.ratio}});
  return {{"experiment", r.experiment},
          {"norm_kind", to_string(r.kind)},
          {"space", spaces::to_json(r.space)},
          {"operator", r.op},
          {"level", r.level},
          {"count", r.rows.size()},
          {"skipped", r.skipped},
          {"min", r.stats.min},
          {"max", r.stats.max},
          {"geo_mean", r.stats.geo_mean},
          {"spread", number(r.stats.spread)},
          {"verdict", r.verdict},
          {"extra", r.extra},
          {"rows", rows}};
}

void write_csv(std::ostream& out, const EquivalenceReport& r) {
  const auto precision = out.precision(17);
  out << "tag,norm_f,norm_T,ratio\n";
  for (const auto& row : r.rows) out << row.tag << ',' << row.norm_f << ',' << row.norm_t << ',' << row.ratio << '\n';
  out.precision(precision);
}

std::vector<ScalingRow> counterexample_scaling(double s, double p, double q, int n, int j_max) {
  if (j_max < 0) throw ValidationError("j_max must be nonnegative");
  if (n < 1) throw ValidationError("dimension must be at least 1");
  if (static_cast<long>(n) * (j_max + 1) > 26) throw ValidationError("n (j_max + 1) too large for a sampled run");
  const int L = j_max + 1;
  std::vector<ScalingRow> rows(j_max + 1);
  parallel::parallel_for(rows.size(), [&](std::size_t idx) {
    const int j = static_cast<int>(idx);
    const GridFunction f = haar::alternating_haar_sum(j, n, L);
    const GridFunction a = apply(Operator::Abs, f);
    ScalingRow& r = rows[idx];
    r.j = j;
    r.norm_f = haar::b_sequence_norm(haar::analyze(f, L), s, p, q);
    r.norm_abs = haar::b_sequence_norm(haar::analyze(a, L), s, p, q);
    r.ratio = r.norm_f / r.norm_abs;
  });
  return rows;
}

void write_csv(std::ostream& out, const std::vector<ScalingRow>& rows) {
  const auto precision = out.precision(17);
  out << "j,norm_f,norm_abs,ratio\n";
  for (const auto& r : rows) out << r.j << ',' << r.norm_f << ',' << r.norm_abs << ',' << r.ratio << '\n';
  out.precision(precision);
}

BracketCheck bracket_truncation_check(const GridFunction& f) {
  const auto pf = osc::osc_pyramid(f);
  const auto pa = osc::osc_pyramid(apply(Operator::Abs, f));
  BracketCheck c;
  for (std::size_t j = 0; j < pf.size(); ++j)
    for (std::size_t i = 0; i < pf[j].size(); ++i) {
      ++c.cubes;
      if (pa[j].bracket[i] > pf[j].bracket[i]) ++c.lower_violations;
      if (pf[j].bracket[i] > 2 * pa[j].bracket[i] + 2 * pf[j].min_abs[i]) ++c.upper_violations;
    }
  return c;
}

HolderReport holder_perfect_check(const std::vector<GridFunction>& corpus, double s, std::size_t max_pairs) {
  if (!(s > 0.0 && s < 1.0)) throw ValidationError("Hoelder exponent must lie in (0, 1)");
  spaces::SpaceParams sp{spaces::Family::B, s, kInf, kInf, corpus.empty() ? 1 : corpus.front().dim()};
  HolderReport rep;
  rep.ratios = ratio_experiment(corpus, NormKind::Holder, sp, Operator::Abs);
  rep.ratios.experiment = "holder-perfect";
  for (const auto& row : rep.ratios.rows) {
    if (row.norm_t > row.norm_f) ++rep.one_sided_violations;
    rep.max_reverse = std::max(rep.max_reverse, row.norm_f / row.norm_t);
  }

  std::vector<std::size_t> triples(corpus.size()), bad(corpus.size());
  parallel::parallel_for(corpus.size(), [&](std::size_t i) {
    const GridFunction& f = corpus[i];
    std::vector<std::size_t> pos, neg;
    for (std::size_t k = 0; k < f.size(); ++k) {
      if (f[k] > 0) pos.push_back(k);
      if (f[k] < 0) neg.push_back(k);
    }
    if (pos.empty() || neg.empty()) return;
    const std::size_t total = pos.size() * neg.size();
    const std::size_t stride = std::max<std::size_t>(1, total / std::max<std::size_t>(max_pairs, 1));
    for (std::size_t t = 0; t < total; t += stride) {
      ++triples[i];
      if (!witness_holds(f, pos[t / neg.size()], neg[t % neg.size()], s)) ++bad[i];
    }
  });
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    rep.triples += triples[i];
    rep.triple_violations += bad[i];
  }
  return rep;
}

std::size_t sign_change_cells(const GridFunction& f) {
  const Grid& g = f.grid();
  const int n = g.dim();
  std::vector<std::size_t> cells(n);
  std::size_t total = 1;
  for (int l = 0; l < n; ++l) {
    cells[l] = g.count(l) > 0 ? g.count(l) - 1 : 0;
    total *= cells[l];
  }
  std::size_t count = 0;
  std::vector<std::size_t> idx(n);
  for (std::size_t c = 0; c < total; ++c) {
    std::size_t rest = c, base = 0;
    for (int l = n - 1; l >= 0; --l) {
      idx[l] = rest % cells[l];
      rest /= cells[l];
      base += idx[l] * g.stride(l);
    }
    bool plus = false, minus = false;
    for (unsigned corner = 0; corner < (1u << n); ++corner) {
      std::size_t k = base;
      for (int l = 0; l < n; ++l)
        if ((corner >> l) & 1u) k += g.stride(l);
      plus = plus || f[k] > 0;
      minus = minus || f[k] < 0;
    }
    if (plus && minus) ++count;
  }
  return count;
}

SobolevReport sobolev_identity_check(const std::vector<GridFunction>& corpus, double p) {
  if (!(p > 1.0) || is_inf(p)) throw ValidationError("the Sobolev identity check needs 1 < p < inf");
  SobolevReport rep;
  rep.p = p;
  rep.rows.resize(corpus.size());
  parallel::parallel_for(corpus.size(), [&](std::size_t i) {
    const GridFunction& f = corpus[i];
    SobolevRow& r = rep.rows[i];
    r.tag = f.tag();
    r.level = f.level();
    r.gap = std::fabs(diff::w1p_norm(apply(Operator::Abs, f), p) - diff::w1p_norm(f, p));
    r.sign_change_cells = sign_change_cells(f);
    r.unit = std::exp2(-f.level() / p) * std::pow(static_cast<double>(r.sign_change_cells), 1 / p);
  });
  for (const auto& r : rep.rows) {
    if (r.sign_change_cells > 0)
      rep.c_emp = std::max(rep.c_emp, r.gap / r.unit);
    else
      rep.max_gap_no_change = std::max(rep.max_gap_no_change, r.gap);
  }
  return rep;
}

nlohmann::json to_json(const HolderReport& r) {
  auto j = to_json(r.ratios);
  j["one_sided_violations"] = r.one_sided_violations;
  j["max_reverse"] = r.max_reverse;
  j["triples"] = r.triples;
  j["triple_violations"] = r.triple_violations;
  return j;
}

nlohmann::json to_json(const SobolevReport& r) {
  auto rows = nlohmann::json::array();
  for (const auto& row : r.rows)
    rows.push_back({{"tag", row.tag},
                    {"level", row.level},
                    {"gap", row.gap},
                    {"sign_change_cells", row.sign_change_cells},
                    {"unit", row.unit}});
  return {{"experiment", "sobolev-identity"},
          {"p", r.p},
          {"c_emp", r.c_emp},
          {"max_gap_no_change", r.max_gap_no_change},
          {"rows", rows}};
}

}  // namespace fspace::lab

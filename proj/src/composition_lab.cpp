#include "fspace/composition_lab.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "fspace/error.hpp"
#include "fspace/numeric.hpp"
#include "fspace/oscillation.hpp"
#include "fspace/parallel.hpp"

namespace fspace::comp {
namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

void require_finite(double v, const char* what) {
  if (!std::isfinite(v)) throw ValidationError(std::string("scaler parameter ") + what + " must be finite");
}

// Sampled g on an integer box around [lo, hi].
GridFunction sample_scaler(const LipschitzScaler& g, double lo, double hi, int level) {
  const auto corner = static_cast<std::int64_t>(std::floor(lo));
  const auto side = std::max<std::int64_t>(1, static_cast<std::int64_t>(std::ceil(hi)) - corner);
  return sample([&](double t) { return g(t); }, level, corner, side, "g");
}

}  // namespace

std::string to_string(ScalerKind k) {
  switch (k) {
    case ScalerKind::Linear:
      return "linear";
    case ScalerKind::Sinusoidal:
      return "sinusoidal";
    case ScalerKind::Table:
      return "table";
    case ScalerKind::Custom:
      break;
  }
  return "custom";
}

LipschitzScaler LipschitzScaler::linear(double a) {
  require_finite(a, "a");
  if (!(a > 0)) throw ValidationError("linear scaler needs a > 0");
  LipschitzScaler g;
  g.kind_ = ScalerKind::Linear;
  g.name_ = "linear";
  g.l1_ = g.l2_ = a;
  g.params_ = {a};
  g.eval_ = [a](double t) { return a * t; };
  return g;
}

LipschitzScaler LipschitzScaler::sinusoidal(double a, double b) {
  require_finite(a, "a");
  require_finite(b, "b");
  if (!(a > std::fabs(b))) throw ValidationError("sinusoidal scaler needs a > |b|");
  LipschitzScaler g;
  g.kind_ = ScalerKind::Sinusoidal;
  g.name_ = "sinusoidal";
  g.l1_ = a - std::fabs(b);
  g.l2_ = a + std::fabs(b);
  g.params_ = {a, b};
  g.eval_ = [a, b](double t) { return a * t + b * std::sin(t); };
  return g;
}

LipschitzScaler LipschitzScaler::table(std::vector<double> nodes, std::vector<double> values) {
  if (nodes.size() < 2 || nodes.size() != values.size())
    throw ValidationError("table scaler needs at least two nodes and one value per node");
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    require_finite(nodes[i], "node");
    require_finite(values[i], "value");
    if (i > 0 && !(nodes[i] > nodes[i - 1])) throw ValidationError("table scaler nodes must increase strictly");
  }
  LipschitzScaler g;
  g.kind_ = ScalerKind::Table;
  g.name_ = "table";
  g.l1_ = kInf;
  g.l2_ = -kInf;
  for (std::size_t i = 1; i < nodes.size(); ++i) {
    const double slope = (values[i] - values[i - 1]) / (nodes[i] - nodes[i - 1]);
    g.l1_ = std::min(g.l1_, slope);
    g.l2_ = std::max(g.l2_, slope);
  }
  g.nodes_ = std::move(nodes);
  g.values_ = std::move(values);
  g.eval_ = [x = g.nodes_, y = g.values_](double t) {
    auto it = std::upper_bound(x.begin(), x.end(), t);
    std::size_t i = static_cast<std::size_t>(it - x.begin());
    i = std::clamp<std::size_t>(i, 1, x.size() - 1);
    const double w = (t - x[i - 1]) / (x[i] - x[i - 1]);
    return y[i - 1] + w * (y[i] - y[i - 1]);
  };
  return g;
}

LipschitzScaler LipschitzScaler::custom(std::function<double(double)> fn, double l1, double l2, std::string name) {
  if (!fn) throw ValidationError("custom scaler needs a callable");
  if (!(l1 <= l2)) throw ValidationError("custom scaler needs L1 <= L2");
  LipschitzScaler g;
  g.kind_ = ScalerKind::Custom;
  g.name_ = std::move(name);
  g.l1_ = l1;
  g.l2_ = l2;
  g.eval_ = std::move(fn);
  return g;
}

nlohmann::json LipschitzScaler::to_json() const {
  switch (kind_) {
    case ScalerKind::Linear:
      return {{"kind", "linear"}, {"a", params_[0]}};
    case ScalerKind::Sinusoidal:
      return {{"kind", "sinusoidal"}, {"a", params_[0]}, {"b", params_[1]}};
    case ScalerKind::Table:
      return {{"kind", "table"}, {"nodes", nodes_}, {"values", values_}};
    case ScalerKind::Custom:
      break;
  }
  return {{"kind", "custom"}, {"name", name_}, {"L1", l1_}, {"L2", l2_}};
}

LipschitzScaler LipschitzScaler::from_json(const nlohmann::json& j) {
  try {
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "linear") return linear(j.at("a").get<double>());
    if (kind == "sinusoidal") return sinusoidal(j.at("a").get<double>(), j.at("b").get<double>());
    if (kind == "table") return table(j.at("nodes").get<std::vector<double>>(), j.at("values").get<std::vector<double>>());
    throw ValidationError("unknown scaler kind '" + kind + "'");
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("malformed scaler descriptor: ") + e.what());
  }
}

ScalerBounds validate_scaler(const LipschitzScaler& g, double lo, double hi, double step) {
  if (!(lo < hi) || !(step > 0) || !std::isfinite(lo) || !std::isfinite(hi))
    throw ValidationError("validation range needs lo < hi and step > 0");
  if (std::fabs(g(0.0)) > 1e-12) throw ValidationError("not a scaling function: g(0) = " + std::to_string(g(0.0)));
  const auto n = static_cast<std::size_t>(std::ceil((hi - lo) / step));
  if (n > 100'000'000) throw ValidationError("validation grid too fine");
  std::vector<double> t;
  t.reserve(n + 2);
  for (std::size_t i = 0; i <= n; ++i) t.push_back(std::min(hi, lo + static_cast<double>(i) * step));
  if (lo < 0 && hi > 0) t.push_back(0.0);
  std::sort(t.begin(), t.end());
  t.erase(std::unique(t.begin(), t.end()), t.end());

  ScalerBounds b{kInf, -kInf};
  double prev = g(t[0]);
  for (std::size_t i = 1; i < t.size(); ++i) {
    const double cur = g(t[i]);
    const double slope = (cur - prev) / (t[i] - t[i - 1]);
    if (!(slope > 0))
      throw ValidationError("not a scaling function: slope " + std::to_string(slope) + " on [" +
                            std::to_string(t[i - 1]) + ", " + std::to_string(t[i]) + "]");
    b.l1 = std::min(b.l1, slope);
    b.l2 = std::max(b.l2, slope);
    prev = cur;
  }
  if (b.l1 < g.l1() * (1 - 1e-9) || b.l2 > g.l2() * (1 + 1e-9))
    throw ValidationError("scaler slopes [" + std::to_string(b.l1) + ", " + std::to_string(b.l2) +
                          "] leave the claimed bounds [" + std::to_string(g.l1()) + ", " + std::to_string(g.l2()) + "]");
  return b;
}

GridFunction compose(const LipschitzScaler& g, const GridFunction& f) {
  return f.map([&](double v) { return g(v); }, f.tag());
}

GridFunction abs_compose(const LipschitzScaler& g, const GridFunction& f) {
  return f.map([&](double v) { return std::fabs(g(v)); }, f.tag());
}

double invert_scaler(const LipschitzScaler& g, double tau, double tol) {
  if (!std::isfinite(tau)) throw ValidationError("cannot invert at a non-finite value");
  if (tau == 0.0) return 0.0;
  const double r = std::fabs(tau) / g.l1();
  double lo = -r, hi = r;
  if (!(g(lo) <= tau && tau <= g(hi)))
    throw ValidationError("bisection interval [" + std::to_string(lo) + ", " + std::to_string(hi) +
                          "] does not bracket " + std::to_string(tau));
  for (int it = 0; it < 2000; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    (g(mid) < tau ? lo : hi) = mid;
  }
  const double t = std::fabs(g(lo) - tau) <= std::fabs(g(hi) - tau) ? lo : hi;
  if (std::fabs(g(t) - tau) > tol)
    throw ValidationError("inverse not resolved to tolerance at " + std::to_string(tau));
  return t;
}

LpBounds lp_bounds_check(const LipschitzScaler& g, const GridFunction& f, double p) {
  const GridFunction gf = compose(g, f);
  const GridFunction agf = abs_compose(g, f);
  LpBounds b;
  b.norm_f = lp_norm(f, p);
  b.norm_gf = lp_norm(gf, p);
  b.norm_abs_gf = lp_norm(agf, p);
  b.residual = std::fabs(b.norm_gf - b.norm_abs_gf);
  b.lower_ok = g.l1() * b.norm_f <= b.norm_gf * (1 + 1e-12);
  b.upper_ok = b.norm_gf <= g.l2() * b.norm_f * (1 + 1e-12);
  for (std::size_t k = 0; k < f.size(); ++k) {
    const double a = std::fabs(f[k]), v = std::fabs(gf[k]);
    if (v < g.l1() * a * (1 - 1e-12) || v > g.l2() * a * (1 + 1e-12)) ++b.pointwise_violations;
  }
  return b;
}

lab::BracketCheck bracket_composition_check(const LipschitzScaler& g, const GridFunction& f) {
  const GridFunction gf = compose(g, f);
  const auto pf = osc::osc_pyramid(f);
  const auto pg = osc::osc_pyramid(gf);
  // Rounding of g itself: a few ulp of the largest value.
  const double slack = 8 * kEps * std::max(std::fabs(gf.min()), std::fabs(gf.max()));
  lab::BracketCheck c;
  for (std::size_t j = 0; j < pf.size(); ++j)
    for (std::size_t i = 0; i < pf[j].size(); ++i) {
      ++c.cubes;
      const double bf = pf[j].bracket[i], bg = pg[j].bracket[i];
      if (bg < g.l1() * bf * (1 - 8 * kEps) - slack) ++c.lower_violations;
      if (bg > g.l2() * bf * (1 + 8 * kEps) + slack) ++c.upper_violations;
    }
  return c;
}

GPrimeReport gprime_check(const LipschitzScaler& g, double p, double lo, double hi, int level) {
  if (!(p > 0) || is_inf(p)) throw ValidationError("g' check needs 0 < p < inf");
  const GridFunction gs = sample_scaler(g, lo, hi, level);
  const double h = gs.grid().spacing();
  std::vector<double> d(gs.size());
  for (std::size_t k = 0; k < gs.size(); ++k) {
    const double t = gs.grid().coordinate(0, k);
    d[k] = (g(t + h) - g(t - h)) / (2 * h);
  }
  const GridFunction deriv(gs.grid(), std::move(d), "g'");
  GPrimeReport r;
  r.p = p;
  const auto res = diff::besov_diff_seminorm(deriv, 1 / p, 1, p, kInf, 0, level);
  r.seminorm = res.value;
  r.growth = res.report;
  r.finite = r.growth.verdict == diff::Verdict::Bounded;
  return r;
}

std::string to_string(Slot s) { return s == Slot::Compose ? "compose" : "abs-compose"; }

Slot parse_slot(const std::string& name) {
  if (name == "compose") return Slot::Compose;
  if (name == "abs-compose") return Slot::AbsCompose;
  throw ValidationError("unknown composition slot '" + name + "'");
}

lab::EquivalenceReport composition_experiment(const std::vector<GridFunction>& corpus, const LipschitzScaler& g,
                                              lab::NormKind kind, const spaces::SpaceParams& sp, Slot slot) {
  sp.validate();
  if (corpus.empty()) throw ValidationError("empty corpus");
  double lo = 0.0, hi = 0.0;
  for (const auto& f : corpus) {
    if (!f.combinable(corpus.front())) throw ValidationError("corpus functions live on different grids");
    lo = std::min(lo, f.min());
    hi = std::max(hi, f.max());
  }
  const double margin = 0.1 * std::max(hi - lo, 1e-12);
  lo -= margin;
  hi += margin;
  const ScalerBounds emp = validate_scaler(g, lo, hi, (hi - lo) * 1e-4);

  std::vector<lab::RatioRow> all(corpus.size());
  std::vector<lab::BracketCheck> brackets(corpus.size());
  const bool osc_kind = kind == lab::NormKind::OscB || kind == lab::NormKind::OscF;
  parallel::parallel_for(corpus.size(), [&](std::size_t i) {
    const GridFunction& f = corpus[i];
    lab::RatioRow& r = all[i];
    r.tag = f.tag();
    r.norm_f = lab::evaluate_norm(f, kind, sp);
    r.norm_t = lab::evaluate_norm(slot == Slot::Compose ? compose(g, f) : abs_compose(g, f), kind, sp);
    r.ratio = r.norm_t / r.norm_f;
    if (osc_kind) brackets[i] = bracket_composition_check(g, f);
  });

  lab::EquivalenceReport rep;
  rep.experiment = "composition";
  rep.kind = kind;
  rep.space = sp;
  rep.op = to_string(slot);
  rep.level = corpus.front().level();
  for (auto& r : all) {
    if (r.norm_f < lab::kNegligibleNorm || r.norm_t < lab::kNegligibleNorm) {
      ++rep.skipped;
      continue;
    }
    rep.rows.push_back(std::move(r));
  }
  if (rep.rows.empty()) throw ValidationError("every corpus function has negligible norm");
  rep.stats = lab::ratio_stats(rep.rows);

  spaces::ScalerMeta meta;
  meta.is_lipschitz_scaling = true;
  nlohmann::json gprime = nullptr;
  if (!is_inf(sp.p)) {
    const auto gc = gprime_check(g, sp.p, lo, hi);
    meta.gprime_seminorm_finite = gc.finite;
    gprime = {{"p", sp.p},
              {"sigma", 1 / sp.p},
              {"seminorm", gc.seminorm},
              {"verdict", diff::to_string(gc.growth.verdict)},
              {"finite", gc.finite}};
  }
  rep.verdict = spaces::to_json(spaces::composition_verdict(sp, meta));
  rep.extra = {{"scaler", g.to_json()},
               {"validation_range", {lo, hi}},
               {"L1_claimed", g.l1()},
               {"L2_claimed", g.l2()},
               {"L1_empirical", emp.l1},
               {"L2_empirical", emp.l2},
               {"g_prime", gprime}};
  if (osc_kind) {
    lab::BracketCheck total;
    for (const auto& c : brackets) {
      total.cubes += c.cubes;
      total.lower_violations += c.lower_violations;
      total.upper_violations += c.upper_violations;
    }
    rep.extra["bracket_sandwich"] = {{"cubes", total.cubes},
                                     {"lower_violations", total.lower_violations},
                                     {"upper_violations", total.upper_violations}};
  }
  if (sp.family == spaces::Family::B && sp.p > 1 && !is_inf(sp.p) && slot == Slot::Compose) {
    const GridFunction gs = sample_scaler(g, lo, hi, 10);
    const double sup = std::max(std::fabs(g(lo)), std::fabs(g(hi)));
    const double gnorm = sup + diff::besov_diff_seminorm(gs, 1 + 1 / sp.p, 2, sp.p, 1, 0, 10).value;
    double c = 0.0;
    for (const auto& r : rep.rows) c = std::max(c, r.norm_t / (gnorm * r.norm_f));
    rep.extra["sublinear_constant"] = {{"g_norm", gnorm}, {"c_measured", c}};
  }
  return rep;
}

}  // namespace fspace::comp

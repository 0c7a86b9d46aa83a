#include "fspace/fubini.hpp"

#include <algorithm>
#include <cmath>

#include "fspace/error.hpp"
#include "fspace/numeric.hpp"
#include "fspace/oscillation.hpp"
#include "fspace/parallel.hpp"

namespace fspace::fubini {
namespace {

void check_axis(const GridFunction& f, int axis) {
  if (f.dim() < 2) throw ValidationError("slices need dimension >= 2; got " + std::to_string(f.dim()));
  if (axis < 0 || axis >= f.dim()) throw ValidationError("axis " + std::to_string(axis) + " out of range");
}

}  // namespace

void check_params(const spaces::SpaceParams& sp, lab::NormKind norm1d) {
  sp.validate();
  if (norm1d != lab::NormKind::FaberB && norm1d != lab::NormKind::OscB)
    throw ValidationError("sliced norms use faber-B or osc-B, not " + lab::to_string(norm1d));
  if (sp.p != sp.q) {
    if (sp.family == spaces::Family::B)
      throw PreconditionError("B spaces have the Fubini property only for p = q", "Prop2.5(ii)");
    throw ValidationError("the sliced norm is provided for p = q only");
  }
}

Grid slice_lattice(const GridFunction& f, int axis) {
  check_axis(f, axis);
  const Grid& g = f.grid();
  std::vector<std::int64_t> origin;
  std::vector<std::size_t> counts;
  for (int l = 0; l < g.dim(); ++l)
    if (l != axis) {
      origin.push_back(g.origin(l));
      counts.push_back(g.count(l));
    }
  return Grid(g.level(), origin, counts);
}

std::vector<GridFunction> slices(const GridFunction& f, int axis) {
  const Grid lattice = slice_lattice(f, axis);
  const Grid& g = f.grid();
  const Grid line(g.level(), {g.origin(axis)}, {g.count(axis)});
  std::vector<GridFunction> out;
  out.reserve(lattice.size());
  std::vector<std::size_t> rest(lattice.dim());
  for (std::size_t c = 0; c < lattice.size(); ++c) {
    lattice.unravel(c, rest);
    std::size_t base = 0;
    for (int l = 0, r = 0; l < g.dim(); ++l)
      if (l != axis) base += rest[r++] * g.stride(l);
    std::vector<double> v(g.count(axis));
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = f[base + i * g.stride(axis)];
    out.emplace_back(line, std::move(v), f.tag());
  }
  return out;
}

FubiniNorm fubini_norm_detail(const GridFunction& f, const spaces::SpaceParams& sp, lab::NormKind norm1d) {
  check_params(sp, norm1d);
  if (f.dim() < 2) throw ValidationError("the sliced norm needs dimension >= 2");
  spaces::SpaceParams line = sp;
  line.n = 1;
  FubiniNorm res;
  for (int axis = 0; axis < f.dim(); ++axis) {
    const Grid lattice = slice_lattice(f, axis);
    const auto sl = slices(f, axis);
    std::vector<double> norms(sl.size());
    parallel::parallel_for(sl.size(), [&](std::size_t i) { norms[i] = lab::evaluate_norm(sl[i], norm1d, line); });
    double outer = 0.0;
    if (is_inf(sp.p)) {
      for (double v : norms) outer = std::max(outer, v);
    } else {
      std::vector<std::size_t> idx(lattice.dim());
      outer = std::pow(pairwise_sum(norms.size(),
                                    [&](std::size_t i) {
                                      lattice.unravel(i, idx);
                                      return lattice.node_weight(idx) * std::pow(norms[i], sp.p);
                                    }),
                       1 / sp.p);
    }
    res.per_axis.push_back(outer);
  }
  res.value = pairwise_sum(res.per_axis);
  return res;
}

double fubini_norm(const GridFunction& f, const spaces::SpaceParams& sp, lab::NormKind norm1d) {
  return fubini_norm_detail(f, sp, norm1d).value;
}

double fubini_compare(const GridFunction& f, const spaces::SpaceParams& sp, lab::NormKind norm1d) {
  const double sliced = fubini_norm(f, sp, norm1d);
  const double direct = osc::b_osc_norm(f, sp.s, sp.p, sp.q);
  if (!(direct > 0)) throw ValidationError("direct norm vanishes; ratio undefined");
  return sliced / direct;
}

std::vector<GridFunction> tensor_corpus(const CorpusSpec& spec, std::size_t count, int level, std::int64_t corner,
                                        std::int64_t side) {
  CorpusSpec factors = spec;
  factors.count = 2 * count;
  const auto u = generate_corpus(factors, level, corner, side, 1);
  const Grid plane = Grid::cube(2, level, corner, side);
  std::vector<GridFunction> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    const GridFunction& a = u[2 * i];
    const GridFunction& b = u[2 * i + 1];
    std::vector<double> v(plane.size());
    for (std::size_t k = 0; k < v.size(); ++k) v[k] = a[k / b.size()] * b[k % b.size()];
    out.emplace_back(plane, std::move(v), "tensor-" + std::to_string(i));
  }
  return out;
}

FubiniReport fubini_experiment(const std::vector<GridFunction>& corpus, const spaces::SpaceParams& sp,
                               lab::NormKind norm1d) {
  check_params(sp, norm1d);
  if (corpus.empty()) throw ValidationError("empty corpus");
  FubiniReport rep;
  rep.space = sp;
  rep.norm1d = norm1d;
  rep.level = corpus.front().level();
  std::vector<lab::RatioRow> all(corpus.size());
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    const GridFunction& f = corpus[i];
    if (!f.combinable(corpus.front())) throw ValidationError("corpus functions live on different grids");
    all[i].tag = f.tag();
    all[i].norm_f = osc::b_osc_norm(f, sp.s, sp.p, sp.q);
    all[i].norm_t = fubini_norm(f, sp, norm1d);
    all[i].ratio = all[i].norm_t / all[i].norm_f;
  }
  for (auto& r : all) {
    if (r.norm_f < lab::kNegligibleNorm || r.norm_t < lab::kNegligibleNorm) {
      ++rep.skipped;
      continue;
    }
    rep.rows.push_back(std::move(r));
  }
  rep.stats = lab::ratio_stats(rep.rows);
  return rep;
}

nlohmann::json to_json(const FubiniReport& r) {
  auto rows = nlohmann::json::array();
  for (const auto& row : r.rows)
    rows.push_back({{"tag", row.tag}, {"direct", row.norm_f}, {"sliced", row.norm_t}, {"ratio", row.ratio}});
  return {{"experiment", "fubini"},
          {"space", spaces::to_json(r.space)},
          {"norm_kind", lab::to_string(r.norm1d)},
          {"level", r.level},
          {"count", r.rows.size()},
          {"skipped", r.skipped},
          {"min", r.stats.min},
          {"max", r.stats.max},
          {"geo_mean", r.stats.geo_mean},
          {"band", r.stats.spread},
          {"rows", rows}};
}

}  // namespace fspace::fubini

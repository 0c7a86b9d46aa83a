#include "fspace/grid.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <random>
#include <sstream>

#include "fspace/error.hpp"
#include "fspace/numeric.hpp"

namespace fspace {

// ---------------------------------------------------------------------------
// Grid

Grid::Grid(int level, std::vector<std::int64_t> origin, std::vector<std::size_t> counts)
    : level_(level), origin_(std::move(origin)), counts_(std::move(counts)) {
  if (level_ < 0 || level_ > 40) throw ValidationError("grid level must lie in [0, 40]");
  if (counts_.empty()) throw ValidationError("grid dimension must be at least 1");
  if (origin_.size() != counts_.size()) throw ValidationError("grid origin and counts differ in dimension");
  for (std::size_t c : counts_)
    if (c == 0) throw ValidationError("grid axes must carry at least one node");
  compute_strides();
}

Grid Grid::cube(int dim, int level, std::span<const std::int64_t> corner, std::int64_t side) {
  if (dim < 1) throw ValidationError("grid dimension must be at least 1");
  if (side < 1) throw ValidationError("box side must be at least 1");
  if (static_cast<int>(corner.size()) != dim) throw ValidationError("box corner must have one entry per axis");
  if (level < 0 || level > 40) throw ValidationError("grid level must lie in [0, 40]");
  const std::int64_t per_unit = std::int64_t{1} << level;
  std::vector<std::int64_t> origin(dim);
  for (int l = 0; l < dim; ++l) origin[l] = corner[l] * per_unit;
  std::vector<std::size_t> counts(dim, static_cast<std::size_t>(side * per_unit + 1));
  return Grid(level, std::move(origin), std::move(counts));
}

Grid Grid::cube(int dim, int level, std::int64_t corner, std::int64_t side) {
  std::vector<std::int64_t> c(std::max(dim, 0), corner);
  return cube(dim, level, c, side);
}

void Grid::compute_strides() {
  strides_.assign(counts_.size(), 1);
  for (int l = dim() - 2; l >= 0; --l) strides_[l] = strides_[l + 1] * counts_[l + 1];
}

double Grid::spacing() const { return std::ldexp(1.0, -level_); }

std::size_t Grid::size() const {
  return std::accumulate(counts_.begin(), counts_.end(), std::size_t{1}, std::multiplies<>());
}

double Grid::coordinate(int axis, std::size_t i) const {
  return std::ldexp(static_cast<double>(origin_[axis] + static_cast<std::int64_t>(i)), -level_);
}

std::size_t Grid::flat(std::span<const std::size_t> index) const {
  std::size_t k = 0;
  for (int l = 0; l < dim(); ++l) k += index[l] * strides_[l];
  return k;
}

void Grid::unravel(std::size_t flat, std::span<std::size_t> index) const {
  for (int l = 0; l < dim(); ++l) {
    index[l] = flat / strides_[l];
    flat -= index[l] * strides_[l];
  }
}

double Grid::node_weight(std::span<const std::size_t> index) const {
  double w = std::ldexp(1.0, -level_ * dim());
  for (int l = 0; l < dim(); ++l) {
    if (counts_[l] == 1) continue;
    if (index[l] == 0 || index[l] + 1 == counts_[l]) w *= 0.5;
  }
  return w;
}

bool Grid::unit_aligned() const {
  const std::int64_t per_unit = cells_per_unit();
  for (int l = 0; l < dim(); ++l) {
    if (((origin_[l] % per_unit) + per_unit) % per_unit != 0) return false;
    if ((static_cast<std::int64_t>(counts_[l]) - 1) % per_unit != 0) return false;
    if (counts_[l] < 2) return false;
  }
  return true;
}

bool Grid::is_cube() const {
  if (!unit_aligned()) return false;
  return std::all_of(counts_.begin(), counts_.end(), [&](std::size_t c) { return c == counts_[0]; });
}

std::vector<std::int64_t> Grid::corner() const {
  if (!unit_aligned()) throw ValidationError("grid box is not aligned to integer coordinates");
  std::vector<std::int64_t> c(dim());
  for (int l = 0; l < dim(); ++l) c[l] = origin_[l] / cells_per_unit();
  return c;
}

std::int64_t Grid::side() const {
  if (!is_cube()) throw ValidationError("grid box is not an integer cube");
  return (static_cast<std::int64_t>(counts_[0]) - 1) / cells_per_unit();
}

// ---------------------------------------------------------------------------
// GridFunction

GridFunction::GridFunction(Grid grid, std::vector<double> samples, std::string tag)
    : grid_(std::move(grid)), samples_(std::move(samples)), tag_(std::move(tag)) {
  if (samples_.size() != grid_.size())
    throw ValidationError("sample count " + std::to_string(samples_.size()) + " does not match grid size " +
                          std::to_string(grid_.size()));
  for (std::size_t i = 0; i < samples_.size(); ++i)
    if (!std::isfinite(samples_[i])) throw ValidationError("non-finite sample at node " + std::to_string(i));
}

GridFunction GridFunction::with_tag(std::string tag) const { return GridFunction(grid_, samples_, std::move(tag)); }

GridFunction GridFunction::map(const std::function<double(double)>& op, std::string tag) const {
  std::vector<double> out(samples_.size());
  std::transform(samples_.begin(), samples_.end(), out.begin(), op);
  return GridFunction(grid_, std::move(out), tag.empty() ? tag_ : std::move(tag));
}

namespace {
void require_combinable(const GridFunction& a, const GridFunction& b) {
  if (!a.combinable(b)) throw ValidationError("grid functions live on different grids");
}
}  // namespace

GridFunction GridFunction::operator+(const GridFunction& other) const {
  require_combinable(*this, other);
  std::vector<double> out(samples_.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = samples_[i] + other.samples_[i];
  return GridFunction(grid_, std::move(out), tag_);
}

GridFunction GridFunction::operator-(const GridFunction& other) const {
  require_combinable(*this, other);
  std::vector<double> out(samples_.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = samples_[i] - other.samples_[i];
  return GridFunction(grid_, std::move(out), tag_);
}

GridFunction GridFunction::operator*(double c) const {
  return map([c](double v) { return c * v; });
}

double GridFunction::min() const { return *std::min_element(samples_.begin(), samples_.end()); }
double GridFunction::max() const { return *std::max_element(samples_.begin(), samples_.end()); }

// ---------------------------------------------------------------------------
// Sampling and norms

GridFunction sample(const Generator& generator, const Grid& grid, std::string tag) {
  const int n = grid.dim();
  std::vector<double> values(grid.size());
  std::vector<std::size_t> idx(n);
  std::vector<double> x(n);
  for (std::size_t k = 0; k < values.size(); ++k) {
    grid.unravel(k, idx);
    for (int l = 0; l < n; ++l) x[l] = grid.coordinate(l, idx[l]);
    const double v = generator(x);
    if (!std::isfinite(v)) {
      std::ostringstream msg;
      msg << "generator returned a non-finite value at node " << k << " (x = (";
      for (int l = 0; l < n; ++l) msg << (l ? ", " : "") << x[l];
      msg << "))";
      throw ValidationError(msg.str());
    }
    values[k] = v;
  }
  return GridFunction(grid, std::move(values), std::move(tag));
}

GridFunction sample(const Generator& generator, int level, std::int64_t corner, std::int64_t side, int dim,
                    std::string tag) {
  return sample(generator, Grid::cube(dim, level, corner, side), std::move(tag));
}

GridFunction sample(const Generator1D& generator, int level, std::int64_t corner, std::int64_t side,
                    std::string tag) {
  return sample([&](std::span<const double> x) { return generator(x[0]); }, Grid::cube(1, level, corner, side),
                std::move(tag));
}

double lp_norm(const GridFunction& f, double p) {
  if (!(p > 0.0)) throw ValidationError("L_p exponent must be positive");
  const auto values = f.samples();
  if (is_inf(p)) {
    double m = 0.0;
    for (double v : values) m = std::fmax(m, std::fabs(v));
    return m;
  }
  const Grid& grid = f.grid();
  double sum = 0.0;
  if (grid.dim() == 1) {
    const std::size_t n = values.size();
    const double h = grid.spacing();
    sum = pairwise_sum(n, [&](std::size_t i) {
      const double w = (n > 1 && (i == 0 || i + 1 == n)) ? 0.5 * h : h;
      return w * pow_abs(values[i], p);
    });
  } else {
    sum = pairwise_sum(values.size(), [&](std::size_t k) {
      std::size_t idx[8];
      std::vector<std::size_t> big;
      std::span<std::size_t> index;
      if (grid.dim() <= 8) {
        index = std::span<std::size_t>(idx, grid.dim());
      } else {
        big.resize(grid.dim());
        index = big;
      }
      grid.unravel(k, index);
      return grid.node_weight(index) * pow_abs(values[k], p);
    });
  }
  return sum == 0.0 ? 0.0 : std::pow(sum, 1.0 / p);
}

// ---------------------------------------------------------------------------
// Corpus generation

std::string to_string(CorpusKind kind) {
  switch (kind) {
    case CorpusKind::PiecewiseLinearRandomKnots: return "piecewise-linear-random-knots";
    case CorpusKind::SmoothBumpSum: return "smooth-bump-sum";
    case CorpusKind::HaarStep: return "haar-step";
    case CorpusKind::SignOscillating: return "sign-oscillating";
  }
  return "unknown";
}

CorpusKind parse_corpus_kind(const std::string& name) {
  for (auto k : {CorpusKind::PiecewiseLinearRandomKnots, CorpusKind::SmoothBumpSum, CorpusKind::HaarStep,
                 CorpusKind::SignOscillating})
    if (to_string(k) == name) return k;
  throw ValidationError("unknown corpus generator kind '" + name + "'");
}

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// Uniform draws with a platform-independent mapping from the engine output.
class Draw {
 public:
  explicit Draw(std::uint64_t seed) : engine_(seed) {}
  double unit() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * unit(); }
  std::int64_t integer(std::int64_t lo, std::int64_t hi) {  // inclusive
    const auto span = static_cast<std::uint64_t>(hi - lo + 1);
    return lo + static_cast<std::int64_t>(engine_() % span);
  }

 private:
  std::mt19937_64 engine_;
};

// Lattice of knots at spacing 2^-k over the box, flat row-major.
struct KnotLattice {
  int dim;
  int k;
  std::vector<std::int64_t> corner;
  std::size_t per_axis;  // side * 2^k + 1
  std::size_t size() const {
    std::size_t s = 1;
    for (int l = 0; l < dim; ++l) s *= per_axis;
    return s;
  }
};

GridFunction piecewise_linear(const CorpusSpec& spec, const Grid& grid, Draw& draw, const std::string& tag) {
  const int n = grid.dim();
  const int k = std::clamp(spec.structure_level, 0, grid.level());
  const std::int64_t side = grid.side();
  KnotLattice lat{n, k, grid.corner(), static_cast<std::size_t>(side * (std::int64_t{1} << k) + 1)};
  const std::size_t per_unit = std::size_t{1} << k;

  std::vector<double> knots(lat.size(), 0.0);
  std::vector<char> pinned(lat.size(), 0);
  std::vector<std::size_t> idx(n);
  for (std::size_t t = 0; t < knots.size(); ++t) {
    std::size_t rem = t;
    bool on_integer = false;
    for (int l = n - 1; l >= 0; --l) {
      idx[l] = rem % lat.per_axis;
      rem /= lat.per_axis;
      if (idx[l] % per_unit == 0) on_integer = true;
    }
    pinned[t] = on_integer;
  }
  for (int attempt = 0; attempt < 64; ++attempt) {
    double sum = 0.0;
    std::size_t free = 0;
    for (std::size_t t = 0; t < knots.size(); ++t) {
      knots[t] = pinned[t] ? 0.0 : draw.uniform(spec.amplitude_lo, spec.amplitude_hi);
      if (!pinned[t]) {
        sum += knots[t];
        ++free;
      }
    }
    if (spec.zero_mean && free > 0) {
      const double mean = sum / static_cast<double>(free);
      for (std::size_t t = 0; t < knots.size(); ++t)
        if (!pinned[t]) knots[t] -= mean;
    }
    if (!spec.zero_mean || free < 2) break;
    const bool has_pos = std::any_of(knots.begin(), knots.end(), [](double v) { return v > 0; });
    const bool has_neg = std::any_of(knots.begin(), knots.end(), [](double v) { return v < 0; });
    if (has_pos && has_neg) break;
  }

  // Multilinear interpolation; knots sit on grid nodes because k <= L.
  return sample(
      [&](std::span<const double> x) {
        double value = 0.0;
        std::vector<std::size_t> base(n);
        std::vector<double> frac(n);
        for (int l = 0; l < n; ++l) {
          const double u = std::ldexp(x[l] - static_cast<double>(lat.corner[l]), k);
          auto b = static_cast<std::size_t>(std::floor(u));
          if (b + 1 >= lat.per_axis) b = lat.per_axis - 2;
          base[l] = b;
          frac[l] = u - static_cast<double>(b);
        }
        for (std::size_t corner = 0; corner < (std::size_t{1} << n); ++corner) {
          double w = 1.0;
          std::size_t flat = 0;
          for (int l = 0; l < n; ++l) {
            const bool up = (corner >> l) & 1U;
            w *= up ? frac[l] : 1.0 - frac[l];
            flat = flat * lat.per_axis + base[l] + (up ? 1 : 0);
          }
          if (w != 0.0) value += w * knots[flat];
        }
        return value;
      },
      grid, tag);
}

GridFunction haar_step(const CorpusSpec& spec, const Grid& grid, Draw& draw, const std::string& tag) {
  const int n = grid.dim();
  const int k = std::clamp(spec.structure_level, 0, grid.level());
  const auto corner = grid.corner();
  const auto cells_per_axis = static_cast<std::size_t>(grid.side() << k);
  std::size_t cells = 1;
  for (int l = 0; l < n; ++l) cells *= cells_per_axis;
  std::vector<double> values(cells);
  for (double& v : values) v = draw.uniform(spec.amplitude_lo, spec.amplitude_hi);
  if (spec.zero_mean) {
    const double mean = pairwise_sum(values) / static_cast<double>(cells);
    for (double& v : values) v -= mean;
  }
  // Cell values are multiples of 2^-24 so that Haar sums over them are exact.
  for (double& v : values) v = std::ldexp(std::nearbyint(std::ldexp(v, 24)), -24);
  return sample(
      [&](std::span<const double> x) {
        std::size_t flat = 0;
        for (int l = 0; l < n; ++l) {
          const auto c = static_cast<std::int64_t>(std::floor(std::ldexp(x[l] - static_cast<double>(corner[l]), k)));
          if (c < 0 || c >= static_cast<std::int64_t>(cells_per_axis)) return 0.0;  // right face: outside every cell
          flat = flat * cells_per_axis + static_cast<std::size_t>(c);
        }
        return values[flat];
      },
      grid, tag);
}

GridFunction bump_sum(const CorpusSpec& spec, const Grid& grid, Draw& draw, const std::string& tag) {
  const int n = grid.dim();
  const auto corner = grid.corner();
  const std::int64_t side = grid.side();
  std::size_t bumps = static_cast<std::size_t>(std::max(1, spec.structure_level));
  if (spec.zero_mean && bumps < 2) bumps = 2;

  struct Bump {
    std::vector<double> center;
    double radius;
    double amplitude;
  };
  std::vector<Bump> list(bumps);
  double sum = 0.0;
  for (auto& b : list) {
    b.radius = draw.uniform(0.1, 0.45);
    b.center.resize(n);
    for (int l = 0; l < n; ++l) {
      const auto cell = draw.integer(0, side - 1);
      b.center[l] = static_cast<double>(corner[l] + cell) + draw.uniform(b.radius, 1.0 - b.radius);
    }
    b.amplitude = draw.uniform(spec.amplitude_lo, spec.amplitude_hi);
    sum += b.amplitude;
  }
  if (spec.zero_mean) {
    const double mean = sum / static_cast<double>(bumps);
    for (auto& b : list) b.amplitude -= mean;
  }
  return sample(
      [&](std::span<const double> x) {
        double v = 0.0;
        for (const auto& b : list) {
          double prod = b.amplitude;
          for (int l = 0; l < n && prod != 0.0; ++l) {
            const double u = (x[l] - b.center[l]) / b.radius;
            const double w = 1.0 - u * u;
            prod = (w > 0.0) ? prod * w * w * w : 0.0;
          }
          v += prod;
        }
        return v;
      },
      grid, tag);
}

GridFunction sign_oscillating(const CorpusSpec& spec, const Grid& grid, Draw& draw, const std::string& tag) {
  const int n = grid.dim();
  const auto corner = grid.corner();
  const int top = std::max(1, spec.structure_level);
  std::vector<double> freq(n);
  for (int l = 0; l < n; ++l) freq[l] = std::ldexp(M_PI, static_cast<int>(draw.integer(1, top)));
  const double amplitude = draw.uniform(spec.amplitude_lo, spec.amplitude_hi);
  return sample(
      [&](std::span<const double> x) {
        double v = amplitude;
        for (int l = 0; l < n; ++l) v *= std::sin(freq[l] * (x[l] - static_cast<double>(corner[l])));
        return v;
      },
      grid, tag);
}

}  // namespace

std::vector<GridFunction> generate_corpus(const CorpusSpec& spec, const Grid& grid) {
  if (spec.count < 1) throw ValidationError("corpus count must be at least 1");
  if (!grid.is_cube()) throw ValidationError("corpus grids must be integer cubes");
  if (!(spec.amplitude_lo <= spec.amplitude_hi)) throw ValidationError("amplitude range is empty");
  std::vector<GridFunction> out;
  out.reserve(spec.count);
  for (std::size_t i = 0; i < spec.count; ++i) {
    Draw draw(splitmix64(spec.seed ^ splitmix64(i + 1)));
    const std::string tag = to_string(spec.kind) + "#" + std::to_string(spec.seed) + "#" + std::to_string(i);
    switch (spec.kind) {
      case CorpusKind::PiecewiseLinearRandomKnots: out.push_back(piecewise_linear(spec, grid, draw, tag)); break;
      case CorpusKind::SmoothBumpSum: out.push_back(bump_sum(spec, grid, draw, tag)); break;
      case CorpusKind::HaarStep: out.push_back(haar_step(spec, grid, draw, tag)); break;
      case CorpusKind::SignOscillating: out.push_back(sign_oscillating(spec, grid, draw, tag)); break;
    }
  }
  return out;
}

std::vector<GridFunction> generate_corpus(const CorpusSpec& spec, int level, std::int64_t corner,
                                          std::int64_t side, int dim) {
  return generate_corpus(spec, Grid::cube(dim, level, corner, side));
}

// ---------------------------------------------------------------------------
// Serialization

nlohmann::json to_json(const GridFunction& f) {
  const Grid& g = f.grid();
  nlohmann::json box;
  if (g.is_cube()) {
    box["corner"] = g.corner();
    box["side"] = g.side();
  } else {
    std::vector<double> corner(g.dim()), side(g.dim());
    for (int l = 0; l < g.dim(); ++l) {
      corner[l] = g.coordinate(l, 0);
      side[l] = std::ldexp(static_cast<double>(g.count(l) - 1), -g.level());
    }
    box["corner"] = corner;
    box["side"] = side;
  }
  return nlohmann::json{{"dim", g.dim()},
                        {"level", g.level()},
                        {"box", box},
                        {"samples", std::vector<double>(f.samples().begin(), f.samples().end())},
                        {"tag", f.tag()}};
}

GridFunction grid_function_from_json(const nlohmann::json& j) {
  try {
    const int dim = j.at("dim").get<int>();
    const int level = j.at("level").get<int>();
    const auto& box = j.at("box");
    const auto samples = j.at("samples").get<std::vector<double>>();
    const std::string tag = j.value("tag", std::string{});
    if (dim < 1) throw ValidationError("dim must be at least 1");
    if (level < 0 || level > 40) throw ValidationError("level must lie in [0, 40]");
    if (box.at("side").is_number()) {
      const auto side = box.at("side").get<std::int64_t>();
      std::vector<std::int64_t> corner;
      if (box.at("corner").is_array())
        corner = box.at("corner").get<std::vector<std::int64_t>>();
      else
        corner.assign(dim, box.at("corner").get<std::int64_t>());
      return GridFunction(Grid::cube(dim, level, corner, side), samples, tag);
    }
    const auto corner = box.at("corner").get<std::vector<double>>();
    const auto side = box.at("side").get<std::vector<double>>();
    if (static_cast<int>(corner.size()) != dim || static_cast<int>(side.size()) != dim)
      throw ValidationError("box corner and side need one entry per axis");
    std::vector<std::int64_t> origin(dim);
    std::vector<std::size_t> counts(dim);
    for (int l = 0; l < dim; ++l) {
      const double o = std::ldexp(corner[l], level);
      const double c = std::ldexp(side[l], level);
      if (o != std::floor(o) || c != std::floor(c) || c < 0)
        throw ValidationError("box is not aligned to the level-" + std::to_string(level) + " grid");
      origin[l] = static_cast<std::int64_t>(o);
      counts[l] = static_cast<std::size_t>(c) + 1;
    }
    return GridFunction(Grid(level, origin, counts), samples, tag);
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("malformed grid function JSON: ") + e.what());
  }
}

nlohmann::json to_json(const CorpusSpec& spec) {
  return nlohmann::json{{"seed", spec.seed},
                        {"count", spec.count},
                        {"kind", to_string(spec.kind)},
                        {"amplitude", {spec.amplitude_lo, spec.amplitude_hi}},
                        {"zero_mean", spec.zero_mean},
                        {"structure_level", spec.structure_level}};
}

CorpusSpec corpus_spec_from_json(const nlohmann::json& j) {
  try {
    CorpusSpec spec;
    spec.seed = j.at("seed").get<std::uint64_t>();
    spec.count = j.at("count").get<std::size_t>();
    spec.kind = parse_corpus_kind(j.at("kind").get<std::string>());
    if (j.contains("amplitude")) {
      const auto a = j.at("amplitude").get<std::vector<double>>();
      if (a.size() != 2) throw ValidationError("amplitude must be a [lo, hi] pair");
      spec.amplitude_lo = a[0];
      spec.amplitude_hi = a[1];
    }
    spec.zero_mean = j.value("zero_mean", false);
    spec.structure_level = j.value("structure_level", 3);
    if (spec.count < 1) throw ValidationError("corpus count must be at least 1");
    return spec;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("malformed corpus spec JSON: ") + e.what());
  }
}

void write_csv(std::ostream& out, const GridFunction& f) {
  const Grid& g = f.grid();
  const int n = g.dim();
  for (int l = 0; l < n; ++l) out << "x" << l << ",";
  out << "value\n";
  std::vector<std::size_t> idx(n);
  out.precision(17);
  for (std::size_t k = 0; k < f.size(); ++k) {
    g.unravel(k, idx);
    for (int l = 0; l < n; ++l) out << g.coordinate(l, idx[l]) << ",";
    out << f[k] << "\n";
  }
}

}  // namespace fspace

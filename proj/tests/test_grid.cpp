#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "fspace/error.hpp"
#include "fspace/grid.hpp"
#include "fspace/numeric.hpp"

using namespace fspace;

TEST(Grid, CubeGeometry) {
  const Grid g = Grid::cube(2, 3, -1, 2);
  EXPECT_EQ(g.dim(), 2);
  EXPECT_EQ(g.count(0), 17u);
  EXPECT_EQ(g.size(), 17u * 17u);
  EXPECT_DOUBLE_EQ(g.coordinate(0, 0), -1.0);
  EXPECT_DOUBLE_EQ(g.coordinate(1, 16), 1.0);
  EXPECT_TRUE(g.is_cube());
  EXPECT_EQ(g.side(), 2);
  EXPECT_EQ(g.corner()[1], -1);
  std::size_t idx[2];
  g.unravel(g.flat(std::vector<std::size_t>{3, 5}), idx);
  EXPECT_EQ(idx[0], 3u);
  EXPECT_EQ(idx[1], 5u);
}

TEST(Grid, NodeWeightsSumToVolume) {
  const Grid g = Grid::cube(2, 4, 0, 3);
  double total = 0.0;
  std::size_t idx[2];
  for (std::size_t k = 0; k < g.size(); ++k) {
    g.unravel(k, idx);
    total += g.node_weight(idx);
  }
  EXPECT_NEAR(total, 9.0, 1e-12);
}

TEST(Sample, ZeroIdentityAndHat) {
  auto zero = sample([](double) { return 0.0; }, 3, 0, 1);
  EXPECT_EQ(zero.size(), 9u);
  for (double v : zero.samples()) EXPECT_EQ(v, 0.0);

  auto id = sample([](double x) { return x; }, 2, 0, 1);
  const std::vector<double> expect{0, .25, .5, .75, 1};
  for (std::size_t i = 0; i < 5; ++i) EXPECT_EQ(id[i], expect[i]);

  auto hat = sample([](double x) { return std::max(1 - std::fabs(x), 0.0); }, 1, -1, 2);
  const std::vector<double> hat_expect{0, .5, 1, .5, 0};
  for (std::size_t i = 0; i < 5; ++i) EXPECT_EQ(hat[i], hat_expect[i]);
}

TEST(Sample, RejectsNonFiniteWithNodeIndex) {
  try {
    sample([](double x) { return x == 0.5 ? NAN : x; }, 2, 0, 1);
    FAIL() << "expected rejection";
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("node 2"), std::string::npos);
  }
}

TEST(LpNorm, ClosedForms) {
  for (int L : {1, 5, 9}) EXPECT_DOUBLE_EQ(lp_norm(sample([](double) { return 1.0; }, L, 0, 1), 2), 1.0);
  // Oracle: integral of x^2 over [0,1] is 1/3.
  EXPECT_NEAR(lp_norm(sample([](double x) { return x; }, 8, 0, 1), 2), 1.0 / std::sqrt(3.0), 1e-3);
  auto hat = sample([](double x) { return std::max(1 - std::fabs(x), 0.0); }, 8, -1, 2);
  EXPECT_EQ(lp_norm(hat, kInf), 1.0);
  EXPECT_THROW(lp_norm(hat, 0.0), ValidationError);
  EXPECT_THROW(lp_norm(hat, -1.0), ValidationError);
}

TEST(LpNorm, TwoDimensionalConstant) {
  auto one = sample([](std::span<const double>) { return 2.0; }, 3, 0, 2, 2);
  EXPECT_NEAR(lp_norm(one, 3), 2.0 * std::cbrt(4.0), 1e-12);
}

namespace {
std::vector<GridFunction> random_functions(std::uint64_t seed, int dim, std::size_t count) {
  CorpusSpec spec;
  spec.seed = seed;
  spec.count = count;
  spec.kind = CorpusKind::SmoothBumpSum;
  spec.amplitude_lo = -2;
  spec.amplitude_hi = 2;
  return generate_corpus(spec, 6, 0, 1, dim);
}
}  // namespace

TEST(LpNormProperty, HomogeneityTriangleAndAbs) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> coef(-5, 5);
  for (int dim : {1, 2}) {
    auto fs = random_functions(3 + dim, dim, 20);
    auto gs = random_functions(99 + dim, dim, 20);
    for (std::size_t i = 0; i < fs.size(); ++i) {
      for (double p : {0.5, 1.0, 2.0, 3.5, kInf}) {
        const double c = coef(rng);
        const double nf = lp_norm(fs[i], p);
        EXPECT_NEAR(lp_norm(fs[i] * c, p), std::fabs(c) * nf, 1e-12 * (1 + std::fabs(c) * nf));
        EXPECT_EQ(lp_norm(fs[i].map([](double v) { return std::fabs(v); }), p), nf);
        if (p >= 1) EXPECT_LE(lp_norm(fs[i] + gs[i], p), nf + lp_norm(gs[i], p) + 1e-12);
      }
    }
  }
}

TEST(Sample, RefinementKeepsCoarseNodes) {
  auto gen = [](double x) { return std::sin(3 * x) + x * x; };
  auto coarse = sample(gen, 4, -1, 2);
  auto fine = sample(gen, 5, -1, 2);
  for (std::size_t i = 0; i < coarse.size(); ++i) EXPECT_EQ(coarse[i], fine[2 * i]);
}

TEST(Corpus, DeterministicUnderSeed) {
  for (auto kind : {CorpusKind::PiecewiseLinearRandomKnots, CorpusKind::SmoothBumpSum, CorpusKind::HaarStep,
                    CorpusKind::SignOscillating}) {
    CorpusSpec spec{7, 3, kind};
    auto a = generate_corpus(spec, 6, 0, 1, 1);
    auto b = generate_corpus(spec, 6, 0, 1, 1);
    ASSERT_EQ(a.size(), 3u);
    for (std::size_t i = 0; i < a.size(); ++i) {
      EXPECT_TRUE(std::equal(a[i].samples().begin(), a[i].samples().end(), b[i].samples().begin()));
      EXPECT_EQ(a[i].tag(), b[i].tag());
    }
    spec.seed = 8;
    auto c = generate_corpus(spec, 6, 0, 1, 1);
    EXPECT_FALSE(std::equal(a[0].samples().begin(), a[0].samples().end(), c[0].samples().begin()));
  }
}

TEST(Corpus, HaarStepIsPiecewiseConstant) {
  CorpusSpec spec{5, 10, CorpusKind::HaarStep};
  spec.structure_level = 2;
  for (const auto& f : generate_corpus(spec, 6, 0, 1, 1)) {
    // 4 cells of 16 nodes each; right endpoint belongs to no cell.
    for (std::size_t cell = 0; cell < 4; ++cell)
      for (std::size_t i = 0; i < 16; ++i) EXPECT_EQ(f[cell * 16 + i], f[cell * 16]);
    EXPECT_EQ(f[64], 0.0);
  }
}

TEST(Corpus, ZeroMeanPiecewiseLinearChangesSign) {
  CorpusSpec spec{21, 50, CorpusKind::PiecewiseLinearRandomKnots};
  spec.zero_mean = true;
  for (int dim : {1, 2}) {
    for (const auto& f : generate_corpus(spec, 5, 0, 1, dim)) {
      bool pos = false, neg = false;
      for (double v : f.samples()) {
        pos |= v > 0;
        neg |= v < 0;
      }
      EXPECT_TRUE(pos && neg) << f.tag();
    }
  }
}

TEST(Corpus, VanishOnIntegerNodes) {
  for (auto kind : {CorpusKind::PiecewiseLinearRandomKnots, CorpusKind::SmoothBumpSum, CorpusKind::SignOscillating}) {
    CorpusSpec spec{3, 10, kind};
    for (const auto& f : generate_corpus(spec, 5, -1, 3, 1))
      for (std::size_t i = 0; i < f.size(); i += 32) EXPECT_NEAR(f[i], 0.0, 1e-12) << f.tag();
  }
}

TEST(Corpus, UnknownKindRejected) {
  EXPECT_THROW(parse_corpus_kind("wavelet-noise"), ValidationError);
  EXPECT_THROW(corpus_spec_from_json(nlohmann::json{{"seed", 1}, {"count", 1}, {"kind", "nope"}}), ValidationError);
  EXPECT_EQ(parse_corpus_kind("haar-step"), CorpusKind::HaarStep);
}

TEST(Serialization, GridFunctionRoundTrip) {
  auto f = sample([](std::span<const double> x) { return x[0] - 2 * x[1]; }, 2, -1, 2, 2, "plane");
  const auto back = grid_function_from_json(nlohmann::json::parse(to_json(f).dump()));
  EXPECT_TRUE(back.combinable(f));
  EXPECT_EQ(back.tag(), "plane");
  for (std::size_t i = 0; i < f.size(); ++i) EXPECT_EQ(back[i], f[i]);

  const Grid odd(3, {1}, {6});
  GridFunction h(odd, std::vector<double>(6, 1.5));
  const auto hb = grid_function_from_json(to_json(h));
  EXPECT_TRUE(hb.grid() == odd);
}

TEST(Serialization, RejectsMismatchedSamples) {
  nlohmann::json j{{"dim", 1}, {"level", 1}, {"box", {{"corner", {0}}, {"side", 1}}}, {"samples", {0, 1}}};
  EXPECT_THROW(grid_function_from_json(j), ValidationError);
  j["samples"] = {0, 1, 2};
  EXPECT_NO_THROW(grid_function_from_json(j));
  EXPECT_THROW(grid_function_from_json(nlohmann::json{{"dim", 1}}), ValidationError);
}

TEST(Serialization, CorpusSpecAndCsv) {
  CorpusSpec spec{42, 4, CorpusKind::SignOscillating, -0.5, 0.5, true, 2};
  const auto back = corpus_spec_from_json(to_json(spec));
  EXPECT_EQ(back.seed, 42u);
  EXPECT_EQ(back.count, 4u);
  EXPECT_EQ(back.kind, CorpusKind::SignOscillating);
  EXPECT_EQ(back.amplitude_lo, -0.5);
  EXPECT_TRUE(back.zero_mean);
  EXPECT_EQ(back.structure_level, 2);

  std::ostringstream out;
  write_csv(out, sample([](double x) { return 2 * x; }, 1, 0, 1));
  EXPECT_EQ(out.str(), "x0,value\n0,0\n0.5,1\n1,2\n");
}

TEST(GridFunction, CombinationRequiresEqualGrids) {
  auto a = sample([](double x) { return x; }, 3, 0, 1);
  auto b = sample([](double x) { return x; }, 4, 0, 1);
  EXPECT_THROW(a + b, ValidationError);
  EXPECT_EQ((a - a).max(), 0.0);
}

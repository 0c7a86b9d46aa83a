#include <gtest/gtest.h>

#include <cmath>

#include "fspace/error.hpp"
#include "fspace/fubini.hpp"
#include "fspace/numeric.hpp"
#include "fspace/oscillation.hpp"

using namespace fspace;
using namespace fspace::fubini;

namespace {

double hat(double x) { return std::max(0.0, 1 - std::fabs(2 * x - 1)); }

GridFunction hat2(int L) {
  return sample([](std::span<const double> x) { return hat(x[0]) * hat(x[1]); }, L, 0, 1, 2, "hat2");
}

const spaces::SpaceParams kSp = spaces::parse_space("B:0.75:2:2:2");

}  // namespace

TEST(Slices, CountAndTensorStructure) {
  const auto f = sample([](std::span<const double> x) { return std::sin(3 * x[0]) * (1 + x[1]); }, 4, -1, 2, 2);
  for (int axis : {0, 1}) {
    const auto sl = slices(f, axis);
    ASSERT_EQ(sl.size(), 2u * 16 + 1);
    EXPECT_EQ(sl.front().dim(), 1);
    EXPECT_EQ(sl.front().size(), 2u * 16 + 1);
  }
  // Along axis 0 every slice is u scaled by v at the fixed x1.
  const auto sl = slices(f, 0);
  for (std::size_t c = 0; c < sl.size(); ++c) {
    const double v = 1 + (-1 + c / 16.0);
    for (std::size_t i = 0; i < sl[c].size(); ++i)
      EXPECT_NEAR(sl[c][i], std::sin(3 * (-1 + i / 16.0)) * v, 1e-14);
  }
  const auto cube = sample([](std::span<const double>) { return 2.0; }, 2, 0, 1, 3);
  const auto cs = slices(cube, 1);
  EXPECT_EQ(cs.size(), 25u);
  for (const auto& s : cs)
    for (double v : s.samples()) EXPECT_EQ(v, 2.0);
  EXPECT_THROW(slices(sample([](double x) { return x; }, 3, 0, 1), 0), ValidationError);
  EXPECT_THROW(slices(f, 2), ValidationError);
}

TEST(FubiniNorm, ZeroHomogeneousAndSymmetric) {
  const auto zero = hat2(6).map([](double) { return 0.0; });
  EXPECT_EQ(fubini_norm(zero, kSp), 0.0);
  const auto f = tensor_corpus({5, 1, CorpusKind::PiecewiseLinearRandomKnots}, 3, 7, 0, 1);
  for (const auto& g : f) {
    const double a = fubini_norm(g, kSp);
    EXPECT_NEAR(fubini_norm(g * -2.5, kSp), 2.5 * a, 1e-13 * a);
    // Transpose: per-axis contributions swap, total unchanged.
    std::vector<double> t(g.size());
    const std::size_t n = g.grid().count(0);
    for (std::size_t k = 0; k < t.size(); ++k) t[(k % n) * n + k / n] = g[k];
    const GridFunction gt(g.grid(), std::move(t));
    const auto d = fubini_norm_detail(g, kSp), dt = fubini_norm_detail(gt, kSp);
    EXPECT_EQ(d.per_axis[0], dt.per_axis[1]);
    EXPECT_EQ(d.per_axis[1], dt.per_axis[0]);
    EXPECT_EQ(d.value, dt.value);
    const double r = fubini_compare(g, kSp);
    EXPECT_NEAR(fubini_compare(g * 3.0, kSp), r, 1e-13 * r);
  }
}

TEST(FubiniNorm, TensorFactorization) {
  const int L = 8;
  const auto u = sample([](double x) { return std::sin(2 * M_PI * x); }, L, 0, 1);
  const auto v = sample(hat, L, 0, 1);
  const auto f = sample([](std::span<const double> x) { return std::sin(2 * M_PI * x[0]) * hat(x[1]); }, L, 0, 1, 2);
  spaces::SpaceParams line = kSp;
  line.n = 1;
  const auto d = fubini_norm_detail(f, kSp);
  const double expected = osc::b_osc_norm(u, 0.75, 2, 2) * lp_norm(v, 2);
  EXPECT_NEAR(d.per_axis[0], expected, 1e-12 * expected);
}

TEST(FubiniNorm, HatResolutionStable) {
  const double a = fubini_norm(hat2(8), kSp), b = fubini_norm(hat2(9), kSp);
  EXPECT_GT(a, 0.0);
  EXPECT_NEAR(b / a, 1.0, 0.05);
  EXPECT_GT(fubini_norm(hat2(7), kSp, lab::NormKind::FaberB), 0.0);
}

TEST(FubiniNorm, GateOnPEqualsQ) {
  try {
    fubini_norm(hat2(5), spaces::parse_space("B:0.75:2:3:2"));
    FAIL() << "expected a precondition error";
  } catch (const PreconditionError& e) {
    EXPECT_EQ(e.citation(), "Prop2.5(ii)");
  }
  EXPECT_THROW(fubini_norm(hat2(5), spaces::parse_space("F:0.75:2:3:2")), ValidationError);
  EXPECT_THROW(fubini_norm(hat2(5), kSp, lab::NormKind::HaarSeq), ValidationError);
}

TEST(FubiniExperiment, BandReported) {
  CorpusSpec spec{21, 1, CorpusKind::PiecewiseLinearRandomKnots};
  spec.zero_mean = true;
  const auto rep = fubini_experiment(tensor_corpus(spec, 8, 7, 0, 1), kSp);
  EXPECT_EQ(rep.rows.size() + rep.skipped, 8u);
  EXPECT_GE(rep.stats.spread, 1.0);
  const auto j = to_json(rep);
  EXPECT_EQ(j.at("experiment"), "fubini");
  EXPECT_EQ(j.at("band"), rep.stats.spread);
}

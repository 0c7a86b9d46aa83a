#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "fspace/differences.hpp"
#include "fspace/error.hpp"
#include "fspace/numeric.hpp"

using namespace fspace;
using namespace fspace::diff;

namespace {

// Half-open indicator with room for steps up to 1 on both sides.
GridFunction chi(int L) {
  return sample([](double x) { return (x >= 0 && x < 1) ? 1.0 : 0.0; }, L, -2, 5);
}

GridFunction hat(int L) {
  return sample([](double x) { return std::max(0.0, 1.0 - std::fabs(x)); }, L, -3, 6);
}

std::vector<GridFunction> corpus(std::uint64_t seed, std::size_t count, int L, int dim = 1) {
  CorpusSpec spec{seed, count, CorpusKind::PiecewiseLinearRandomKnots};
  spec.zero_mean = true;
  return generate_corpus(spec, L, 0, 1, dim);
}

}  // namespace

TEST(Difference, AlgebraicIdentities) {
  const auto lin = sample([](double x) { return 3 * x - 1; }, 6, 0, 1);
  const auto sq = sample([](double x) { return x * x; }, 6, 0, 1);
  const auto id = sample([](double x) { return x; }, 6, 0, 1);
  for (std::size_t k : {1u, 5u, 20u}) {
    const double h = std::ldexp(static_cast<double>(k), -6);
    const auto d2 = difference(lin, 2, k);
    EXPECT_EQ(d2.size(), 65 - 2 * k);
    for (double v : d2.samples()) EXPECT_NEAR(v, 0.0, 1e-14);
    const auto dsq = difference(sq, 2, k);
    for (double v : dsq.samples()) EXPECT_NEAR(v, 2 * h * h, 1e-14);
    const auto did = difference_h(id, 1, h);
    for (double v : did.samples()) EXPECT_NEAR(v, h, 1e-15);
  }
  EXPECT_THROW(difference_h(id, 1, 0.01), ValidationError);
  EXPECT_THROW(difference(id, 3, 1), ValidationError);
  EXPECT_THROW(difference(id, 2, 40), ValidationError);
}

TEST(Difference, ShrinksBoxAlongAxis) {
  const auto f = sample([](std::span<const double> x) { return x[0] * x[1]; }, 3, 0, 1, 2);
  const auto d = difference(f, 1, 2, 1);
  EXPECT_EQ(d.grid().count(0), 9u);
  EXPECT_EQ(d.grid().count(1), 7u);
  // d/dx1 of x0 x1 with step h: x0 h.
  EXPECT_NEAR(d[d.grid().flat(std::vector<std::size_t>{4, 3})], 0.5 * 0.25, 1e-15);
}

TEST(Difference, Linearity) {
  const auto fs = corpus(1, 10, 7);
  for (std::size_t i = 0; i + 1 < fs.size(); ++i) {
    const auto lhs = difference(fs[i] * 2.0 + fs[i + 1], 2, 3);
    const auto rhs = difference(fs[i], 2, 3) * 2.0 + difference(fs[i + 1], 2, 3);
    for (std::size_t k = 0; k < lhs.size(); ++k) EXPECT_NEAR(lhs[k], rhs[k], 1e-14);
  }
}

TEST(Modulus, IndicatorExactLaw) {
  const int L = 9;
  const auto f = chi(L);
  for (double p : {1.0, 2.0, 3.0})
    for (int j = 0; j <= L; ++j) {
      const double t = std::ldexp(1.0, -j);
      EXPECT_NEAR(modulus(f, 1, p, t), std::pow(2 * t, 1 / p), 1e-12);
    }
}

TEST(Modulus, LinearAndMonotone) {
  const auto lin = sample([](double x) { return 2 * x; }, 7, 0, 1);
  EXPECT_NEAR(modulus(lin, 2, 2, 0.25), 0.0, 1e-14);
  for (const auto& f : corpus(4, 5, 7)) {
    const auto profile = difference_profile(f, 2, 1.5, 64);
    double prev = 0.0;
    for (int j = 6; j >= 0; --j) {
      const double w = modulus(f, 2, 1.5, std::ldexp(1.0, -j));
      EXPECT_GE(w, prev);
      prev = w;
    }
    EXPECT_EQ(prev, *std::max_element(profile.begin(), profile.end()));
  }
}

TEST(Modulus, HomogeneousAndSubadditive) {
  const auto fs = corpus(9, 12, 7);
  for (std::size_t i = 0; i + 1 < fs.size(); ++i)
    for (double p : {1.0, 2.0, kInf}) {
      const double a = modulus(fs[i], 1, p, 0.125), b = modulus(fs[i + 1], 1, p, 0.125);
      EXPECT_NEAR(modulus(fs[i] * -4.0, 1, p, 0.125), 4 * a, 1e-12);
      EXPECT_LE(modulus(fs[i] + fs[i + 1], 1, p, 0.125), a + b + 1e-12);
    }
}

TEST(Modulus, TwoDimensionalTakesWorstAxis) {
  const auto f = sample([](std::span<const double> x) { return 3 * x[1]; }, 4, 0, 1, 2);
  // Only axis 1 varies: Delta = 3h everywhere on a shrunk box of area 1 - h.
  const double h = 0.25;
  EXPECT_NEAR(modulus(f, 1, kInf, h), 3 * h, 1e-14);
}

TEST(Seminorm, IndicatorConstantTerms) {
  const int L = 10;
  const auto f = chi(L);
  for (double p : {2.0, 3.0}) {
    const auto inf = besov_diff_seminorm(f, 1 / p, 1, p, kInf, 0, L);
    for (double a : inf.report.a) EXPECT_NEAR(a, std::pow(2.0, 1 / p), 1e-9);
    EXPECT_NEAR(inf.value, std::pow(2.0, 1 / p), 1e-9);
    EXPECT_EQ(inf.report.verdict, Verdict::Bounded);

    const auto two = besov_diff_seminorm(f, 1 / p, 1, p, 2, 0, L);
    for (std::size_t i = 0; i < two.report.S.size(); ++i)
      EXPECT_NEAR(two.report.S[i], std::pow(2.0, 1 / p) * std::sqrt(i + 1.0), 1e-9);
    EXPECT_EQ(two.report.verdict, Verdict::PowerGrowth);
    EXPECT_NEAR(two.report.alpha, 0.5, 1e-9);
  }
}

TEST(Seminorm, IndicatorBelowCriticalIsBounded) {
  const int L = 12;
  const auto f = chi(L);
  const auto r = membership_diagnostic(f, 0.5 - 0.4, 2, 1, 1, 0, L);
  EXPECT_EQ(r.verdict, Verdict::Bounded);
}

TEST(Seminorm, HatDichotomy) {
  const int L = 11;
  const auto v = hat(L);
  const double p = 2, s = 1 + 1 / p;
  const auto inf = membership_diagnostic(v, s, p, kInf, 2, 1, 8);
  EXPECT_EQ(inf.verdict, Verdict::Bounded);
  for (double q : {1.0, 2.0}) {
    const auto r = membership_diagnostic(v, s, p, q, 2, 1, 8);
    EXPECT_EQ(r.verdict, Verdict::PowerGrowth);
    EXPECT_NEAR(r.alpha, 1 / q, 0.15);
  }
}

TEST(Seminorm, ZeroAndPreconditions) {
  const auto z = sample([](double) { return 0.0; }, 6, 0, 1);
  const auto r = besov_diff_seminorm(z, 0.5, 1, 2, 2, 0, 6);
  EXPECT_EQ(r.value, 0.0);
  EXPECT_EQ(r.report.verdict, Verdict::Bounded);
  EXPECT_THROW(besov_diff_seminorm(z, 1.0, 1, 2, 2, 0, 6), ValidationError);
  EXPECT_THROW(besov_diff_seminorm(z, 0.5, 1, 2, 2, 0, 7), ValidationError);
}

TEST(SeminormProperty, AbsoluteValueAndMonotonePartialSums) {
  for (const auto& f : corpus(17, 25, 8)) {
    const auto abs_f = f.map([](double v) { return std::fabs(v); });
    for (double p : {1.0, 2.0})
      for (double q : {1.0, 2.0, kInf}) {
        const auto rf = besov_diff_seminorm(f, 0.4, 1, p, q, 0, 8);
        const auto ra = besov_diff_seminorm(abs_f, 0.4, 1, p, q, 0, 8);
        EXPECT_LE(ra.value, rf.value * (1 + 1e-12));
        for (std::size_t i = 1; i < rf.report.S.size(); ++i) EXPECT_GE(rf.report.S[i], rf.report.S[i - 1]);
      }
  }
}

TEST(GrowthReport, VerdictRule) {
  EXPECT_EQ(growth_report({1, 1, 1, 1, 1}, kInf, 0).verdict, Verdict::Bounded);
  const auto g = growth_report(std::vector<double>(12, 1.0), 1, 0);
  EXPECT_EQ(g.verdict, Verdict::PowerGrowth);
  EXPECT_NEAR(g.alpha, 1.0, 1e-12);
  EXPECT_NEAR(g.r2, 1.0, 1e-12);
  // Noisy, non-monotone growth with a poor fit is inconclusive.
  const auto noisy = growth_report({1, 0, 0, 0, 0, 0, 0, 0, 2, 0, 0, 3}, kInf, 0);
  EXPECT_EQ(noisy.verdict, Verdict::Inconclusive);
  const auto j = to_json(g);
  EXPECT_EQ(j.at("verdict"), "power-growth");
  EXPECT_EQ(j.at("S").size(), 12u);
}

TEST(Holder, ClosedForms) {
  const auto c = sample([](double) { return -1.5; }, 5, 0, 2);
  EXPECT_EQ(holder_norm(c, 0.3), 1.5);
  for (int L : {3, 6}) {
    const auto id = sample([](double x) { return x; }, L, 0, 1);
    EXPECT_NEAR(holder_norm(id, 0.5), 2.0, 1e-14);
  }
  const auto plane = sample([](std::span<const double> x) { return x[0]; }, 3, 0, 1, 2);
  EXPECT_NEAR(holder_norm(plane, 0.5), 2.0, 1e-14);
  EXPECT_THROW(holder_norm(c, 1.0), ValidationError);
}

TEST(Holder, AbsoluteValueNeverLarger) {
  for (int dim : {1, 2})
    for (const auto& f : corpus(23, 15, dim == 1 ? 7 : 4, dim)) {
      const auto abs_f = f.map([](double v) { return std::fabs(v); });
      EXPECT_LE(holder_norm(abs_f, 0.5), holder_norm(f, 0.5));
    }
}

TEST(W1p, ClosedForms) {
  const auto c = sample([](double) { return -2.0; }, 6, 0, 3);
  EXPECT_NEAR(w1p_norm(c, 2), 2 * std::sqrt(3.0), 1e-12);
  const auto id = sample([](double x) { return x; }, 10, 0, 1);
  EXPECT_NEAR(w1p_norm(id, 2), 1 / std::sqrt(3.0) + 1, 1e-3);
  const auto plane = sample([](std::span<const double> x) { return x[0] + 2 * x[1]; }, 5, 0, 1, 2);
  // Gradient (1, 2): axis contributions 1 and 2 exactly.
  EXPECT_NEAR(w1p_norm(plane, 3) - lp_norm(plane, 3), 3.0, 1e-12);
}

TEST(W1p, AbsoluteValueExactWithoutStraddlingCells) {
  // Sign changes only at dyadic knots: every cell has a constant sign.
  const auto f = sample([](double x) { return std::sin(4 * M_PI * x) > 0 ? x * (0.5 - x) : 0.0; }, 8, 0, 1);
  const auto g = sample([](double x) { return (x - 0.25) * (x < 0.5 ? 1.0 : 0.0) + (x >= 0.5 ? 0.75 - x : 0.0); },
                        8, 0, 1);
  for (const auto& h : {f, g}) {
    const auto abs_h = h.map([](double v) { return std::fabs(v); });
    EXPECT_NEAR(w1p_norm(abs_h, 2), w1p_norm(h, 2), 1e-14);
  }
}

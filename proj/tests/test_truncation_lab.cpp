#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "fspace/differences.hpp"
#include "fspace/error.hpp"
#include "fspace/numeric.hpp"
#include "fspace/truncation_lab.hpp"

using namespace fspace;
using namespace fspace::lab;

namespace {

std::vector<GridFunction> pl_corpus(std::uint64_t seed, std::size_t count, int L, bool zero_mean = true) {
  CorpusSpec spec{seed, count, CorpusKind::PiecewiseLinearRandomKnots};
  spec.zero_mean = zero_mean;
  return generate_corpus(spec, L, 0, 1, 1);
}

spaces::SpaceParams space(const std::string& text) { return spaces::parse_space(text); }
spaces::SpaceParams space_of(const char* text) { return spaces::parse_space(text); }

}  // namespace

TEST(Truncate, PartsRecombine) {
  for (const auto& f : pl_corpus(3, 10, 8)) {
    const auto t = truncate(f);
    for (std::size_t k = 0; k < f.size(); ++k) {
      EXPECT_EQ(t.pos[k] + t.neg[k], f[k]);
      EXPECT_EQ(t.pos[k] - t.neg[k], t.abs[k]);
      EXPECT_GE(t.pos[k], 0.0);
      EXPECT_LE(t.neg[k], 0.0);
    }
    EXPECT_EQ(apply(Operator::Abs, f).samples()[3], t.abs[3]);
  }
}

TEST(Truncate, OperatorNames) {
  for (auto op : {Operator::Abs, Operator::Pos, Operator::Neg}) EXPECT_EQ(parse_operator(to_string(op)), op);
  EXPECT_THROW(parse_operator("sqrt"), ValidationError);
  for (auto k : {NormKind::HaarSeq, NormKind::FaberB, NormKind::FaberF, NormKind::OscB, NormKind::OscF,
                 NormKind::DiffSeminorm, NormKind::Holder, NormKind::W1p})
    EXPECT_EQ(parse_norm_kind(to_string(k)), k);
  EXPECT_EQ(parse_norm_kind("osc-b"), NormKind::OscB);
  EXPECT_THROW(parse_norm_kind("sobolev"), ValidationError);
}

TEST(RatioExperiment, NonnegativeCorpusGivesOne) {
  auto corpus = pl_corpus(5, 12, 8, false);
  for (auto& f : corpus) f = f.map([](double v) { return std::fabs(v); }, f.tag());
  for (auto kind : {NormKind::FaberB, NormKind::OscB, NormKind::HaarSeq}) {
    const auto rep = ratio_experiment(corpus, kind, space("B:0.7:2:2:1"), Operator::Abs);
    EXPECT_EQ(rep.rows.size(), corpus.size());
    EXPECT_EQ(rep.stats.min, 1.0);
    EXPECT_EQ(rep.stats.max, 1.0);
    EXPECT_EQ(rep.stats.spread, 1.0);
  }
}

TEST(RatioExperiment, SkipsNegligibleAndRejectsEmpty) {
  auto corpus = pl_corpus(7, 4, 7, false);
  corpus.push_back(corpus.front().map([](double) { return 0.0; }, "zero"));
  const auto rep = ratio_experiment(corpus, NormKind::OscB, space("B:0.6:2:2:1"), Operator::Abs);
  EXPECT_EQ(rep.skipped, 1u);
  EXPECT_EQ(rep.rows.size(), 4u);
  const std::vector<GridFunction> zeros{corpus.back()};
  EXPECT_THROW(ratio_experiment(zeros, NormKind::OscB, space("B:0.6:2:2:1"), Operator::Abs), ValidationError);
  auto mixed = pl_corpus(7, 2, 7);
  mixed.push_back(pl_corpus(7, 1, 8).front());
  EXPECT_THROW(ratio_experiment(mixed, NormKind::OscB, space("B:0.6:2:2:1"), Operator::Abs), ValidationError);
}

TEST(RatioExperiment, FaberNormsAreOneDimensional) {
  const auto f = sample([](std::span<const double> x) { return x[0] - x[1]; }, 4, 0, 1, 2);
  EXPECT_THROW(evaluate_norm(f, NormKind::FaberB, space("B:0.6:2:2:2")), ValidationError);
  EXPECT_GT(evaluate_norm(f, NormKind::OscB, space("B:0.6:4:4:2")), 0.0);
}

TEST(RatioExperiment, ReportShapeAndCsv) {
  const auto rep = ratio_experiment(pl_corpus(9, 6, 8), NormKind::OscB, space("B:0.75:2:2:1"), Operator::Pos);
  const auto j = to_json(rep);
  EXPECT_EQ(j.at("norm_kind"), "osc-B");
  EXPECT_EQ(j.at("operator"), "pos");
  EXPECT_EQ(j.at("rows").size(), rep.rows.size());
  EXPECT_EQ(j.at("verdict").at("perfect"), "yes");
  std::ostringstream out;
  write_csv(out, rep);
  EXPECT_EQ(out.str().rfind("tag,norm_f,norm_T,ratio\n", 0), 0u);
  const auto st = rep.stats;
  EXPECT_LE(st.min, st.geo_mean);
  EXPECT_LE(st.geo_mean, st.max);
  EXPECT_DOUBLE_EQ(st.spread, st.max / st.min);
}

TEST(Counterexample, RatioIsTwoToTheJs) {
  const auto rows = counterexample_scaling(0.5, 2, 2, 1, 6);
  ASSERT_EQ(rows.size(), 7u);
  for (const auto& r : rows) EXPECT_NEAR(r.ratio, std::exp2(0.5 * r.j), 1e-12 * std::exp2(0.5 * r.j)) << r.j;
  EXPECT_NEAR(rows[0].ratio, 1.0, 1e-12);
  EXPECT_NEAR(rows[4].ratio, 4.0, 4e-12);
  EXPECT_NEAR(rows[5].ratio, std::exp2(2.5), 1e-11);
  const auto two = counterexample_scaling(0.4, 3, kInf, 2, 4);
  for (const auto& r : two) EXPECT_NEAR(r.ratio, std::exp2(0.4 * r.j), 1e-11) << r.j;
  std::ostringstream out;
  write_csv(out, rows);
  EXPECT_EQ(out.str().rfind("j,norm_f,norm_abs,ratio\n", 0), 0u);
  EXPECT_THROW(counterexample_scaling(0.5, 2, 2, 1, -1), ValidationError);
}

TEST(BracketCheck, NoViolations) {
  std::vector<GridFunction> corpus = pl_corpus(11, 8, 8);
  CorpusSpec spec{11, 8, CorpusKind::SignOscillating};
  for (auto& f : generate_corpus(spec, 8, 0, 1, 1)) corpus.push_back(std::move(f));
  CorpusSpec bumps{12, 3, CorpusKind::SmoothBumpSum};
  for (auto& f : generate_corpus(bumps, 5, 0, 1, 2)) corpus.push_back(std::move(f));
  for (const auto& f : corpus) {
    const auto c = bracket_truncation_check(f);
    EXPECT_GT(c.cubes, 0u);
    EXPECT_EQ(c.lower_violations, 0u) << f.tag();
    EXPECT_EQ(c.upper_violations, 0u) << f.tag();
  }
}

TEST(HolderCheck, LineAndCorpus) {
  const auto id = sample([](double x) { return x; }, 8, -1, 2, "x");
  auto rep = holder_perfect_check({id}, 0.5);
  EXPECT_EQ(rep.one_sided_violations, 0u);
  EXPECT_EQ(rep.triple_violations, 0u);
  EXPECT_GT(rep.triples, 0u);
  EXPECT_LE(rep.ratios.stats.spread, 2.0);

  rep = holder_perfect_check(pl_corpus(13, 10, 7), 0.6, 64);
  EXPECT_EQ(rep.one_sided_violations, 0u);
  EXPECT_EQ(rep.triple_violations, 0u);
  EXPECT_GE(rep.max_reverse, 1.0);
  EXPECT_EQ(to_json(rep).at("triple_violations"), 0);
  EXPECT_THROW(holder_perfect_check({id}, 1.0), ValidationError);
}

TEST(SobolevCheck, SignChangeCells) {
  EXPECT_EQ(sign_change_cells(sample([](double x) { return x; }, 4, -1, 2)), 0u);
  EXPECT_EQ(sign_change_cells(sample([](double x) { return x - 1.0 / 3; }, 4, -1, 2)), 1u);
  const auto plane = sample([](std::span<const double> x) { return x[0] - 1.0 / 3; }, 3, 0, 1, 2);
  EXPECT_EQ(sign_change_cells(plane), 8u);
}

TEST(SobolevCheck, GapControlledBySignChanges) {
  const auto pos = sample([](double x) { return x * x + 0.5; }, 8, -1, 2);
  auto rep = sobolev_identity_check({pos}, 2);
  EXPECT_EQ(rep.rows[0].gap, 0.0);
  EXPECT_EQ(rep.max_gap_no_change, 0.0);

  std::vector<double> gaps;
  for (int L : {8, 10, 12}) {
    const auto f = sample([](double x) { return x - 1.0 / 3; }, L, -1, 2);
    rep = sobolev_identity_check({f}, 2);
    EXPECT_EQ(rep.rows[0].sign_change_cells, 1u);
    EXPECT_LE(rep.rows[0].gap, 2 * std::exp2(-L / 2.0));
    gaps.push_back(rep.rows[0].gap);
  }
  EXPECT_LT(gaps[1], gaps[0]);
  EXPECT_LT(gaps[2], gaps[1]);
  EXPECT_EQ(to_json(rep).at("experiment"), "sobolev-identity");
  EXPECT_THROW(sobolev_identity_check({pos}, 1.0), ValidationError);
  EXPECT_THROW(sobolev_identity_check({pos}, kInf), ValidationError);
}

TEST(HolderCheck, SawtoothAndNonnegative) {
  CorpusSpec spec{17, 6, CorpusKind::SignOscillating};
  const auto saw = generate_corpus(spec, 8, 0, 1, 1);
  const auto rep = holder_perfect_check(saw, 0.5, 512);
  EXPECT_EQ(rep.one_sided_violations, 0u);
  EXPECT_EQ(rep.triple_violations, 0u);
  EXPECT_GT(rep.triples, 1000u);
  auto pos = pl_corpus(19, 5, 7, false);
  for (auto& f : pos) f = apply(Operator::Abs, f);
  EXPECT_EQ(holder_perfect_check(pos, 0.5).ratios.stats.spread, 1.0);
}

TEST(RatioProperty, OscillationNormsNeverGrowUnderAbs) {
  CorpusSpec spec{23, 10, CorpusKind::SignOscillating};
  auto corpus = generate_corpus(spec, 8, 0, 1, 1);
  for (auto& f : pl_corpus(24, 10, 8)) corpus.push_back(std::move(f));
  for (const char* space : {"B:0.75:2:2:1", "B:0.3:1:inf:1", "F:0.8:3:1.5:1"}) {
    const auto sp = space_of(space);
    const auto kind = sp.family == spaces::Family::B ? NormKind::OscB : NormKind::OscF;
    EXPECT_LE(ratio_experiment(corpus, kind, sp, Operator::Abs).stats.max, 1.0) << space;
  }
}

TEST(SobolevCheck, ShrinkRateOnPiecewiseLinear) {
  CorpusSpec spec{29, 20, CorpusKind::PiecewiseLinearRandomKnots};
  spec.structure_level = 2;
  for (double p : {2.0, 3.0}) {
    const auto a = sobolev_identity_check(generate_corpus(spec, 8, 0, 1, 1), p);
    const auto b = sobolev_identity_check(generate_corpus(spec, 10, 0, 1, 1), p);
    for (std::size_t i = 0; i < a.rows.size(); ++i) {
      if (a.rows[i].gap == 0) continue;
      EXPECT_GE(a.rows[i].gap / b.rows[i].gap, std::exp2(2 / p) / 2 * (1 - 1e-9)) << a.rows[i].tag << " p=" << p;
    }
  }
}

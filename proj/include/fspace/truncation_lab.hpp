#pragma once

// Truncation operators, the discrete norms they are measured with, and the
// experiments comparing |f|, f+ and f- against f.

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "fspace/grid.hpp"
#include "fspace/spaces.hpp"

namespace fspace::lab {

enum class NormKind { HaarSeq, FaberB, FaberF, OscB, OscF, DiffSeminorm, Holder, W1p };
std::string to_string(NormKind k);
// Accepts the report names (haar-seq, faber-B, ...) and the short CLI names
// (haar, faber-b, faber-f, osc-b, osc-f, diff).
NormKind parse_norm_kind(const std::string& name);

// The discrete norm of f selected by kind, with s, p, q taken from sp.
//   haar-seq      Haar sequence norm of the coefficients up to level L.
//   faber-B/F     Faber norms of the real-line analysis up to level L-1; 1-d only.
//   osc-B/F       oscillation norms.
//   diff-seminorm dyadic difference seminorm over j = 0..L, M = 1 if s < 1 else 2.
//   holder        Hoelder norm with exponent s.
//   w1p           discrete W^1_p norm with exponent p.
double evaluate_norm(const GridFunction& f, NormKind kind, const spaces::SpaceParams& sp);

// Functions whose norm is below this are left out of ratio statistics.
inline constexpr double kNegligibleNorm = 1e-13;

struct Truncation {
  GridFunction abs, pos, neg;
};
// |f|, f+ = max(f, 0), f- = min(f, 0), sample-wise.
Truncation truncate(const GridFunction& f);

enum class Operator { Abs, Pos, Neg };
std::string to_string(Operator op);
Operator parse_operator(const std::string& name);
GridFunction apply(Operator op, const GridFunction& f);

struct RatioRow {
  std::string tag;
  double norm_f = 0.0;
  double norm_t = 0.0;
  double ratio = 0.0;  // norm_t / norm_f
};

struct RatioStats {
  double min = 0.0, max = 0.0, geo_mean = 0.0, spread = 0.0;  // spread = max / min
};
// Throws ValidationError on an empty row set.
RatioStats ratio_stats(const std::vector<RatioRow>& rows);

struct EquivalenceReport {
  std::string experiment;  // "truncation", "composition", ...
  NormKind kind = NormKind::OscB;
  spaces::SpaceParams space;
  std::string op;
  int level = 0;
  std::vector<RatioRow> rows;
  std::size_t skipped = 0;
  RatioStats stats;
  nlohmann::json verdict;        // classifier output for the space
  nlohmann::json extra = nlohmann::json::object();
};

// Ratios norm(T f) / norm(f) over the corpus. Functions with either norm
// below kNegligibleNorm are skipped and counted. Throws ValidationError when
// nothing is left, or when the corpus mixes grids.
EquivalenceReport ratio_experiment(const std::vector<GridFunction>& corpus, NormKind kind,
                                   const spaces::SpaceParams& sp, Operator op);

nlohmann::json to_json(const EquivalenceReport& r);
// tag,norm_f,norm_T,ratio
void write_csv(std::ostream& out, const EquivalenceReport& r);

struct ScalingRow {
  int j = 0;
  double norm_f = 0.0;    // Haar sequence norm of f_j
  double norm_abs = 0.0;  // Haar sequence norm of |f_j|
  double ratio = 0.0;
};
// The alternating Haar sums f_j for j = 0..j_max on the unit cube, analysed at
// level j_max + 1. |f_j| is the indicator of the cube, so ratio = 2^{js}.
std::vector<ScalingRow> counterexample_scaling(double s, double p, double q, int n, int j_max);
// j,norm_f,norm_abs,ratio
void write_csv(std::ostream& out, const std::vector<ScalingRow>& rows);

// Oscillation brackets of f against those of |f| at every cube:
// [|f|] <= [f] and [f] <= 2 [|f|] + 2 min|f|.
struct BracketCheck {
  std::size_t cubes = 0;
  std::size_t lower_violations = 0;
  std::size_t upper_violations = 0;
};
BracketCheck bracket_truncation_check(const GridFunction& f);

struct HolderReport {
  EquivalenceReport ratios;        // holder norm, operator abs
  std::size_t one_sided_violations = 0;  // functions with ||f|| < |||f|||
  double max_reverse = 0.0;        // max ||f|| / |||f|||
  std::size_t triples = 0;         // witness triples tested
  std::size_t triple_violations = 0;
};
// Checks |||f||| <= ||f|| exactly and, for each sign-changing f, the
// three-point bound on up to max_pairs pairs (x, y) with f(x) > 0 > f(y); z is
// the first zero of the multilinear interpolant on the segment from x to y.
HolderReport holder_perfect_check(const std::vector<GridFunction>& corpus, double s, std::size_t max_pairs = 256);

struct SobolevRow {
  std::string tag;
  int level = 0;
  double gap = 0.0;                    // |w1p(|f|) - w1p(f)|
  std::size_t sign_change_cells = 0;  // level-L cells with corner values of both strict signs
  double unit = 0.0;                   // 2^{-L/p} cells^{1/p}
};
struct SobolevReport {
  double p = 2.0;
  std::vector<SobolevRow> rows;
  double c_emp = 0.0;            // max gap / unit over rows with sign changes
  double max_gap_no_change = 0.0;  // max gap over rows without sign changes
};
// 1 < p < inf.
SobolevReport sobolev_identity_check(const std::vector<GridFunction>& corpus, double p);
std::size_t sign_change_cells(const GridFunction& f);

nlohmann::json to_json(const HolderReport& r);
nlohmann::json to_json(const SobolevReport& r);

}  // namespace fspace::lab

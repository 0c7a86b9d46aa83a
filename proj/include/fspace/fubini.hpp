#pragma once

// Slices along coordinate axes and the sliced ("Fubini") norm for n >= 2.

#include <vector>

#include <json.hpp>

#include "fspace/grid.hpp"
#include "fspace/spaces.hpp"
#include "fspace/truncation_lab.hpp"

namespace fspace::fubini {

// One 1-d function x_axis -> f(x) per node of the remaining axes, in flat
// order of that lattice. Throws ValidationError when dim < 2.
std::vector<GridFunction> slices(const GridFunction& f, int axis);

// The lattice of the remaining axes; its node weights are the outer quadrature weights.
Grid slice_lattice(const GridFunction& f, int axis);

// The parameter gate of the sliced norm, as described below.
void check_params(const spaces::SpaceParams& sp, lab::NormKind norm1d);

struct FubiniNorm {
  double value = 0.0;
  std::vector<double> per_axis;  // outer L_p norm of the slice norms, per axis
};

// Sum over axes of the L_p norm over the slice lattice of the 1-d norm of each
// slice. norm1d is FaberB or OscB. B spaces need p = q (PreconditionError with
// citation Prop2.5(ii) otherwise); F spaces are accepted only with p = q.
FubiniNorm fubini_norm_detail(const GridFunction& f, const spaces::SpaceParams& sp,
                              lab::NormKind norm1d = lab::NormKind::OscB);
double fubini_norm(const GridFunction& f, const spaces::SpaceParams& sp, lab::NormKind norm1d = lab::NormKind::OscB);

// fubini_norm / b_osc_norm.
double fubini_compare(const GridFunction& f, const spaces::SpaceParams& sp, lab::NormKind norm1d = lab::NormKind::OscB);

// count products u(x1) v(x2) on [corner, corner + side]^2 of independent 1-d
// corpus functions drawn from spec (spec.count is ignored).
std::vector<GridFunction> tensor_corpus(const CorpusSpec& spec, std::size_t count, int level, std::int64_t corner,
                                        std::int64_t side);

struct FubiniReport {
  spaces::SpaceParams space;
  lab::NormKind norm1d = lab::NormKind::OscB;
  int level = 0;
  std::vector<lab::RatioRow> rows;  // norm_f = direct norm, norm_t = sliced norm
  std::size_t skipped = 0;
  lab::RatioStats stats;
};
FubiniReport fubini_experiment(const std::vector<GridFunction>& corpus, const spaces::SpaceParams& sp,
                               lab::NormKind norm1d = lab::NormKind::OscB);
nlohmann::json to_json(const FubiniReport& r);

}  // namespace fspace::fubini

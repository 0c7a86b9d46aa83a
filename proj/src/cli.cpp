#include "fspace/cli.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "fspace/composition_lab.hpp"
#include "fspace/differences.hpp"
#include "fspace/error.hpp"
#include "fspace/faber.hpp"
#include "fspace/fubini.hpp"
#include "fspace/haar.hpp"
#include "fspace/numeric.hpp"
#include "fspace/oscillation.hpp"
#include "fspace/parallel.hpp"
#include "fspace/spaces.hpp"
#include "fspace/truncation_lab.hpp"

#ifndef FSPACE_VERSION
#define FSPACE_VERSION "0.0.0"
#endif
#ifndef FSPACE_GIT_REV
#define FSPACE_GIT_REV "nogit"
#endif

namespace fs = std::filesystem;
using nlohmann::json;

namespace fspace::cli {
namespace {

json read_json(const std::string& source) {
  // Inline JSON is accepted wherever a file is expected.
  if (!source.empty() && source.front() == '{') {
    try {
      return json::parse(source);
    } catch (const json::exception& e) {
      throw ValidationError(std::string("malformed JSON argument: ") + e.what());
    }
  }
  std::ifstream in(source);
  if (!in) throw ValidationError("cannot read '" + source + "'");
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw ValidationError("malformed JSON in '" + source + "': " + e.what());
  }
}

void emit(const std::string& text, const std::string& path, std::ostream& out) {
  if (path.empty()) {
    out << text;
    return;
  }
  std::ofstream f(path);
  if (!f) throw ValidationError("cannot write '" + path + "'");
  f << text;
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

json config(const std::string& command, const spaces::SpaceParams& sp) {
  return {{"command", command}, {"space", spaces::to_json(sp)}, {"version", version_string()}};
}

// Corpus from a spec file, or every function file of a generated corpus directory.
std::vector<GridFunction> load_corpus(const std::string& source, int dim, json& meta, bool allow_tensor) {
  if (fs::is_directory(source)) {
    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(source))
      if (e.path().extension() == ".json" && e.path().filename() != "manifest.json") files.push_back(e.path());
    std::sort(files.begin(), files.end());
    if (files.empty()) throw ValidationError("no function files in '" + source + "'");
    std::vector<GridFunction> out;
    for (const auto& p : files) out.push_back(grid_function_from_json(read_json(p.string())));
    meta = {{"directory", source}, {"count", out.size()}};
    return out;
  }
  const json j = read_json(source);
  const CorpusSpec spec = corpus_spec_from_json(j);
  const int level = j.value("level", 10);
  const auto corner = j.value("corner", std::int64_t{0});
  const auto side = j.value("side", std::int64_t{1});
  const int d = j.value("dim", dim);
  const bool tensor = j.value("tensor", false);
  meta = to_json(spec);
  meta["level"] = level;
  meta["corner"] = corner;
  meta["side"] = side;
  meta["dim"] = d;
  if (tensor) {
    if (!allow_tensor || d != 2) throw ValidationError("tensor corpora are two-dimensional and used by fubini only");
    meta["tensor"] = true;
    return fubini::tensor_corpus(spec, spec.count, level, corner, side);
  }
  return generate_corpus(spec, level, corner, side, d);
}

json advisory(const GridFunction& f, lab::NormKind kind, const spaces::SpaceParams& sp) {
  json flags = json::array();
  switch (kind) {
    case lab::NormKind::HaarSeq:
      if (!haar::in_isomorphism_range(sp.s, sp.p, sp.n)) flags.push_back("outside-isomorphism-range");
      break;
    case lab::NormKind::FaberB:
      if (!faber::b_window(sp.s, sp.p)) flags.push_back("outside-window");
      break;
    case lab::NormKind::FaberF:
      if (!faber::f_window(sp.s, sp.p, sp.q)) flags.push_back("outside-window");
      break;
    case lab::NormKind::OscB:
    case lab::NormKind::OscF: {
      const auto d = kind == lab::NormKind::OscB ? osc::b_osc_norm_detail(f, sp.s, sp.p, sp.q)
                                                 : osc::f_osc_norm_detail(f, sp.s, sp.p, sp.q);
      if (!d.in_window) flags.push_back("outside-window");
      if (d.value > 0 && d.tail > 0.05 * d.value) flags.push_back("unresolved-tail");
      break;
    }
    case lab::NormKind::DiffSeminorm: {
      const auto r = diff::membership_diagnostic(f, sp.s, sp.p, sp.q, sp.s < 1 ? 1 : 2, 0, f.level());
      if (r.verdict != diff::Verdict::Bounded) flags.push_back("partial-sums-" + diff::to_string(r.verdict));
      break;
    }
    case lab::NormKind::Holder:
    case lab::NormKind::W1p:
      break;
  }
  return flags;
}

GridFunction membership_target(const std::string& target, int n, int level) {
  if (target == "chiQ")
    return sample(
        [](std::span<const double> x) {
          for (double v : x)
            if (!(v >= 0 && v < 1)) return 0.0;
          return 1.0;
        },
        level, -2, 5, n, "chiQ");
  if (target == "hat")
    return sample(
        [](std::span<const double> x) {
          double v = 1.0;
          for (double t : x) v *= std::max(0.0, 1.0 - std::fabs(t));
          return v;
        },
        level, -3, 6, n, "hat");
  throw ValidationError("unknown membership target '" + target + "'");
}

struct Options {
  std::size_t threads = 0;
  std::string space, input, kind = "osc-b", out, csv, corpus, scaler, op = "abs", slot = "compose", target,
                            spec, what;
  int jmax = 6, level = -1, M = 0, j0 = -1, J = -1;
};

int cmd_norm(const Options& o, std::ostream& out) {
  const auto sp = spaces::parse_space(o.space);
  const auto kind = lab::parse_norm_kind(o.kind);
  const GridFunction f = grid_function_from_json(read_json(o.input));
  if (f.dim() != sp.n)
    throw ValidationError("function dimension " + std::to_string(f.dim()) + " differs from n = " + std::to_string(sp.n));
  json j = {{"value", lab::evaluate_norm(f, kind, sp)}, {"advisory", advisory(f, kind, sp)}};
  j["config"] = config("norm", sp);
  j["config"]["norm_kind"] = lab::to_string(kind);
  j["config"]["level"] = f.level();
  j["config"]["input"] = f.tag();
  emit(dump(j), o.out, out);
  return 0;
}

int cmd_classify(const Options& o, std::ostream& out) {
  const auto sp = spaces::parse_space(o.space);
  json j;
  if (o.scaler.empty()) {
    j = spaces::to_json(spaces::truncation_verdict(sp));
  } else {
    const auto g = comp::LipschitzScaler::from_json(read_json(o.scaler));
    spaces::ScalerMeta meta;
    json scaler = {{"descriptor", g.to_json()}};
    try {
      const auto b = comp::validate_scaler(g, -10, 10, 1e-3);
      scaler["L1_empirical"] = b.l1;
      scaler["L2_empirical"] = b.l2;
    } catch (const ValidationError& e) {
      meta.is_lipschitz_scaling = false;
      scaler["rejected"] = e.what();
    }
    if (meta.is_lipschitz_scaling && !is_inf(sp.p)) {
      const auto gc = comp::gprime_check(g, sp.p, -10, 10, 8);
      meta.gprime_seminorm_finite = gc.finite;
      scaler["g_prime_verdict"] = diff::to_string(gc.growth.verdict);
    }
    j = spaces::to_json(spaces::composition_verdict(sp, meta));
    j["scaler"] = scaler;
  }
  j["config"] = config("classify", sp);
  emit(dump(j), o.out, out);
  return 0;
}

int cmd_experiment(const Options& o, std::ostream& out) {
  const auto sp = spaces::parse_space(o.space);
  json meta;
  const bool fub = o.what == "fubini";
  if (fub) fubini::check_params(sp, o.kind == "osc-b" ? lab::NormKind::OscB : lab::parse_norm_kind(o.kind));
  const auto corpus = load_corpus(o.corpus, sp.n, meta, fub);
  json cfg = config("experiment " + o.what, sp);
  cfg["corpus"] = meta;
  if (fub) {
    const auto kind = o.kind == "osc-b" || o.kind.empty() ? lab::NormKind::OscB : lab::parse_norm_kind(o.kind);
    const auto rep = fubini::fubini_experiment(corpus, sp, kind);
    json j = fubini::to_json(rep);
    cfg["norm_kind"] = lab::to_string(kind);
    cfg["level"] = rep.level;
    j["config"] = cfg;
    emit(dump(j), o.out, out);
    if (!o.csv.empty()) {
      std::ostringstream s;
      s.precision(17);
      s << "tag,direct,sliced,ratio\n";
      for (const auto& r : rep.rows) s << r.tag << ',' << r.norm_f << ',' << r.norm_t << ',' << r.ratio << '\n';
      emit(s.str(), o.csv, out);
    }
    return 0;
  }
  const auto kind = lab::parse_norm_kind(o.kind);
  lab::EquivalenceReport rep;
  if (o.what == "trunc") {
    rep = lab::ratio_experiment(corpus, kind, sp, lab::parse_operator(o.op));
  } else {
    if (o.scaler.empty()) throw ValidationError("experiment compose needs --scaler");
    const auto g = comp::LipschitzScaler::from_json(read_json(o.scaler));
    rep = comp::composition_experiment(corpus, g, kind, sp, comp::parse_slot(o.slot));
  }
  json j = lab::to_json(rep);
  cfg["norm_kind"] = lab::to_string(kind);
  cfg["operator"] = rep.op;
  cfg["level"] = rep.level;
  j["config"] = cfg;
  emit(dump(j), o.out, out);
  if (!o.csv.empty()) {
    std::ostringstream s;
    lab::write_csv(s, rep);
    emit(s.str(), o.csv, out);
  }
  return 0;
}

int cmd_counterexample(const Options& o, std::ostream& out) {
  const auto sp = spaces::parse_space(o.space);
  const auto rows = lab::counterexample_scaling(sp.s, sp.p, sp.q, sp.n, o.jmax);
  std::ostringstream s;
  lab::write_csv(s, rows);
  emit(s.str(), o.out, out);
  return 0;
}

int cmd_diagnose(const Options& o, std::ostream& out) {
  const auto sp = spaces::parse_space(o.space);
  GridFunction f;
  int M = 1, j0 = 0, J = 0;
  if (o.target == "file") {
    if (o.input.empty()) throw ValidationError("diagnose --target file needs --input");
    f = grid_function_from_json(read_json(o.input));
    if (f.dim() != sp.n) throw ValidationError("function dimension differs from n");
    M = sp.s < 1 ? 1 : 2;
    J = f.level();
  } else if (o.target == "hat") {
    f = membership_target("hat", sp.n, o.level >= 0 ? o.level : (sp.n == 1 ? 11 : 6));
    M = 2;
    j0 = 1;
    J = std::min(8, f.level());
  } else {
    f = membership_target(o.target, sp.n, o.level >= 0 ? o.level : (sp.n == 1 ? 12 : 6));
    J = f.level();
  }
  if (o.M > 0) M = o.M;
  if (o.j0 >= 0) j0 = o.j0;
  if (o.J >= 0) J = o.J;
  const auto r = diff::membership_diagnostic(f, sp.s, sp.p, sp.q, M, j0, J);
  json j = diff::to_json(r);
  json cfg = config("diagnose membership", sp);
  cfg["target"] = o.target;
  cfg["level"] = f.level();
  cfg["M"] = M;
  cfg["j0"] = j0;
  cfg["J"] = J;
  j["config"] = cfg;
  emit(dump(j), o.out, out);
  return 0;
}

int cmd_corpus(const Options& o, std::ostream& out) {
  const json j = read_json(o.spec);
  const CorpusSpec spec = corpus_spec_from_json(j);
  const int level = j.value("level", 10);
  const auto corner = j.value("corner", std::int64_t{0});
  const auto side = j.value("side", std::int64_t{1});
  const int dim = j.value("dim", 1);
  const auto corpus = generate_corpus(spec, level, corner, side, dim);
  if (o.out.empty()) throw ValidationError("corpus generate needs --out");
  fs::create_directories(o.out);
  json manifest = to_json(spec);
  manifest["level"] = level;
  manifest["corner"] = corner;
  manifest["side"] = side;
  manifest["dim"] = dim;
  manifest["version"] = version_string();
  manifest["files"] = json::array();
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    std::ostringstream name;
    name << "f" << std::setw(4) << std::setfill('0') << i << ".json";
    emit(to_json(corpus[i]).dump() + "\n", (fs::path(o.out) / name.str()).string(), out);
    manifest["files"].push_back(name.str());
  }
  emit(dump(manifest), (fs::path(o.out) / "manifest.json").string(), out);
  out << corpus.size() << " functions written to " << o.out << "\n";
  return 0;
}

}  // namespace

std::string version_string() { return std::string(FSPACE_VERSION) + "-g" + FSPACE_GIT_REV; }

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Discrete norms, truncation and composition experiments for Besov and Triebel-Lizorkin spaces",
               "fspace"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_version_flag("--version", version_string());
  Options o;
  app.add_option("--threads", o.threads, "worker threads (default FSPACE_THREADS or 1)");

  auto* norm = app.add_subcommand("norm", "discrete norm of a function file");
  norm->add_option("--kind", o.kind, "haar|faber-b|faber-f|osc-b|osc-f|diff|holder|w1p")->required();
  norm->add_option("--space", o.space, "FAMILY:s:p:q:n")->required();
  norm->add_option("--input", o.input, "function JSON")->required();
  norm->add_option("--out", o.out);

  auto* classify = app.add_subcommand("classify", "truncation or composition verdict with citations");
  classify->add_option("--space", o.space)->required();
  classify->add_option("--scaler", o.scaler, "scaler descriptor JSON (file or inline)");
  classify->add_option("--out", o.out);

  auto* exp = app.add_subcommand("experiment", "corpus ratio experiments");
  exp->add_option("what", o.what)->required()->check(CLI::IsMember({"trunc", "compose", "fubini"}));
  exp->add_option("--space", o.space)->required();
  exp->add_option("--corpus", o.corpus, "corpus spec JSON or generated corpus directory")->required();
  exp->add_option("--norm-kind", o.kind);
  exp->add_option("--op", o.op, "abs|pos|neg (trunc)");
  exp->add_option("--slot", o.slot, "compose|abs-compose (compose)");
  exp->add_option("--scaler", o.scaler);
  exp->add_option("--out", o.out);
  exp->add_option("--csv", o.csv);

  auto* counter = app.add_subcommand("counterexample", "scaling law of the alternating Haar sums");
  counter->add_option("what", o.what)->required()->check(CLI::IsMember({"haar-scaling"}));
  counter->add_option("--space", o.space)->required();
  counter->add_option("--jmax", o.jmax)->check(CLI::Range(0, 25));
  counter->add_option("--out", o.out);

  auto* diagnose = app.add_subcommand("diagnose", "membership growth diagnostics");
  diagnose->add_option("what", o.what)->required()->check(CLI::IsMember({"membership"}));
  diagnose->add_option("--target", o.target)->required()->check(CLI::IsMember({"chiQ", "hat", "file"}));
  diagnose->add_option("--space", o.space)->required();
  diagnose->add_option("--input", o.input);
  diagnose->add_option("--level", o.level);
  diagnose->add_option("--M", o.M)->check(CLI::Range(1, 2));
  diagnose->add_option("--j0", o.j0);
  diagnose->add_option("--J", o.J);
  diagnose->add_option("--out", o.out);

  auto* corpus = app.add_subcommand("corpus", "corpus management");
  corpus->add_option("what", o.what)->required()->check(CLI::IsMember({"generate"}));
  corpus->add_option("--spec", o.spec)->required();
  corpus->add_option("--out", o.out)->required();

  try {
    std::vector<std::string> rev(args.rbegin(), args.rend());
    app.parse(rev);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  try {
    if (o.threads > 0) parallel::set_thread_count(o.threads);
    if (norm->parsed()) return cmd_norm(o, out);
    if (classify->parsed()) return cmd_classify(o, out);
    if (exp->parsed()) return cmd_experiment(o, out);
    if (counter->parsed()) return cmd_counterexample(o, out);
    if (diagnose->parsed()) return cmd_diagnose(o, out);
    if (corpus->parsed()) return cmd_corpus(o, out);
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const PreconditionError& e) {
    err << "refused: " << e.what() << " [" << e.citation() << "]\n";
    return 3;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}

int run(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run(args, std::cout, std::cerr);
}

}  // namespace fspace::cli

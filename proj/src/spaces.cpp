#include "fspace/spaces.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>
#include <stdexcept>

#include "fspace/error.hpp"
#include "fspace/numeric.hpp"

namespace fspace::spaces {
namespace {

bool near(double a, double b) {
  if (a == b) return true;
  if (is_inf(a) || is_inf(b)) return false;
  return std::fabs(a - b) <= kEndpointTolerance * std::max({1.0, std::fabs(a), std::fabs(b)});
}

// a < b, with near values counted as equal.
bool lt(double a, double b) { return a < b && !near(a, b); }
bool le(double a, double b) { return a < b || near(a, b); }
// a < x < b
bool open(double a, double x, double b) { return lt(a, x) && lt(x, b); }

double parse_exponent(const std::string& text, const std::string& what) {
  if (text == "inf" || text == "infinity" || text == "Inf") return kInf;
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw ValidationError("cannot read " + what + " from '" + text + "'");
  }
}

std::string format_number(double v) {
  if (is_inf(v)) return "inf";
  std::ostringstream out;
  out.precision(15);
  out << v;
  return out.str();
}

// Yes and no claims per slot, each with the tags that make them.
class Claims {
 public:
  void yes(const std::string& slot, const std::string& tag) { add(yes_[slot], tag); }
  void no(const std::string& slot, const std::string& tag) { add(no_[slot], tag); }
  // Everything claimed for `from` is also claimed for `to`.
  void imply_yes(const std::string& from, const std::string& to) {
    for (const auto& t : yes_[from]) add(yes_[to], t);
  }
  void imply_no(const std::string& from, const std::string& to) {
    for (const auto& t : no_[from]) add(no_[to], t);
  }
  Tri value(const std::string& slot) {
    const bool y = !yes_[slot].empty(), n = !no_[slot].empty();
    if (y && n)
      throw std::logic_error("contradictory statements for slot " + slot + ": " + yes_[slot].front() + " vs " +
                             no_[slot].front());
    return y ? Tri::Yes : n ? Tri::No : Tri::Unknown;
  }
  void cite(const std::string& slot, std::vector<Citation>& out) {
    for (const auto& t : yes_[slot]) out.push_back({slot, t});
    for (const auto& t : no_[slot]) out.push_back({slot, t});
  }

 private:
  static void add(std::vector<std::string>& tags, const std::string& tag) {
    if (std::find(tags.begin(), tags.end(), tag) == tags.end()) tags.push_back(tag);
  }
  std::map<std::string, std::vector<std::string>> yes_, no_;
};

nlohmann::json citations_json(const std::vector<Citation>& cs) {
  auto arr = nlohmann::json::array();
  for (const auto& c : cs) arr.push_back({{"slot", c.slot}, {"tag", c.tag}});
  return arr;
}

std::vector<std::string> slot_tags(const std::vector<Citation>& cs, const std::string& slot) {
  std::vector<std::string> out;
  for (const auto& c : cs)
    if (c.slot == slot) out.push_back(c.tag);
  return out;
}

}  // namespace

std::string to_string(Family f) { return f == Family::B ? "B" : "F"; }

std::string to_string(Tri t) {
  switch (t) {
    case Tri::Yes:
      return "yes";
    case Tri::No:
      return "no";
    case Tri::Unknown:
      break;
  }
  return "unknown";
}

void SpaceParams::validate() const {
  if (!std::isfinite(s)) throw ValidationError("smoothness s must be finite");
  if (!(p > 0.0)) throw ValidationError("p must be positive");
  if (!(q > 0.0)) throw ValidationError("q must be positive");
  if (n < 1) throw ValidationError("dimension n must be at least 1");
  if (family == Family::F && is_inf(p)) throw ValidationError("F spaces need p < inf");
}

SpaceParams parse_space(const std::string& text) {
  std::vector<std::string> parts;
  std::stringstream in(text);
  for (std::string part; std::getline(in, part, ':');) parts.push_back(part);
  if (parts.size() != 5) throw ValidationError("space must look like A:s:p:q:n, got '" + text + "'");
  SpaceParams sp;
  if (parts[0] == "B")
    sp.family = Family::B;
  else if (parts[0] == "F")
    sp.family = Family::F;
  else
    throw ValidationError("space family must be B or F, got '" + parts[0] + "'");
  sp.s = parse_exponent(parts[1], "s");
  sp.p = parse_exponent(parts[2], "p");
  sp.q = parse_exponent(parts[3], "q");
  const double n = parse_exponent(parts[4], "n");
  if (!(n >= 1) || n != std::floor(n) || n > 64) throw ValidationError("dimension n must be a positive integer");
  sp.n = static_cast<int>(n);
  sp.validate();
  return sp;
}

std::string to_string(const SpaceParams& sp) {
  return to_string(sp.family) + ":" + format_number(sp.s) + ":" + format_number(sp.p) + ":" + format_number(sp.q) +
         ":" + std::to_string(sp.n);
}

nlohmann::json to_json(const SpaceParams& sp) {
  auto num = [](double v) -> nlohmann::json {
    if (is_inf(v)) return "inf";
    return v;
  };
  return {{"family", to_string(sp.family)}, {"s", sp.s}, {"p", num(sp.p)}, {"q", num(sp.q)}, {"n", sp.n}};
}

double sigma(int n, double p) { return n * (std::max(reciprocal(p), 1.0) - 1.0); }

double sigma_pq(int n, double p, double q) {
  return n * (std::max({reciprocal(p), reciprocal(q), 1.0}) - 1.0);
}

double sigma_r(int n, double p, double r) { return n * (std::max(reciprocal(p), reciprocal(r)) - reciprocal(r)); }

TruncationVerdict::TruncationVerdict(Tri truncation, Tri strong, Tri perfect, std::vector<Citation> citations)
    : truncation_(truncation), strong_(strong), perfect_(perfect), citations_(std::move(citations)) {
  const bool broken = (perfect == Tri::Yes && strong != Tri::Yes) || (strong == Tri::Yes && truncation != Tri::Yes) ||
                      (truncation == Tri::No && strong != Tri::No) || (strong == Tri::No && perfect != Tri::No);
  if (broken)
    throw ValidationError("truncation verdict breaks nesting: truncation=" + to_string(truncation) +
                          ", strong=" + to_string(strong) + ", perfect=" + to_string(perfect));
}

std::vector<std::string> TruncationVerdict::tags(const std::string& slot) const { return slot_tags(citations_, slot); }

TruncationVerdict truncation_verdict(const SpaceParams& sp) {
  sp.validate();
  const double s = sp.s, p = sp.p, q = sp.q, ip = reciprocal(p), iq = reciprocal(q);
  const int n = sp.n;
  const double sig = sigma(n, p), sig_pq = sigma_pq(n, p, q);
  const bool B = sp.family == Family::B, F = !B, finite_p = !is_inf(p);
  const bool one = n == 1;
  // The F windows exclude s = 1/p when p <= 1.
  const bool f_gap = le(p, 1.0) && near(s, ip);
  Claims c;

  if (B && open(sig, s, 1 + ip)) {
    c.yes("truncation", "Thm3.3(i)");
    if (one) c.yes("truncation", "Thm3.12(i)");
    c.yes("truncation", "Thm3.16(i)");
  }
  if (F && open(sig_pq, s, 1 + ip) && !f_gap) {
    c.yes("truncation", "Thm3.3(ii)");
    if (one) c.yes("truncation", "Thm3.14(i)");
    c.yes("truncation", "Thm3.18(i)");
  }

  if (B && one && open(ip, s, 1 + std::min(ip, 1.0))) c.yes("perfect", "Thm3.12(ii)");
  if (F && one && lt(1.0, p) && lt(1.0, q) && open(std::max(ip, iq), s, 1.0)) c.yes("perfect", "Thm3.14(ii)");
  if (B && open(n * ip, s, 1.0)) c.yes("perfect", "Thm3.16(ii)");
  if (F && open(n * std::max(ip, iq), s, 1.0)) c.yes("perfect", "Thm3.18(ii)");

  if (B && near(p, q) && open(std::max(ip, sig), s, 1 + std::min(ip, 1.0))) c.yes("strong", "Thm3.16(iii)");
  if (F && lt(1.0, p) && lt(1.0, q) && open(std::max(ip, iq), s, 1.0)) c.yes("strong", "Thm3.18(iii)");

  if (finite_p) {
    if (B && one && lt(sig, s) && le(s, ip)) c.no("strong", "Thm3.12(iii)");
    if (F && one && open(sig, s, ip)) c.no("strong", "Thm3.14(iii)");
    if (B && lt(sig, s) && le(s, ip)) c.no("strong", "Thm3.16(iv)");
    if (F && open(sig, s, ip)) c.no("strong", "Thm3.18(iv)");
    const bool b_endpoint = B && near(s, ip) && is_inf(q);
    if (open(sig, s, ip) || (b_endpoint && lt((n - 1.0) / n, p))) c.no("strong", "Cor3.10");
    // The indicator of the unit cube lies in the space (s below 1/p, or B at s = 1/p with q = inf).
    if (lt(sig, s) && (lt(s, ip) || b_endpoint)) c.no("strong", "Prop3.8");
    if (B && near(s, ip) && near(p, q) && lt(1.0, p)) c.no("strong", "Rem3.11");
  }

  c.imply_yes("perfect", "strong");
  c.imply_yes("strong", "truncation");
  c.imply_no("truncation", "strong");
  c.imply_no("strong", "perfect");

  const Tri t = c.value("truncation"), st = c.value("strong"), pe = c.value("perfect");
  std::vector<Citation> cites;
  c.cite("truncation", cites);
  c.cite("strong", cites);
  c.cite("perfect", cites);
  return TruncationVerdict(t, st, pe, std::move(cites));
}

CompositionVerdict::CompositionVerdict(Tri sublinear, Tri strong, Tri perfect, Tri abs_strong, Tri abs_perfect,
                                       bool requires_g_prime_seminorm, std::vector<Citation> citations)
    : sublinear_(sublinear),
      strong_(strong),
      perfect_(perfect),
      abs_strong_(abs_strong),
      abs_perfect_(abs_perfect),
      requires_g_prime_seminorm_(requires_g_prime_seminorm),
      citations_(std::move(citations)) {
  for (Tri t : {sublinear, strong, perfect, abs_strong, abs_perfect})
    if (t == Tri::No) throw ValidationError("composition verdict slots are yes or unknown");
  const bool broken = (perfect == Tri::Yes && strong != Tri::Yes) || (strong == Tri::Yes && sublinear != Tri::Yes) ||
                      (abs_perfect == Tri::Yes && abs_strong != Tri::Yes);
  if (broken) throw ValidationError("composition verdict breaks nesting");
}

std::vector<std::string> CompositionVerdict::tags(const std::string& slot) const {
  return slot_tags(citations_, slot);
}

CompositionVerdict composition_verdict(const SpaceParams& sp, const ScalerMeta& meta) {
  sp.validate();
  const double s = sp.s, p = sp.p, q = sp.q, ip = reciprocal(p), iq = reciprocal(q);
  const int n = sp.n;
  const bool B = sp.family == Family::B, F = !B;
  const bool above_one = le(1.0, s);
  // The g' condition, needed only from s = 1 on.
  const bool side_ok = !above_one || meta.gprime_seminorm_finite;
  bool needs_gprime = false;
  Claims c;

  if (meta.is_lipschitz_scaling) {
    if ((B && open(n * ip, s, 1.0)) || (F && open(n * std::max(ip, iq), s, 1.0))) {
      c.yes("perfect", "Thm4.3");
      c.yes("abs_perfect", "Thm4.3");
    }
    if (B && lt(1.0, p) && open(0.0, s, 1 + ip)) {
      needs_gprime = needs_gprime || above_one;
      if (side_ok) {
        c.yes("strong", "Prop4.7");
        // Perfect needs the embedding into continuous functions.
        if (lt(n * ip, s)) c.yes("perfect", "Prop4.7");
      }
    }
    if (B && n == 1 && lt(1.0, p) && open(ip, s, 1 + ip)) {
      needs_gprime = needs_gprime || above_one;
      if (side_ok) {
        c.yes("perfect", "Thm4.10");
        c.yes("abs_perfect", "Thm4.10");
      }
    }
    if (F && lt(1.0, p) && !is_inf(p) && lt(1.0, q) && open(std::max(ip, iq), s, 1.0)) {
      c.yes("strong", "Thm4.12(i)");
      c.yes("abs_strong", "Thm4.12(i)");
    }
    if (B && near(p, q) && lt(1.0, p) && open(ip, s, 1 + ip)) {
      needs_gprime = needs_gprime || above_one;
      if (side_ok) {
        c.yes("strong", "Thm4.12(ii)");
        c.yes("abs_strong", "Thm4.12(ii)");
      }
    }
    if (B && lt(1.0, p) && !is_inf(p) && le(1.0, q) && open(1.0, s, 1 + ip)) {
      needs_gprime = true;
      if (meta.gprime_seminorm_finite) c.yes("sublinear", "Prop4.5");
    }
  }

  c.imply_yes("perfect", "strong");
  c.imply_yes("abs_perfect", "abs_strong");
  c.imply_yes("strong", "sublinear");

  std::vector<Citation> cites;
  for (const char* slot : {"sublinear", "strong", "perfect", "abs_strong", "abs_perfect"}) c.cite(slot, cites);
  return CompositionVerdict(c.value("sublinear"), c.value("strong"), c.value("perfect"), c.value("abs_strong"),
                            c.value("abs_perfect"), needs_gprime, std::move(cites));
}

nlohmann::json to_json(const TruncationVerdict& v) {
  return {{"truncation", to_string(v.truncation())},
          {"strong", to_string(v.strong())},
          {"perfect", to_string(v.perfect())},
          {"citations", citations_json(v.citations())}};
}

nlohmann::json to_json(const CompositionVerdict& v) {
  return {{"sublinear", to_string(v.sublinear())},
          {"strong", to_string(v.strong())},
          {"perfect", to_string(v.perfect())},
          {"abs_strong", to_string(v.abs_strong())},
          {"abs_perfect", to_string(v.abs_perfect())},
          {"requires_g_prime_seminorm", v.requires_g_prime_seminorm()},
          {"citations", citations_json(v.citations())}};
}

}  // namespace fspace::spaces

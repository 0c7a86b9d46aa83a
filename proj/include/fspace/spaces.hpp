#pragma once

// Space parameters, the sigma thresholds, and classifiers that read off the
// known truncation and composition properties of a space from its parameters.
//
// Every window is a strict inequality unless stated otherwise. Two parameter
// values closer than kEndpointTolerance (relative) are treated as equal, so
// s = 0.333333333333 sits on the endpoint 1/3.

#include <string>
#include <vector>

#include <json.hpp>

namespace fspace::spaces {

enum class Family { B, F };
std::string to_string(Family f);

inline constexpr double kEndpointTolerance = 1e-12;

struct SpaceParams {
  Family family = Family::B;
  double s = 0.0;
  double p = 2.0;  // (0, inf]; finite for F
  double q = 2.0;  // (0, inf]
  int n = 1;

  // Throws ValidationError on non-positive p or q, n < 1, non-finite s, or F with p = inf.
  void validate() const;
};

// "A:s:p:q:n" with A in {B, F}; p and q accept "inf". Validated.
SpaceParams parse_space(const std::string& text);
std::string to_string(const SpaceParams& sp);
nlohmann::json to_json(const SpaceParams& sp);

// n (max(1/p, 1) - 1)
double sigma(int n, double p);
// n (max(1/p, 1/q, 1) - 1)
double sigma_pq(int n, double p, double q);
// n (max(1/p, 1/r) - 1/r)
double sigma_r(int n, double p, double r);

enum class Tri { Yes, No, Unknown };
std::string to_string(Tri t);

struct Citation {
  std::string slot;
  std::string tag;
  bool operator==(const Citation&) const = default;
};

class TruncationVerdict {
 public:
  // Rejects verdicts breaking perfect => strong => truncation.
  TruncationVerdict(Tri truncation, Tri strong, Tri perfect, std::vector<Citation> citations);

  Tri truncation() const { return truncation_; }
  Tri strong() const { return strong_; }
  Tri perfect() const { return perfect_; }
  const std::vector<Citation>& citations() const { return citations_; }
  // Tags attached to one slot.
  std::vector<std::string> tags(const std::string& slot) const;

 private:
  Tri truncation_, strong_, perfect_;
  std::vector<Citation> citations_;
};

TruncationVerdict truncation_verdict(const SpaceParams& sp);

struct ScalerMeta {
  bool is_lipschitz_scaling = true;
  // Whether g' has a finite homogeneous B^{1/p}_{p,inf} seminorm.
  bool gprime_seminorm_finite = false;
};

class CompositionVerdict {
 public:
  // Slots are yes or unknown. Rejects perfect without strong and strong without sublinear.
  CompositionVerdict(Tri sublinear, Tri strong, Tri perfect, Tri abs_strong, Tri abs_perfect,
                     bool requires_g_prime_seminorm, std::vector<Citation> citations);

  Tri sublinear() const { return sublinear_; }
  Tri strong() const { return strong_; }
  Tri perfect() const { return perfect_; }
  Tri abs_strong() const { return abs_strong_; }
  Tri abs_perfect() const { return abs_perfect_; }
  // True when some window needs the g' condition at these parameters (s >= 1).
  bool requires_g_prime_seminorm() const { return requires_g_prime_seminorm_; }
  const std::vector<Citation>& citations() const { return citations_; }
  std::vector<std::string> tags(const std::string& slot) const;

 private:
  Tri sublinear_, strong_, perfect_, abs_strong_, abs_perfect_;
  bool requires_g_prime_seminorm_;
  std::vector<Citation> citations_;
};

CompositionVerdict composition_verdict(const SpaceParams& sp, const ScalerMeta& meta);

// {truncation, strong, perfect, citations:[{slot, tag}]}
nlohmann::json to_json(const TruncationVerdict& v);
nlohmann::json to_json(const CompositionVerdict& v);

}  // namespace fspace::spaces

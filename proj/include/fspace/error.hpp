#pragma once

#include <stdexcept>
#include <string>

namespace fspace {

// Malformed input, out-of-range parameters, broken invariants of a value.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A parameter gate from the theory refuses the request.
// `citation` is the machine-readable tag of the governing statement.
class PreconditionError : public std::runtime_error {
 public:
  PreconditionError(const std::string& what, std::string citation)
      : std::runtime_error(what), citation_(std::move(citation)) {}

  const std::string& citation() const noexcept { return citation_; }

 private:
  std::string citation_;
};

}  // namespace fspace

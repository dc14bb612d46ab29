#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace fracss {

/// Raised when a power rule or special-function evaluation is applied outside
/// the set where it is defined (gamma poles in a numerator, Caputo rule on an
/// unsupported exponent, negative power at t = 0, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A series did not decay below the requested tolerance within max_terms.
class TruncationError : public std::runtime_error {
 public:
  TruncationError(const std::string& what, double last_term)
      : std::runtime_error(what), last_term_(last_term) {}
  double last_term_magnitude() const noexcept { return last_term_; }

 private:
  double last_term_;
};

/// Invalid construction arguments for a domain type.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// An operator shift or condition cannot be written on the exponent lattice.
class LatticeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Seed-assignment failures while solving recurrence chains.
class SolveError : public std::runtime_error {
 public:
  enum class Kind { Underdetermined, Overdetermined, Unsupported };

  SolveError(Kind kind, std::vector<long long> index, const std::string& what)
      : std::runtime_error(what), kind_(kind), index_(std::move(index)) {}

  Kind kind() const noexcept { return kind_; }
  const std::vector<long long>& index() const noexcept { return index_; }

 private:
  Kind kind_;
  std::vector<long long> index_;
};

/// Problem-file parse or validation failure; line is 1-based, 0 when unknown.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, int line)
      : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + what : what),
        line_(line) {}
  int line() const noexcept { return line_; }

 private:
  int line_;
};

}  // namespace fracss

#pragma once

#include <stdexcept>
#include <string>

namespace homvol {

/// Malformed input document. field() names the offending JSON path.
class ParseError : public std::runtime_error {
public:
  ParseError(std::string field, const std::string &what)
      : std::runtime_error(field.empty() ? what : field + ": " + what),
        field_(std::move(field)) {}
  const std::string &field() const { return field_; }

private:
  std::string field_;
};

/// The sublevel set {g <= 1} has infinite volume.
class InfeasibleError : public std::runtime_error {
public:
  InfeasibleError(const std::string &what, double sphere_minimum)
      : std::runtime_error(what), sphere_minimum_(sphere_minimum) {}
  double sphere_minimum() const { return sphere_minimum_; }

private:
  double sphere_minimum_;
};

/// Importance weights too heavy-tailed for a trustworthy estimate.
class DivergenceError : public std::runtime_error {
public:
  DivergenceError(const std::string &what, double ess_fraction)
      : std::runtime_error(what), ess_fraction_(ess_fraction) {}
  double ess_fraction() const { return ess_fraction_; }

private:
  double ess_fraction_;
};

} // namespace homvol

namespace homvol {

/// A certificate was asked to judge a candidate outside its preconditions.
class PreconditionError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

} // namespace homvol

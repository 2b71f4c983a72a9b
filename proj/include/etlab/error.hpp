#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace etlab {

/// Input length does not match the grid it is used with.
class ShapeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Argument outside the domain of a closed-form expression (e.g. ρ ≤ 0).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// An entropic variable left the admissible box |φ|, |w| ≤ cap.
class OverflowError : public std::overflow_error {
 public:
  OverflowError(const std::string& what, std::size_t cell)
      : std::overflow_error(what), cell_(cell) {}
  std::size_t cell() const noexcept { return cell_; }

 private:
  std::size_t cell_;
};

/// Linear system that should be SPD produced a non-positive pivot.
class NotSpdError : public std::runtime_error {
 public:
  NotSpdError(const std::string& what, std::size_t pivot)
      : std::runtime_error(what), pivot_(pivot) {}
  std::size_t pivot() const noexcept { return pivot_; }

 private:
  std::size_t pivot_;
};

/// Iterative solve failed: fixed point not reached, backoff exhausted, CG
/// out of iterations, root bracket lost.
class SolverError : public std::runtime_error {
 public:
  SolverError(const std::string& what, double last_residual)
      : std::runtime_error(what), last_residual_(last_residual) {}
  double last_residual() const noexcept { return last_residual_; }

 private:
  double last_residual_;
};

/// Invalid run configuration; `path` is the dotted field path at fault.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& path, const std::string& what)
      : std::runtime_error(path.empty() ? what : path + ": " + what), path_(path) {}
  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

}  // namespace etlab

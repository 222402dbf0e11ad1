#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace bubbletower {

enum class ErrorKind {
  parameter,
  domain,
  singularity,
  unsupported,
  accuracy,
  solver,
  solvability,
  search,
  structure,
  resolution,
  non_contraction,
  config,
  validation,
  io,
};

std::string_view kind_name(ErrorKind kind) noexcept;

/// Base error for the library. The kind decides the CLI exit status:
/// numerical failures map to 2, usage and configuration problems to 1.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }
  bool is_numerical() const noexcept;

 private:
  ErrorKind kind_;
};

/// Iterative solver failure; carries the residual history for diagnosis.
class SolverError : public Error {
 public:
  SolverError(ErrorKind kind, const std::string& what, std::vector<double> trace)
      : Error(kind, what), trace_(std::move(trace)) {}

  const std::vector<double>& trace() const noexcept { return trace_; }

 private:
  std::vector<double> trace_;
};

/// Quadrature did not reach its tolerance.
class AccuracyError : public Error {
 public:
  AccuracyError(const std::string& what, double achieved)
      : Error(ErrorKind::accuracy, what), achieved_(achieved) {}

  double achieved_error() const noexcept { return achieved_; }

 private:
  double achieved_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) {
  throw Error(kind, what);
}

inline void require(bool cond, ErrorKind kind, const std::string& what) {
  if (!cond) fail(kind, what);
}

}  // namespace bubbletower

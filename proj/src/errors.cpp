#include "bubbletower/errors.hpp"

namespace bubbletower {

std::string_view kind_name(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::parameter: return "parameter";
    case ErrorKind::domain: return "domain";
    case ErrorKind::singularity: return "singularity";
    case ErrorKind::unsupported: return "unsupported";
    case ErrorKind::accuracy: return "accuracy";
    case ErrorKind::solver: return "solver";
    case ErrorKind::solvability: return "solvability";
    case ErrorKind::search: return "search";
    case ErrorKind::structure: return "structure";
    case ErrorKind::resolution: return "resolution";
    case ErrorKind::non_contraction: return "non_contraction";
    case ErrorKind::config: return "config";
    case ErrorKind::validation: return "validation";
    case ErrorKind::io: return "io";
  }
  return "unknown";
}

bool Error::is_numerical() const noexcept {
  switch (kind_) {
    case ErrorKind::config:
    case ErrorKind::validation:
    case ErrorKind::io:
      return false;
    default:
      return true;
  }
}

}  // namespace bubbletower

#pragma once
#include <stdexcept>
#include <string>
#include <utility>

namespace giantwg {

// Base error carrying a short machine-readable code; sweep output uses the
// code as the per-point failure flag.
struct Error : std::runtime_error {
  Error(std::string code_, const std::string& what_)
      : std::runtime_error(what_), code(std::move(code_)) {}
  std::string code;
};

#define GIANTWG_DEFINE_ERROR(Name, code_str)                       \
  struct Name : Error {                                            \
    explicit Name(const std::string& what_ = code_str)             \
        : Error(code_str, what_) {}                                \
  }

GIANTWG_DEFINE_ERROR(SingularGreenFunction, "singular_green");
GIANTWG_DEFINE_ERROR(OrderOverflow, "order_overflow");
GIANTWG_DEFINE_ERROR(SeriesDiverged, "series_diverged");
GIANTWG_DEFINE_ERROR(QuadratureNotConverged, "quadrature_not_converged");
GIANTWG_DEFINE_ERROR(GridTooCoarse, "grid_too_coarse");
GIANTWG_DEFINE_ERROR(UndefinedG2, "undefined_g2");
GIANTWG_DEFINE_ERROR(DegenerateSteadyState, "degenerate_steady_state");
GIANTWG_DEFINE_ERROR(CutoffTooSmall, "cutoff_too_small");
GIANTWG_DEFINE_ERROR(NotConverged, "not_converged");
GIANTWG_DEFINE_ERROR(EigenSolverFailure, "eigensolver_failure");
GIANTWG_DEFINE_ERROR(OrderingAssembly, "ordering_assembly");
GIANTWG_DEFINE_ERROR(ParseError, "parse_error");
GIANTWG_DEFINE_ERROR(ValidationError, "validation_error");

#undef GIANTWG_DEFINE_ERROR

}  // namespace giantwg

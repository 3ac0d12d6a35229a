#pragma once

#include <stdexcept>
#include <string>

namespace shrinkers {

/// Base class for every failure raised by the library. The `code()` string is
/// stable and is what the CLI prints and the report records.
class Error : public std::runtime_error {
 public:
  Error(std::string code, const std::string& what)
      : std::runtime_error(code + ": " + what), code_(std::move(code)) {}
  const std::string& code() const noexcept { return code_; }

 private:
  std::string code_;
};

#define SHRINKERS_DEFINE_ERROR(Name)                                    \
  class Name : public Error {                                           \
   public:                                                              \
    explicit Name(const std::string& what) : Error(#Name, what) {}      \
  };

SHRINKERS_DEFINE_ERROR(DegenerateImmersion)
SHRINKERS_DEFINE_ERROR(MeshValidation)
SHRINKERS_DEFINE_ERROR(ParseError)
SHRINKERS_DEFINE_ERROR(QuadratureUnderResolved)
SHRINKERS_DEFINE_ERROR(OptimizerStalled)
SHRINKERS_DEFINE_ERROR(NotAShrinker)
SHRINKERS_DEFINE_ERROR(VanishingWeight)
SHRINKERS_DEFINE_ERROR(SolverFailure)
SHRINKERS_DEFINE_ERROR(NotInSubspace)
SHRINKERS_DEFINE_ERROR(InsufficientEigenbasis)
SHRINKERS_DEFINE_ERROR(WrongCodimension)
SHRINKERS_DEFINE_ERROR(BlowUp)
SHRINKERS_DEFINE_ERROR(NoRoot)
SHRINKERS_DEFINE_ERROR(DerivativeOrderUnavailable)
SHRINKERS_DEFINE_ERROR(NotSpherical)
SHRINKERS_DEFINE_ERROR(VanishingH)
SHRINKERS_DEFINE_ERROR(NotBorderline)
SHRINKERS_DEFINE_ERROR(BadDimensions)
SHRINKERS_DEFINE_ERROR(InvalidArgument)
SHRINKERS_DEFINE_ERROR(IoError)

#undef SHRINKERS_DEFINE_ERROR

}  // namespace shrinkers

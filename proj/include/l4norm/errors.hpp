#ifndef L4NORM_ERRORS_HPP
#define L4NORM_ERRORS_HPP

#include <stdexcept>
#include <string>
#include <string_view>

namespace l4norm {

enum class ErrorKind {
  Parameter,
  Collision,
  BranchCut,
  Convergence,
  Singularity,
  CriticalTerm,
  SmallDivisor,
  StabilityDomain,
  Contract,
  Config,
};

constexpr std::string_view to_string(ErrorKind k) noexcept {
  switch (k) {
    case ErrorKind::Parameter: return "Parameter";
    case ErrorKind::Collision: return "Collision";
    case ErrorKind::BranchCut: return "BranchCut";
    case ErrorKind::Convergence: return "Convergence";
    case ErrorKind::Singularity: return "Singularity";
    case ErrorKind::CriticalTerm: return "CriticalTerm";
    case ErrorKind::SmallDivisor: return "SmallDivisor";
    case ErrorKind::StabilityDomain: return "StabilityDomain";
    case ErrorKind::Contract: return "Contract";
    case ErrorKind::Config: return "Config";
  }
  return "Unknown";
}

/// Base of every error raised by the library. The kind is what the CLI reports.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

template <ErrorKind K>
class TypedError : public Error {
 public:
  explicit TypedError(const std::string& what) : Error(K, what) {}
};

using ParameterError = TypedError<ErrorKind::Parameter>;
using CollisionError = TypedError<ErrorKind::Collision>;
using BranchCutError = TypedError<ErrorKind::BranchCut>;
using ConvergenceError = TypedError<ErrorKind::Convergence>;
using SingularityError = TypedError<ErrorKind::Singularity>;
using CriticalTermError = TypedError<ErrorKind::CriticalTerm>;
using SmallDivisorError = TypedError<ErrorKind::SmallDivisor>;
using StabilityDomainError = TypedError<ErrorKind::StabilityDomain>;
using ContractError = TypedError<ErrorKind::Contract>;
using ConfigError = TypedError<ErrorKind::Config>;

}  // namespace l4norm

#endif  // L4NORM_ERRORS_HPP

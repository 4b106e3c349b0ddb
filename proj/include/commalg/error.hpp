#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace commalg {

/// Failure categories raised by the library. Every public operation reports
/// precondition violations through `Error` carrying one of these codes.
enum class Errc {
  ZeroInverse,
  DomainMismatch,
  ShapeMismatch,
  InvalidArgument,
  NormTooLarge,
  NotUnitNorm,
  NotPure,
  ZeroInput,
  InfeasibleCase,
  InfiniteDomain,
  SyntaxError,
  UnknownVariable,
  ArityMismatch,
  NotMultilinear,
  BudgetExceeded,
  Singular,
  CentralInput,
  HypothesisViolated,
  RetryExhausted,
  ConjugateDiagonal,
  NotNilpotent,
  Nilpotent,
  Invertible,
  NotSkewInvolution,
  NoScalarSkewInvolution,
  NonzeroTrace,
  NotTriangular,
  NoLambda,
  Degenerate2x2GF2,
  FieldTooSmall,
  NotSL,
  UnsupportedPolynomial,
  NormResidual,
  MalformedCertificate,
};

inline constexpr std::string_view errc_name(Errc e) {
  switch (e) {
    case Errc::ZeroInverse: return "ZeroInverse";
    case Errc::DomainMismatch: return "DomainMismatch";
    case Errc::ShapeMismatch: return "ShapeMismatch";
    case Errc::InvalidArgument: return "InvalidArgument";
    case Errc::NormTooLarge: return "NormTooLarge";
    case Errc::NotUnitNorm: return "NotUnitNorm";
    case Errc::NotPure: return "NotPure";
    case Errc::ZeroInput: return "ZeroInput";
    case Errc::InfeasibleCase: return "InfeasibleCase";
    case Errc::InfiniteDomain: return "InfiniteDomain";
    case Errc::SyntaxError: return "SyntaxError";
    case Errc::UnknownVariable: return "UnknownVariable";
    case Errc::ArityMismatch: return "ArityMismatch";
    case Errc::NotMultilinear: return "NotMultilinear";
    case Errc::BudgetExceeded: return "BudgetExceeded";
    case Errc::Singular: return "Singular";
    case Errc::CentralInput: return "CentralInput";
    case Errc::HypothesisViolated: return "HypothesisViolated";
    case Errc::RetryExhausted: return "RetryExhausted";
    case Errc::ConjugateDiagonal: return "ConjugateDiagonal";
    case Errc::NotNilpotent: return "NotNilpotent";
    case Errc::Nilpotent: return "Nilpotent";
    case Errc::Invertible: return "Invertible";
    case Errc::NotSkewInvolution: return "NotSkewInvolution";
    case Errc::NoScalarSkewInvolution: return "NoScalarSkewInvolution";
    case Errc::NonzeroTrace: return "NonzeroTrace";
    case Errc::NotTriangular: return "NotTriangular";
    case Errc::NoLambda: return "NoLambda";
    case Errc::Degenerate2x2GF2: return "Degenerate2x2GF2";
    case Errc::FieldTooSmall: return "FieldTooSmall";
    case Errc::NotSL: return "NotSL";
    case Errc::UnsupportedPolynomial: return "UnsupportedPolynomial";
    case Errc::NormResidual: return "NormResidual";
    case Errc::MalformedCertificate: return "MalformedCertificate";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

/// Parse failures keep the byte offset of the offending character.
class SyntaxError : public Error {
 public:
  SyntaxError(std::size_t offset, const std::string& what)
      : Error(Errc::SyntaxError, what + " at offset " + std::to_string(offset)),
        offset_(offset) {}

  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

[[noreturn]] inline void fail(Errc code, const std::string& what) { throw Error(code, what); }

inline void require(bool cond, Errc code, const std::string& what) {
  if (!cond) fail(code, what);
}

}  // namespace commalg

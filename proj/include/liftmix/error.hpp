#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace liftmix {

enum class ErrorCode {
  DisconnectedGraph,
  NoSpanningTree,
  TooManyNodes,
  BadSize,
  BadArc,
  DimensionMismatch,
  NotADistribution,
  NotStochastic,
  LocalityViolation,
  ReducibleChain,
  NotStationary,
  EmptyCutWeight,
  InfeasibleLP,
  BadGamma,
  MissingInitMap,
  ZeroMarginalSupport,
  NoConvergence,
  BadChoiceMap,
  EmptyChain,
  LengthMismatch,
  GammaTooLarge,
  MissingReferenceChain,
  NegativeEntry,
  GammaTooLargeForDelta,
  BadLift,
  BadScenario,
  ParseError,
};

inline std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::DisconnectedGraph: return "DisconnectedGraph";
    case ErrorCode::NoSpanningTree: return "NoSpanningTree";
    case ErrorCode::TooManyNodes: return "TooManyNodes";
    case ErrorCode::BadSize: return "BadSize";
    case ErrorCode::BadArc: return "BadArc";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::NotADistribution: return "NotADistribution";
    case ErrorCode::NotStochastic: return "NotStochastic";
    case ErrorCode::LocalityViolation: return "LocalityViolation";
    case ErrorCode::ReducibleChain: return "ReducibleChain";
    case ErrorCode::NotStationary: return "NotStationary";
    case ErrorCode::EmptyCutWeight: return "EmptyCutWeight";
    case ErrorCode::InfeasibleLP: return "InfeasibleLP";
    case ErrorCode::BadGamma: return "BadGamma";
    case ErrorCode::MissingInitMap: return "MissingInitMap";
    case ErrorCode::ZeroMarginalSupport: return "ZeroMarginalSupport";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::BadChoiceMap: return "BadChoiceMap";
    case ErrorCode::EmptyChain: return "EmptyChain";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::GammaTooLarge: return "GammaTooLarge";
    case ErrorCode::MissingReferenceChain: return "MissingReferenceChain";
    case ErrorCode::NegativeEntry: return "NegativeEntry";
    case ErrorCode::GammaTooLargeForDelta: return "GammaTooLargeForDelta";
    case ErrorCode::BadLift: return "BadLift";
    case ErrorCode::BadScenario: return "BadScenario";
    case ErrorCode::ParseError: return "ParseError";
  }
  return "Unknown";
}

/// Every failure raised by the library carries one of the codes above.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace liftmix

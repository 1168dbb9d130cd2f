#pragma once
#include <stdexcept>
#include <string>

namespace avgtd {

// Caller handed us something malformed (bad dimensions, out-of-range value).
struct ParameterError : std::invalid_argument {
  explicit ParameterError(const std::string& what) : std::invalid_argument(what) {}
};

// The input is well-formed but the computation cannot proceed on it
// (reducible chain, rank-deficient features, diverged iterate, ...).
struct StructuralError : std::runtime_error {
  explicit StructuralError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace avgtd

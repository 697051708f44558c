#pragma once

#include <stdexcept>
#include <string>

namespace wsgeo {

enum class ErrorKind {
  Config,        // bad configuration, unknown keys, missing files
  Io,            // filesystem failures
  Format,        // malformed binary/text payloads, version mismatches
  Dimension,     // vector/matrix size mismatches
  Numeric,       // non-finite values, divergence
  SolverFailure, // inner solver did not reach its tolerance
  NotConverged,  // no walk variant reached the goal set
  SizeCap,       // operation requested above its enforced size cap
  Degenerate,    // degenerate sparsity plane (a layer would lose all units)
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, std::string msg) : std::runtime_error(std::move(msg)), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void raise(ErrorKind kind, const std::string& msg) { throw Error(kind, msg); }

}  // namespace wsgeo

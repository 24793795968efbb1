#pragma once

#include <stdexcept>
#include <string>

namespace nvberry {

// error categories map to process exit codes: config -> 2, physics -> 3, numeric -> 4
enum class ErrorCategory { Config, Physics, Numeric };

class Error : public std::runtime_error {
public:
  Error(ErrorCategory cat, const std::string& msg) : std::runtime_error(msg), cat_(cat) {}
  ErrorCategory category() const { return cat_; }

private:
  ErrorCategory cat_;
};

// config / input errors
struct ParseError : Error {
  explicit ParseError(const std::string& msg) : Error(ErrorCategory::Config, msg) {}
};
struct ValidationError : Error {
  explicit ValidationError(const std::string& msg) : Error(ErrorCategory::Config, msg) {}
};

// physics precondition violations
struct BasisMismatch : Error {
  explicit BasisMismatch(const std::string& msg) : Error(ErrorCategory::Physics, msg) {}
};
struct ApproximationInvalid : Error {
  explicit ApproximationInvalid(const std::string& msg) : Error(ErrorCategory::Physics, msg) {}
};
struct NotClosed : Error {
  explicit NotClosed(const std::string& msg) : Error(ErrorCategory::Physics, msg) {}
};
struct NotAdiabatic : Error {
  explicit NotAdiabatic(const std::string& msg) : Error(ErrorCategory::Physics, msg) {}
};
struct SignalDead : Error {
  explicit SignalDead(const std::string& msg) : Error(ErrorCategory::Physics, msg) {}
};
struct NoDrive : Error {
  explicit NoDrive(const std::string& msg) : Error(ErrorCategory::Physics, msg) {}
};
struct GaugeSingularity : Error {
  explicit GaugeSingularity(const std::string& msg) : Error(ErrorCategory::Physics, msg) {}
};

// numeric failures
struct QuadratureFailure : Error {
  explicit QuadratureFailure(const std::string& msg) : Error(ErrorCategory::Numeric, msg) {}
};
struct NormDrift : Error {
  explicit NormDrift(const std::string& msg) : Error(ErrorCategory::Numeric, msg) {}
};
struct NonHermitian : Error {
  explicit NonHermitian(const std::string& msg) : Error(ErrorCategory::Numeric, msg) {}
};
struct PhaseUnwrapFailure : Error {
  explicit PhaseUnwrapFailure(const std::string& msg) : Error(ErrorCategory::Numeric, msg) {}
};

inline int exit_code_for(const Error& e) {
  switch (e.category()) {
    case ErrorCategory::Config: return 2;
    case ErrorCategory::Physics: return 3;
    case ErrorCategory::Numeric: return 4;
  }
  return 1;
}

}  // namespace nvberry

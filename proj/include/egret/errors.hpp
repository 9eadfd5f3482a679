#pragma once

#include <complex>
#include <stdexcept>
#include <string>

namespace egret {

// Error taxonomy shared by every module. Each carries a plain message; the
// CLI maps ConfigurationError/SchemaError to exit code 2.

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ConfigurationError : Error {
  using Error::Error;
};
struct SchemaError : ConfigurationError {
  using ConfigurationError::ConfigurationError;
};
struct OrderError : Error {
  using Error::Error;
};
struct NotInvertibleError : Error {
  using Error::Error;
};
struct UnsupportedEvaluation : Error {
  using Error::Error;
};
struct MetadataMismatch : Error {
  using Error::Error;
};
struct InvalidProjector : Error {
  using Error::Error;
};
struct ConvergenceError : Error {
  using Error::Error;
  std::complex<double> partial_value = 0.0;
};
struct ExtensionRefused : Error {
  using Error::Error;
};
struct WrongOperatorError : Error {
  using Error::Error;
};
struct NotAnalyticError : Error {
  using Error::Error;
};
struct InconsistencyError : Error {
  using Error::Error;
};
struct StepSizeError : Error {
  using Error::Error;
};
struct UnresolvedRenormalization : Error {
  using Error::Error;
};
struct GradingError : Error {
  using Error::Error;
};

}  // namespace egret

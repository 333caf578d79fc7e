//========================================================================================
// kerrshell: error categories shared by the library, the CLI and the bindings
// Licensed under the MIT License, see LICENSE file for details
//========================================================================================
#ifndef KERRSHELL_ERRORS_HPP_
#define KERRSHELL_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace kerrshell {

//! Error categories. Everything except InvalidInput is a numerical failure.
enum class ErrorCode {
  InvalidInput,       //!< parameters outside the supported domain (exit code 2)
  ChartBoundary,      //!< point on rho = 0 where no smooth extension is provided
  NoCircularOrbit,    //!< energy below the ISCO value of the requested branch
  NoSphericalOrbit,   //!< eta_c < 0 at the requested (r, eps)
  MarginalOrbit,      //!< double root, period diverges
  NoConvergence,      //!< Newton or fixed-point iteration failed
  QuadratureFailure,  //!< quadrature did not reach the requested tolerance
  StepUnderflow,      //!< integrator step size fell below the floor
  Divergence,         //!< iteration norm grew beyond the allowed ball
  Indeterminate       //!< value within tolerance of a region boundary
};

const char* error_code_name(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + what), code_(code) {}
  ErrorCode code() const { return code_; }
  //! Process exit code for the CLI: 2 for invalid input, 1 otherwise.
  int exit_code() const { return code_ == ErrorCode::InvalidInput ? 2 : 1; }

 private:
  ErrorCode code_;
};

inline const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidInput: return "invalid input";
    case ErrorCode::ChartBoundary: return "chart boundary";
    case ErrorCode::NoCircularOrbit: return "no circular orbit";
    case ErrorCode::NoSphericalOrbit: return "no spherical orbit here";
    case ErrorCode::MarginalOrbit: return "marginal orbit, period diverges";
    case ErrorCode::NoConvergence: return "no convergence";
    case ErrorCode::QuadratureFailure: return "quadrature failure";
    case ErrorCode::StepUnderflow: return "step size underflow";
    case ErrorCode::Divergence: return "divergence";
    case ErrorCode::Indeterminate: return "boundary, indeterminate";
  }
  return "unknown";
}

}  // namespace kerrshell

#endif  // KERRSHELL_ERRORS_HPP_

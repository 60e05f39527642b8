#pragma once

#include <stdexcept>
#include <string>

namespace deconv {

//! Raised when a numerical procedure cannot produce a trustworthy result
//! (quadrature blow-up, rejection sampler starving, root finder stuck).
//! Configuration problems use std::invalid_argument instead; the CLI maps
//! invalid_argument to exit code 2 and NumericError to exit code 3.
class NumericError : public std::runtime_error {
 public:
  explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace deconv

// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 The hvf authors

#ifndef HVF_ERRORS_HPP
#define HVF_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace hvf {

/**
 * Thrown when a mathematical precondition of an operation does not hold
 * (for example a vanishing coefficient, a degree that falls outside an
 * admissible window, or a resonant parameter pair handed to a routine
 * that requires a nonresonant one).
 *
 * The message always names the failing inequality so that callers, and
 * in particular the command line driver, can surface it verbatim.  The
 * CLI maps this exception to exit code 2; everything else maps to 1.
 */
class precondition_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace hvf

#endif  // HVF_ERRORS_HPP

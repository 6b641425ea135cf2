// Copyright 2026 The zonash Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef ZONASH_COMMON_HPP_
#define ZONASH_COMMON_HPP_

#include <Eigen/Dense>
#include <stdexcept>
#include <string>

namespace zonash {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

// Raised when a caller breaks a documented precondition. The CLI maps this
// to exit code 1.
class ContractViolation : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Raised on file-system failures. The CLI maps this to exit code 2.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Raised when an iteration produces a non-finite intermediate value.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace zonash

#define ZN_REQUIRE(cond, msg)                      \
  do {                                             \
    if (!(cond)) {                                 \
      throw ::zonash::ContractViolation(msg);      \
    }                                              \
  } while (false)

#endif  // ZONASH_COMMON_HPP_

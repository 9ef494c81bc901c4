// Copyright 2026 The Bowser Routing Authors
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

// Typed error hierarchy shared by every module. Data problems that callers
// are expected to inspect (instance or plan violations) are returned as
// values; the exceptions below signal conditions that abort an operation.

#ifndef BOWSER_ERRORS_HPP_
#define BOWSER_ERRORS_HPP_

#include <cstddef>
#include <stdexcept>
#include <string>

namespace bowser {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A caller supplied an argument outside the documented domain.
class InvalidArgumentError : public Error {
 public:
  using Error::Error;
};

// Array shapes disagree with the instance dimensions (A assets, T periods).
class DimensionError : public Error {
 public:
  using Error::Error;
};

// The instance kind does not match the requested model (for example a
// stochastic instance handed to the deterministic builder).
class ModelKindError : public Error {
 public:
  using Error::Error;
};

// The LP relaxation is unbounded below.
class UnboundedError : public Error {
 public:
  using Error::Error;
};

// The simplex method could not make progress within its safeguards.
class NumericalError : public Error {
 public:
  using Error::Error;
};

// Internal consistency was violated (solver output or policy lookup).
class IntegrityError : public Error {
 public:
  using Error::Error;
};

// The dynamic program would exceed the configured state-action budget.
class BudgetExceededError : public Error {
 public:
  BudgetExceededError(const std::string& what, double state_actions)
      : Error(what), state_actions_(state_actions) {}
  double state_actions() const { return state_actions_; }

 private:
  double state_actions_;
};

// Text input could not be parsed; line is 1-based (0 when unknown).
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : Error(line > 0 ? "line " + std::to_string(line) + ": " + what : what),
        line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

// A quantity was reported in an unsupported unit.
class UnitError : public Error {
 public:
  using Error::Error;
};

// A telemetry series contradicts its own invariants.
class DataIntegrityError : public Error {
 public:
  using Error::Error;
};

// Not enough observations to perform a statistical fit.
class InsufficientDataError : public Error {
 public:
  using Error::Error;
};

}  // namespace bowser

#endif  // BOWSER_ERRORS_HPP_

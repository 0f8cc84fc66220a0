// Copyright 2026 The vqgep Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace vqgep {

using Complex = std::complex<double>;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;
using RVector = Eigen::VectorXd;
using RMatrix = Eigen::MatrixXd;

/// Random engine used by every stochastic routine in the library.
using Rng = std::mt19937_64;

/// Base class of all library errors. `category()` feeds the CLI exit code.
class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
    [[nodiscard]] virtual const char *category() const noexcept {
        return "error";
    }
};

/// Bad argument values, shapes or contract violations.
class ValidationError : public Error {
  public:
    using Error::Error;
    [[nodiscard]] const char *category() const noexcept override {
        return "validation";
    }
};

/// Qubit, gate or element index outside its admissible range.
class IndexError : public ValidationError {
  public:
    using ValidationError::ValidationError;
    [[nodiscard]] const char *category() const noexcept override {
        return "index";
    }
};

/// Factorization failures, non-finite values, degenerate overlaps.
class NumericalError : public Error {
  public:
    using Error::Error;
    [[nodiscard]] const char *category() const noexcept override {
        return "numerical";
    }
};

/// Files that cannot be opened, read or written.
class IoError : public Error {
  public:
    using Error::Error;
    [[nodiscard]] const char *category() const noexcept override {
        return "io";
    }
};

/// Malformed text input; the message names the offending line.
class ParseError : public ValidationError {
  public:
    ParseError(const std::string &source, std::size_t line,
               const std::string &what)
        : ValidationError(source + ":" + std::to_string(line) + ": " + what),
          line_(line) {}
    [[nodiscard]] std::size_t line() const noexcept { return line_; }
    [[nodiscard]] const char *category() const noexcept override {
        return "parse";
    }

  private:
    std::size_t line_;
};

/// Optimization direction of a fractional objective.
enum class Sense { Minimize, Maximize };

[[nodiscard]] inline bool is_power_of_two(std::size_t v) noexcept {
    return v != 0 && (v & (v - 1)) == 0;
}

/// ceil(log2(v)) for v >= 1.
[[nodiscard]] inline std::size_t ceil_log2(std::size_t v) noexcept {
    std::size_t n = 0;
    while ((std::size_t{1} << n) < v) {
        ++n;
    }
    return n;
}

} // namespace vqgep

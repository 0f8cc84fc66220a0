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

/**
 * @file
 * Diagnostics: the real-space distance of a state, fidelity against a
 * classical reference, the shot-noise bias study of a single gate update,
 * and trajectory aggregation for multi-trial runs.
 */

#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "vqgep/common.hpp"
#include "vqgep/seqopt.hpp"
#include "vqgep/statevector.hpp"

namespace vqgep {

/// mu2 / (mu1 + mu2) for the eigenvalues mu1 >= mu2 of X^T X, where the
/// rows of X are (Re psi_i, Im psi_i). Zero exactly when the state is real
/// up to a global phase; at most 1/2.
[[nodiscard]] double real_space_distance(const StateVector &state);
[[nodiscard]] double real_space_distance(const CVector &amplitudes);

/// |<ref/|ref| | state>|^2. Throws ValidationError for a zero reference.
[[nodiscard]] double solution_fidelity(const CVector &state,
                                       const CVector &reference);

struct BiasRow {
    std::uint64_t shots;
    double mean;
    double stddev;
    double exact;
    double bias; ///< mean - exact
};

struct BiasStudyOptions {
    std::vector<std::uint64_t> shot_grid;
    std::size_t repeats = 100;
    std::uint64_t seed = 0;
    /// S_B regularization; default per sample when empty.
    std::optional<double> reg_eps;
};

/// Repeatedly estimates the S-pair of gate `d` from finite shots and solves
/// the 4x4 pencil. Repeat r at grid point g draws from its own stream, so
/// rows are reproducible independently of each other.
[[nodiscard]] std::vector<BiasRow>
bias_study(const GEProblem &problem, const CircuitLayout &layout,
           std::span<const GateQuaternion> params, std::size_t d,
           const BiasStudyOptions &options);

/// Least-squares slope of log|y| against log x.
[[nodiscard]] double loglog_slope(std::span<const double> x,
                                  std::span<const double> y);

void write_bias_csv(std::ostream &os, const std::vector<BiasRow> &rows);

/// Extends every series to the longest length by repeating its last value.
/// Empty series stay empty.
[[nodiscard]] std::vector<std::vector<double>>
pad_trajectories(const std::vector<std::vector<double>> &series);

/// Linear-interpolated percentile, p in [0, 100].
[[nodiscard]] double percentile(std::vector<double> values, double p);

struct TrajectoryBand {
    std::vector<double> median;
    std::vector<double> p25;
    std::vector<double> p75;
};

/// Median and quartiles per step over padded trajectories.
[[nodiscard]] TrajectoryBand
trajectory_band(const std::vector<std::vector<double>> &series);

/// splitmix64 of (seed, stream): independent reproducible sub-seeds.
[[nodiscard]] std::uint64_t derive_seed(std::uint64_t seed,
                                        std::uint64_t stream);

} // namespace vqgep

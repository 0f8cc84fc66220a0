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
 * Batch experiments: configuration, problem construction, seeded
 * multi-trial runs and their CSV outputs.
 *
 * Config grammar: one `key = value` per line; `#` starts a comment; blank
 * lines are ignored; each key may appear once. Real values accept a
 * fraction `p/q`. Lists are comma separated. See ExperimentConfig::keys()
 * for every key and its default.
 */

#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "vqgep/analysis.hpp"
#include "vqgep/fem.hpp"
#include "vqgep/gep.hpp"
#include "vqgep/seqopt.hpp"

namespace vqgep {

enum class ExperimentKind { Poisson, Beam, CustomGep, BiasStudy };

struct ExperimentConfig {
    ExperimentKind experiment = ExperimentKind::Poisson;
    AnsatzKind ansatz = AnsatzKind::AlternatingLayered;
    std::size_t layers = 2;
    OptimizerKind optimizer = OptimizerKind::fqs();
    InitStrategy init = InitStrategy::ComplexSpace;
    /// Empty picks the experiment's natural sense (max for Poisson).
    std::optional<Sense> sense;
    /// Empty means exact statevector expectations.
    std::optional<std::uint64_t> shots;
    std::size_t trials = 30;
    std::uint64_t seed = 0;
    double eps_tol = 1e-6;
    std::size_t max_iters = 200;
    std::optional<double> reg_eps;
    SweepOrder order = SweepOrder::Ascending;
    std::size_t workers = 1;
    std::filesystem::path output = "results";

    std::size_t poisson_nodes = 32;

    Mesh2DGrid beam_mesh{18, 4, 1.0, 3.0 / 17.0};
    Material material = Material::steel();
    PlaneModel plane = PlaneModel::Stress;

    std::filesystem::path matrix_a;
    std::filesystem::path matrix_b;
    PaddingRegime pad_regime = PaddingRegime::PositiveMin;
    std::optional<double> pad_eps;

    std::vector<std::uint64_t> bias_shots{100, 1000, 10000};
    std::size_t bias_repeats = 500;
    /// Gate whose S-pair is sampled; the last gate when empty.
    std::optional<std::size_t> bias_gate;

    /// Parses the file and validates the result.
    static ExperimentConfig load(const std::filesystem::path &path);
    static ExperimentConfig parse(std::istream &is, const std::string &source);

    /// Applies one `key = value` pair. `source` and `line` label errors.
    void set(const std::string &key, const std::string &value,
             const std::string &source = "<override>", std::size_t line = 0);
    /// Applies `key=value`.
    void apply_override(const std::string &assignment);
    /// Throws ValidationError naming the offending field.
    void validate() const;
    /// Every key with its current value, in a fixed order.
    [[nodiscard]] std::string echo() const;
    [[nodiscard]] Sense effective_sense() const;
    [[nodiscard]] CircuitLayout layout(std::size_t n_qubits) const;

    [[nodiscard]] static const std::vector<std::string> &keys();
};

/// A ready-to-optimize problem with its classical reference.
struct BuiltProblem {
    std::unique_ptr<GEProblem> problem;
    std::optional<SleProblem> sle;
    std::size_t original_dim = 0;
    EigenPair reference;
    /// K^-1 F for linear systems.
    std::optional<CVector> classical_solution;
};

[[nodiscard]] BuiltProblem build_problem(const ExperimentConfig &config);

/// Reads both matrices in the banded text format and pads them to a power
/// of two with `regime` when needed.
[[nodiscard]] GEProblem load_pencil(const std::filesystem::path &a,
                                    const std::filesystem::path &b,
                                    Sense sense,
                                    PaddingRegime regime =
                                        PaddingRegime::PositiveMin,
                                    std::optional<double> pad_eps =
                                        std::nullopt);

struct TrialResult {
    std::size_t index = 0;
    std::uint64_t seed = 0;
    std::string status = "ok";
    std::string message;
    OptimizeTrace trace;
    std::optional<double> final_objective;
    std::optional<double> relative_error;
    std::optional<double> fidelity;
    std::optional<double> residual; ///< ||K u - F|| for linear systems
    std::optional<CVector> solution;
    double wall_seconds = 0.0;
};

/// One optimization; never throws for numerical failures, which are
/// recorded in `status`.
[[nodiscard]] TrialResult run_trial(const BuiltProblem &built,
                                    const ExperimentConfig &config,
                                    std::size_t index);

struct ExperimentResult {
    std::vector<TrialResult> trials;
    std::vector<BiasRow> bias;
};

/// Runs the configured experiment and writes its files into
/// `config.output`: config.echo, summary.csv, timing.csv and trial_<i>.csv
/// (plus solution_<i>.csv for linear systems and band.csv), or bias.csv
/// for a bias study.
ExperimentResult run_experiment(const ExperimentConfig &config);

/// Per-trial seed.
[[nodiscard]] std::uint64_t trial_seed(std::uint64_t master,
                                       std::size_t trial);

void write_summary_csv(std::ostream &os, const BuiltProblem &built,
                       const std::vector<TrialResult> &trials);

/// Writes the problem's matrices (K and M or F, or A and B) into `dir`.
/// Returns the written paths.
std::vector<std::filesystem::path>
export_pencil(const ExperimentConfig &config, const std::filesystem::path &dir);

/// index,eigenvalue[,frequency_hz] for every eigenpair of the unpadded
/// pencil.
void write_classical_spectrum(std::ostream &os, const ExperimentConfig &config);

} // namespace vqgep

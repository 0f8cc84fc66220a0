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
 * Sequential single-gate optimization of the fractional objective
 * F = tr(A rho) / tr(B rho).
 *
 * With all gates but one fixed, both expectations are quadratic forms in
 * the free gate's unit quaternion q, <H>(q) = q^T S q, where the 4x4 real
 * symmetric S is recovered from ten expectation values. The optimal q is
 * then the extremal eigenvector of the 4x4 pencil (S_A, S_B); restricting q
 * to an axis (NFT, Rotoselect) or to q0 = 0 (Fraxis) gives the 2x2 and 3x3
 * special cases.
 */

#pragma once

#include <array>
#include <functional>
#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "vqgep/common.hpp"
#include "vqgep/gep.hpp"
#include "vqgep/statevector.hpp"

namespace vqgep {

using Matrix4 = Eigen::Matrix4d;
using Vector10 = Eigen::Matrix<double, 10, 1>;
using Matrix10 = Eigen::Matrix<double, 10, 10>;

/// Ten gate settings and the linear map taking their expectation values to
/// the ten free entries of S, ordered (S00, S11, S22, S33, S01, S02, S03,
/// S12, S13, S23).
class ParameterConfiguration {
  public:
    /// Builds the reconstruction map by inverting the 10x10 design matrix.
    /// Throws ValidationError if the points do not determine S.
    explicit ParameterConfiguration(std::array<GateQuaternion, 10> points);

    [[nodiscard]] const std::array<GateQuaternion, 10> &
    points() const noexcept {
        return points_;
    }
    [[nodiscard]] const Matrix10 &reconstruction() const noexcept {
        return reconstruction_;
    }
    /// 2-norm condition number of the design matrix.
    [[nodiscard]] double condition_number() const;

    [[nodiscard]] Matrix4 reconstruct(const Vector10 &values) const;

  private:
    std::array<GateQuaternion, 10> points_;
    Matrix10 design_;
    Matrix10 reconstruction_;
};

/// e_1..e_4 and the six (e_i + e_j)/sqrt2: S_ii is read off directly and
/// S_ij = value((e_i + e_j)/sqrt2) - (S_ii + S_jj)/2.
[[nodiscard]] const ParameterConfiguration &default_configuration();

struct ExpectationPair {
    double a;
    double b;
};

/// <A> and <B> as functions of the free gate's quaternion.
using GateEvaluator = std::function<ExpectationPair(const GateQuaternion &)>;

struct SMatrixPair {
    Matrix4 a;
    Matrix4 b;
};

[[nodiscard]] SMatrixPair build_s_pair(const GateEvaluator &evaluator,
                                       const ParameterConfiguration &config);

/// 1e-8 * max(1, ||S_B||_inf).
[[nodiscard]] double default_regularization(const Matrix4 &s_b);

/// S_B + (eps - beta_min) I when the smallest eigenvalue beta_min < 0,
/// otherwise S_B unchanged.
[[nodiscard]] Matrix4 regularize_sb(const Matrix4 &s_b, double eps);

struct GateUpdate {
    double lambda;
    GateQuaternion q;
};

/// Extremal eigenpair of S_A p = lambda S_B p after regularizing S_B,
/// through the Cholesky reduction S_B = L L^T. Degenerate extremal
/// eigenvalues resolve to the eigenvector closest to `current`; the largest
/// magnitude component of the returned quaternion is positive.
/// Throws NumericalError if S_B cannot be factored.
[[nodiscard]] GateUpdate
solve_gate_gep(const SMatrixPair &pair, Sense sense,
               std::optional<double> eps = std::nullopt,
               const GateQuaternion *current = nullptr);

/// Which subset of SU(2) a single update may move in.
struct OptimizerKind {
    enum class Type { FQS, Fraxis, NFT, Rotoselect };
    Type type = Type::FQS;
    std::array<double, 3> axis{0.0, 1.0, 0.0}; ///< NFT only.

    static OptimizerKind fqs() { return {Type::FQS, {0.0, 1.0, 0.0}}; }
    static OptimizerKind fraxis() { return {Type::Fraxis, {0.0, 1.0, 0.0}}; }
    static OptimizerKind rotoselect() {
        return {Type::Rotoselect, {0.0, 1.0, 0.0}};
    }
    /// Throws ValidationError unless `axis` has unit norm (1e-9).
    static OptimizerKind nft(const std::array<double, 3> &axis);
};

/// FQS: full 4x4 pencil. Fraxis: q = (0, n) over the lower-right 3x3
/// blocks. NFT: q = (cos, sin n) over the 2x2 compression onto
/// span{(1,0,0,0), (0,n)}. Rotoselect: best NFT result over the x, y and z
/// axes.
[[nodiscard]] GateUpdate restrict_update(const SMatrixPair &pair,
                                         const OptimizerKind &kind,
                                         const GateQuaternion &current,
                                         Sense sense,
                                         std::optional<double> eps = std::nullopt);

enum class InitStrategy {
    RealSpace,         ///< axis y, angle uniform in [0, 2pi)
    ComplexSpace,      ///< uniform on the unit 3-sphere
    FraxisRandom,      ///< q0 = 0, axis uniform on the 2-sphere
    NftRandom,         ///< axis y, angle uniform in [0, 2pi)
    DiscreteAxisRandom ///< axis drawn from {x, y, z}, angle uniform
};

[[nodiscard]] std::vector<GateQuaternion>
init_params(InitStrategy strategy, const CircuitLayout &layout, Rng &rng);

/// Source of <A>, <B> evaluations for one gate at a time.
class ExpectationBackend {
  public:
    ExpectationBackend(const GEProblem &problem, StateVector initial);
    virtual ~ExpectationBackend() = default;

    /// Evaluator for gate `d` with the other gates fixed at `params`. The
    /// evaluator borrows the backend and must not outlive it.
    [[nodiscard]] virtual GateEvaluator
    gate_evaluator(const CircuitLayout &layout,
                   std::span<const GateQuaternion> params, std::size_t d) = 0;
    [[nodiscard]] virtual bool is_exact() const noexcept = 0;

    [[nodiscard]] const GEProblem &problem() const noexcept {
        return *problem_;
    }
    [[nodiscard]] const StateVector &initial() const noexcept {
        return initial_;
    }

  protected:
    const GEProblem *problem_;
    StateVector initial_;
};

/// Statevector expectations.
class ExactBackend final : public ExpectationBackend {
  public:
    using ExpectationBackend::ExpectationBackend;
    [[nodiscard]] GateEvaluator
    gate_evaluator(const CircuitLayout &layout,
                   std::span<const GateQuaternion> params,
                   std::size_t d) override;
    [[nodiscard]] bool is_exact() const noexcept override { return true; }
};

/// Finite-shot expectations: `shots` samples per measurement circuit, XBM
/// for banded operators and the inversion test for projectors.
class SampledBackend final : public ExpectationBackend {
  public:
    SampledBackend(const GEProblem &problem, StateVector initial,
                   std::uint64_t shots, Rng rng);
    [[nodiscard]] GateEvaluator
    gate_evaluator(const CircuitLayout &layout,
                   std::span<const GateQuaternion> params,
                   std::size_t d) override;
    [[nodiscard]] bool is_exact() const noexcept override { return false; }
    [[nodiscard]] std::uint64_t shots() const noexcept { return shots_; }

  private:
    std::uint64_t shots_;
    Rng rng_;
};

enum class SweepOrder { Ascending, RandomPermutation };

struct OptimizeOptions {
    OptimizerKind kind = OptimizerKind::fqs();
    double eps_tol = 1e-6;
    std::size_t max_iters = 200;
    /// S_B regularization; default_regularization() when empty.
    std::optional<double> reg_eps;
    SweepOrder order = SweepOrder::Ascending;
    /// Seeds the sweep permutation when order == RandomPermutation.
    std::uint64_t seed = 0;
    /// Record the statevector objective after every update.
    bool track_exact = true;
    /// Optional per-update diagnostic of the exact state.
    std::function<double(const StateVector &)> state_metric;
    const ParameterConfiguration *config = nullptr; ///< default if null
    /// Called after each update with the gate index, its S-pair, the
    /// quaternion before the update and the update itself.
    std::function<void(std::size_t, const SMatrixPair &,
                       const GateQuaternion &, const GateUpdate &)>
        on_update;
};

struct UpdateRecord {
    std::size_t iteration; ///< 1-based sweep number
    std::size_t gate;      ///< 0-based gate index
    double lambda;
    std::optional<double> exact_objective;
    std::optional<double> metric;
    std::size_t evaluations; ///< cumulative expectation-pair evaluations
};

struct OptimizeTrace {
    std::vector<UpdateRecord> records;
    std::vector<GateQuaternion> params;
    bool converged = false;
    std::size_t iterations = 0;
    /// Metric of the initial state (before any update), when requested.
    std::optional<double> initial_metric;
    std::optional<double> initial_objective;

    [[nodiscard]] double final_lambda() const {
        return records.empty() ? 0.0 : records.back().lambda;
    }
};

/// Raised when a non-finite eigenvalue appears; carries the trace so far.
class OptimizationError : public NumericalError {
  public:
    OptimizationError(const std::string &what, OptimizeTrace trace)
        : NumericalError(what), trace_(std::move(trace)) {}
    [[nodiscard]] const OptimizeTrace &trace() const noexcept {
        return trace_;
    }

  private:
    OptimizeTrace trace_;
};

/// Coordinate descent over all gates. After every update
/// eps = |F_curr - F_prev| / |F_prev| with F_curr the new eigenvalue; the
/// loop stops once a completed sweep ends with eps < eps_tol, or after
/// max_iters sweeps.
[[nodiscard]] OptimizeTrace
sequential_optimize(ExpectationBackend &backend, const CircuitLayout &layout,
                    std::vector<GateQuaternion> params0,
                    const OptimizeOptions &options);

/// CSV: iteration,gate_index,lambda,exact_objective,distance_metric.
void write_trace_csv(std::ostream &os, const OptimizeTrace &trace);

} // namespace vqgep

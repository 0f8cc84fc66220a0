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
 * Hermitian operators in banded storage, exact and finite-shot expectation
 * values, extended Bell measurement (XBM) grouping and fidelity estimation.
 */

#pragma once

#include <functional>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "vqgep/common.hpp"
#include "vqgep/statevector.hpp"

namespace vqgep {

/// Hermitian matrix stored by its upper diagonals. Diagonal `k` holds
/// A(i, i+k) for i in [0, dim-k); the lower triangle follows from A = A^H.
/// A dense matrix is simply the case bandwidth = dim-1.
class HermitianOperator {
  public:
    static constexpr double kHermitianTolerance = 1e-12;

    HermitianOperator() = default;
    /// Throws ValidationError when a diagonal has the wrong length or the
    /// main diagonal is not real.
    HermitianOperator(std::size_t dim, std::map<std::size_t, CVector> upper);

    /// Throws ValidationError unless `m` is square and Hermitian (1e-12
    /// relative). Entries with magnitude <= `drop_tol` are treated as zero.
    static HermitianOperator from_dense(const CMatrix &m,
                                        double drop_tol = 0.0);
    static HermitianOperator from_dense(const RMatrix &m,
                                        double drop_tol = 0.0);
    static HermitianOperator identity(std::size_t dim);
    static HermitianOperator diagonal(const RVector &d);

    [[nodiscard]] std::size_t dim() const noexcept { return dim_; }
    /// Largest stored offset k with a nonzero entry.
    [[nodiscard]] std::size_t bandwidth() const noexcept;
    [[nodiscard]] const std::map<std::size_t, CVector> &
    upper_diagonals() const noexcept {
        return diags_;
    }
    [[nodiscard]] Complex entry(std::size_t i, std::size_t j) const;
    [[nodiscard]] bool is_real(double tol = 0.0) const;

    [[nodiscard]] CVector apply(const CVector &x) const;
    [[nodiscard]] CMatrix to_dense() const;
    /// Real part of the dense matrix (exact for real operators).
    [[nodiscard]] RMatrix to_dense_real() const;

  private:
    std::size_t dim_ = 0;
    std::map<std::size_t, CVector> diags_;
};

/// <psi|op|psi>; the imaginary rounding residue is discarded.
[[nodiscard]] double expectation_exact(const HermitianOperator &op,
                                       const StateVector &state);

/// <op> on the circuit output with gate d replaced by `q`.
[[nodiscard]] double
expectation_with_gate(const CircuitLayout &layout,
                      std::span<const GateQuaternion> params, std::size_t d,
                      const GateQuaternion &q, const HermitianOperator &op,
                      const StateVector &initial);

/// Unitary U_F with U_F|0...0> = |f>, applied in reverse for the inversion
/// test.
class StatePreparer {
  public:
    using InverseAction = std::function<void(CVector &)>;

    StatePreparer(StateVector target, InverseAction inverse);

    /// U_F = H^{(x)n} (X (x) I^{(x)(n-1)}) preparing the step state.
    static StatePreparer step(std::size_t n_qubits);
    /// Phase-adjusted Householder reflection taking |0...0> to `f`.
    static StatePreparer householder(const StateVector &f);

    [[nodiscard]] const StateVector &target() const noexcept {
        return target_;
    }
    /// U_F^dagger |psi>.
    [[nodiscard]] CVector unprepare(const StateVector &psi) const;

  private:
    StateVector target_;
    InverseAction inverse_;
};

/// The rank-1 operator |f><f| with its preparation routine.
class Rank1Projector {
  public:
    /// Uses StatePreparer::householder(f).
    explicit Rank1Projector(const StateVector &f);
    explicit Rank1Projector(StatePreparer preparer);

    [[nodiscard]] const StateVector &f() const noexcept {
        return preparer_.target();
    }
    [[nodiscard]] const StatePreparer &preparer() const noexcept {
        return preparer_;
    }
    [[nodiscard]] std::size_t dim() const noexcept { return f().dim(); }

  private:
    StatePreparer preparer_;
};

/// |<f|psi>|^2.
[[nodiscard]] double fidelity_exact(const Rank1Projector &proj,
                                    const StateVector &state);

/// Shots per individual measurement circuit and the seed of the stream the
/// caller derives its Rng from.
struct ShotPlan {
    std::uint64_t shots = 1;
    std::uint64_t seed = 0;

    /// Throws ValidationError when shots == 0.
    void validate() const;
};

/// Inversion test: applies U_F^dagger, samples `shots` basis outcomes and
/// returns the frequency of |0...0>.
[[nodiscard]] double fidelity_sampled(const StatePreparer &preparer,
                                      const StateVector &state,
                                      std::uint64_t shots, Rng &rng);

enum class XbmPart { Re, Im };

/// One simultaneous-measurement circuit of the XBM scheme: rotate the pairs
/// {x, x^offset} into the (|x> +- |y>)/sqrt2 or (|x> +- i|y>)/sqrt2 basis,
/// then read the basis outcome distribution weighted by `coefficients`.
struct XbmGroup {
    std::size_t offset;
    XbmPart part;
    RVector coefficients;
};

struct XbmGrouping {
    /// Weights of the computational-basis group (the diagonal of the
    /// operator). Absent when the diagonal vanishes.
    std::optional<RVector> diagonal;
    std::vector<XbmGroup> groups;

    [[nodiscard]] std::size_t circuit_count() const noexcept {
        return groups.size() + (diagonal ? 1 : 0);
    }
    /// Sorted distinct offsets appearing in `groups`.
    [[nodiscard]] std::vector<std::size_t> offsets() const;
};

/// Groups for the offsets {i xor j | A_ij != 0} \ {0}. All-zero coefficient
/// tables (e.g. the Im parts of a real operator) are omitted.
[[nodiscard]] XbmGrouping xbm_groups(const HermitianOperator &op);

/// Outcome distribution after the measurement rotation of (offset, part).
/// offset == 0 means the computational basis.
[[nodiscard]] RVector xbm_probabilities(const StateVector &state,
                                        std::size_t offset, XbmPart part);

/// Infinite-shot recombination of the grouping; equals expectation_exact.
[[nodiscard]] double xbm_expectation(const XbmGrouping &grouping,
                                     const StateVector &state);

/// Multinomial counts of `shots` draws from `probs` (conditional binomial
/// method; the cost does not grow with `shots`).
[[nodiscard]] std::vector<std::uint64_t>
sample_counts(const RVector &probs, std::uint64_t shots, Rng &rng);

/// Finite-shot estimate with `shots` samples per measurement circuit.
[[nodiscard]] double expectation_sampled(const XbmGrouping &grouping,
                                         const StateVector &state,
                                         std::uint64_t shots, Rng &rng);
[[nodiscard]] double expectation_sampled(const HermitianOperator &op,
                                         const StateVector &state,
                                         std::uint64_t shots, Rng &rng);

/// Either a banded Hermitian operator (measured by XBM) or a rank-1
/// projector (measured by the inversion test).
class Observable {
  public:
    Observable(HermitianOperator op);  // NOLINT(google-explicit-constructor)
    Observable(Rank1Projector proj);   // NOLINT(google-explicit-constructor)

    [[nodiscard]] std::size_t dim() const noexcept;
    [[nodiscard]] bool is_projector() const noexcept {
        return std::holds_alternative<Rank1Projector>(value_);
    }
    [[nodiscard]] const HermitianOperator *as_operator() const noexcept {
        return std::get_if<HermitianOperator>(&value_);
    }
    [[nodiscard]] const Rank1Projector *as_projector() const noexcept {
        return std::get_if<Rank1Projector>(&value_);
    }
    /// Empty for projectors.
    [[nodiscard]] const XbmGrouping &grouping() const noexcept {
        return grouping_;
    }

    [[nodiscard]] double expectation(const StateVector &state) const;
    [[nodiscard]] double expectation(const StateVector &state,
                                     std::uint64_t shots, Rng &rng) const;
    /// Number of distinct measurement circuits per estimate.
    [[nodiscard]] std::size_t circuit_count() const noexcept;
    [[nodiscard]] CMatrix to_dense() const;
    /// Banded form (a projector becomes a dense band).
    [[nodiscard]] HermitianOperator to_operator() const;

  private:
    std::variant<HermitianOperator, Rank1Projector> value_;
    XbmGrouping grouping_;
};

/// Plain-text banded format:
///   header:  <dim> <offset_1> ... <offset_m>
///   then one line per offset with `dim` entries "re,im"; entry i holds
///   A(i, i+offset) and out-of-range positions are 0,0. Lines starting with
///   '#' are comments. Export writes offsets >= 0 with 17 significant
///   digits, so export -> import -> export is byte-identical.
void write_banded(std::ostream &os, const HermitianOperator &op);
void write_banded_file(const std::string &path, const HermitianOperator &op);
/// Throws ParseError naming the line on malformed input and
/// ValidationError for non-Hermitian content.
[[nodiscard]] HermitianOperator read_banded(std::istream &is,
                                            const std::string &source);
[[nodiscard]] HermitianOperator read_banded_file(const std::string &path);

} // namespace vqgep

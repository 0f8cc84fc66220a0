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
 * Generalized eigenvalue problems A v = lambda B v: problem types, the
 * generalized Rayleigh quotient, power-of-two enlargement, the reduction of
 * a linear system K u = f to a rank-1 pencil, and a dense classical solver
 * used as the reference everywhere.
 */

#pragma once

#include <optional>
#include <vector>

#include "vqgep/common.hpp"
#include "vqgep/operators.hpp"

namespace vqgep {

/// Pencil (A, B) with B positive definite, dimension a power of two.
class GEProblem {
  public:
    /// Largest dimension for which B is checked with a dense factorization.
    static constexpr std::size_t kDenseCheckLimit = 1024;

    /// Throws ValidationError on mismatched or non power-of-two dimensions,
    /// or when B is not positive definite (checked for dim <= 1024).
    GEProblem(Observable a, HermitianOperator b, Sense sense);

    [[nodiscard]] const Observable &a() const noexcept { return a_; }
    [[nodiscard]] const HermitianOperator &b() const noexcept { return b_; }
    [[nodiscard]] const Observable &b_observable() const noexcept {
        return b_obs_;
    }
    [[nodiscard]] Sense sense() const noexcept { return sense_; }
    [[nodiscard]] std::size_t dim() const noexcept { return b_.dim(); }
    [[nodiscard]] std::size_t n_qubits() const noexcept {
        return ceil_log2(dim());
    }

    /// tr(A rho) / tr(B rho) for rho = |psi><psi|.
    [[nodiscard]] double objective(const StateVector &psi) const;

  private:
    Observable a_;
    HermitianOperator b_;
    Observable b_obs_;
    Sense sense_;
};

/// K u = f with K positive definite and ||f|| = 1.
class SleProblem {
  public:
    /// Throws ValidationError unless ||f|| = 1 within 1e-10 and dimensions
    /// agree. The default preparer is the Householder routine.
    SleProblem(HermitianOperator k, CVector f);
    SleProblem(HermitianOperator k, StatePreparer preparer);

    [[nodiscard]] const HermitianOperator &k() const noexcept { return k_; }
    [[nodiscard]] const CVector &f() const noexcept { return f_; }
    [[nodiscard]] const std::optional<StatePreparer> &
    preparer() const noexcept {
        return preparer_;
    }

  private:
    HermitianOperator k_;
    CVector f_;
    std::optional<StatePreparer> preparer_;
};

/// (w^H A w) / (w^H B w). Throws ValidationError for w = 0.
[[nodiscard]] double rayleigh_quotient(const CMatrix &a, const CMatrix &b,
                                       const CVector &w);
[[nodiscard]] double rayleigh_quotient(const HermitianOperator &a,
                                       const HermitianOperator &b,
                                       const CVector &w);

/// Which extremal eigenvalue survives the enlargement.
enum class PaddingRegime {
    ZeroBlock,   ///< lambda_min < 0 or lambda_max > 0: A (+) 0, B (+) I.
    PositiveMin, ///< lambda_min > 0: A (+) I, B (+) eps I with eps > 0.
    NegativeMax, ///< lambda_max < 0: A (+) -I, B (+) |eps| I with eps < 0.
};

struct PaddedPencil {
    HermitianOperator a;
    HermitianOperator b;
    std::size_t original_dim;
    /// eps used for the B block (1 for ZeroBlock).
    double pad_eps;
};

/// eps = +-0.5 * beta_lo / a_hi, where a_hi bounds |lambda(A)| (max
/// absolute row sum) and beta_lo is a positive lower bound on lambda_min(B)
/// (Gershgorin, or a dense eigensolve when Gershgorin is not positive).
/// Then 1/|eps| >= 2 max|lambda| and the padding eigenvalue 1/eps stays
/// beyond the original spectrum.
[[nodiscard]] double default_pad_eps(const HermitianOperator &a,
                                     const HermitianOperator &b,
                                     PaddingRegime regime);

/// Enlarges an N x N pencil to 2^ceil(log2 N). Returns the inputs unchanged
/// when N is already a power of two. Throws ValidationError when the sign
/// of `pad_eps` contradicts the regime.
[[nodiscard]] PaddedPencil
pad_to_power_of_two(const HermitianOperator &a, const HermitianOperator &b,
                    PaddingRegime regime,
                    std::optional<double> pad_eps = std::nullopt);

/// Zero-extends `v` to length 2^ceil(log2 |v|).
[[nodiscard]] CVector pad_vector(const CVector &v);

/// A = |f><f|, B = K, maximize. The single nonzero eigenvalue is f^H K^-1 f.
[[nodiscard]] GEProblem sle_to_gep(const SleProblem &sle);

/// u = lambda v / (f^H v). Throws NumericalError when |f^H v| <= 1e-12.
[[nodiscard]] CVector recover_sle_solution(const SleProblem &sle,
                                           double lambda_hat,
                                           const CVector &v_hat);

struct EigenPair {
    double value;
    CVector vector; ///< B-orthonormal: v^H B v = 1.
};

/// All generalized eigenpairs in ascending order. Throws ValidationError if
/// B is not positive definite or dim > 1024.
[[nodiscard]] std::vector<EigenPair>
classical_reference_solve(const CMatrix &a, const CMatrix &b);
[[nodiscard]] std::vector<EigenPair>
classical_reference_solve(const GEProblem &problem);

/// Extremal pair for the problem's sense.
[[nodiscard]] EigenPair classical_extremal(const GEProblem &problem);

} // namespace vqgep

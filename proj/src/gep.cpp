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

#include "vqgep/gep.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

namespace vqgep {

namespace {

void check_positive_definite(const CMatrix &b, const char *what) {
    Eigen::LLT<CMatrix> llt(b);
    if (llt.info() != Eigen::Success) {
        throw ValidationError(std::string(what) +
                              " is not positive definite");
    }
}

double gershgorin_abs_bound(const HermitianOperator &op) {
    RVector rows = RVector::Zero(static_cast<Eigen::Index>(op.dim()));
    for (const auto &[k, d] : op.upper_diagonals()) {
        for (Eigen::Index i = 0; i < d.size(); ++i) {
            const double v = std::abs(d[i]);
            rows[i] += v;
            if (k != 0) {
                rows[i + static_cast<Eigen::Index>(k)] += v;
            }
        }
    }
    return rows.maxCoeff();
}

double gershgorin_lower_bound(const HermitianOperator &op) {
    const auto n = static_cast<Eigen::Index>(op.dim());
    RVector centre = RVector::Zero(n);
    RVector radius = RVector::Zero(n);
    for (const auto &[k, d] : op.upper_diagonals()) {
        for (Eigen::Index i = 0; i < d.size(); ++i) {
            if (k == 0) {
                centre[i] = d[i].real();
                continue;
            }
            const double v = std::abs(d[i]);
            radius[i] += v;
            radius[i + static_cast<Eigen::Index>(k)] += v;
        }
    }
    return (centre - radius).minCoeff();
}

} // namespace

GEProblem::GEProblem(Observable a, HermitianOperator b, Sense sense)
    : a_(std::move(a)), b_(std::move(b)), b_obs_(b_), sense_(sense) {
    if (a_.dim() != b_.dim()) {
        throw ValidationError("pencil matrices have different dimensions");
    }
    if (!is_power_of_two(b_.dim()) || b_.dim() < 2) {
        throw ValidationError("pencil dimension must be a power of two >= 2; "
                              "pad it first");
    }
    if (b_.dim() <= kDenseCheckLimit) {
        check_positive_definite(b_.to_dense(), "B");
    }
}

double GEProblem::objective(const StateVector &psi) const {
    return a_.expectation(psi) / b_obs_.expectation(psi);
}

SleProblem::SleProblem(HermitianOperator k, CVector f)
    : k_(std::move(k)), f_(std::move(f)) {
    if (static_cast<std::size_t>(f_.size()) != k_.dim()) {
        throw ValidationError("K and f have different dimensions");
    }
    if (std::abs(f_.norm() - 1.0) > 1e-10) {
        throw ValidationError("right-hand side must be normalized, ||f|| = " +
                              std::to_string(f_.norm()));
    }
}

SleProblem::SleProblem(HermitianOperator k, StatePreparer preparer)
    : SleProblem(std::move(k), preparer.target().amplitudes()) {
    preparer_.emplace(std::move(preparer));
}

double rayleigh_quotient(const CMatrix &a, const CMatrix &b,
                         const CVector &w) {
    if (a.rows() != w.size() || b.rows() != w.size()) {
        throw ValidationError("Rayleigh quotient dimension mismatch");
    }
    if (w.squaredNorm() == 0.0) {
        throw ValidationError("Rayleigh quotient of the zero vector");
    }
    return w.dot(a * w).real() / w.dot(b * w).real();
}

double rayleigh_quotient(const HermitianOperator &a,
                         const HermitianOperator &b, const CVector &w) {
    if (w.squaredNorm() == 0.0) {
        throw ValidationError("Rayleigh quotient of the zero vector");
    }
    return w.dot(a.apply(w)).real() / w.dot(b.apply(w)).real();
}

double default_pad_eps(const HermitianOperator &a, const HermitianOperator &b,
                       PaddingRegime regime) {
    if (regime == PaddingRegime::ZeroBlock) {
        return 1.0;
    }
    double beta_lo = gershgorin_lower_bound(b);
    if (!(beta_lo > 0.0)) {
        if (b.dim() > GEProblem::kDenseCheckLimit) {
            throw ValidationError("cannot bound lambda_min(B) for padding; "
                                  "pass pad_eps explicitly");
        }
        Eigen::SelfAdjointEigenSolver<CMatrix> es(b.to_dense(),
                                                  Eigen::EigenvaluesOnly);
        beta_lo = es.eigenvalues().minCoeff();
        if (!(beta_lo > 0.0)) {
            throw ValidationError("B is not positive definite");
        }
    }
    const double a_hi = std::max(gershgorin_abs_bound(a), 1e-300);
    const double eps = 0.5 * beta_lo / a_hi;
    return regime == PaddingRegime::PositiveMin ? eps : -eps;
}

PaddedPencil pad_to_power_of_two(const HermitianOperator &a,
                                 const HermitianOperator &b,
                                 PaddingRegime regime,
                                 std::optional<double> pad_eps) {
    if (a.dim() != b.dim()) {
        throw ValidationError("pencil matrices have different dimensions");
    }
    const std::size_t n = a.dim();
    double eps = pad_eps.value_or(regime == PaddingRegime::ZeroBlock
                                      ? 1.0
                                      : default_pad_eps(a, b, regime));
    if (regime == PaddingRegime::PositiveMin && !(eps > 0.0)) {
        throw ValidationError("padding for a positive minimum needs eps > 0");
    }
    if (regime == PaddingRegime::NegativeMax && !(eps < 0.0)) {
        throw ValidationError("padding for a negative maximum needs eps < 0");
    }
    if (regime == PaddingRegime::ZeroBlock) {
        eps = 1.0;
    }
    const std::size_t target = std::size_t{1} << ceil_log2(std::max<std::size_t>(n, 2));
    if (target == n) {
        return {a, b, n, eps};
    }
    auto extend = [&](const HermitianOperator &op, double fill) {
        std::map<std::size_t, CVector> diags;
        for (const auto &[k, d] : op.upper_diagonals()) {
            CVector e = CVector::Zero(static_cast<Eigen::Index>(target - k));
            e.head(d.size()) = d;
            diags.emplace(k, std::move(e));
        }
        auto &main = diags
                         .try_emplace(0, CVector::Zero(
                                             static_cast<Eigen::Index>(target)))
                         .first->second;
        for (std::size_t i = n; i < target; ++i) {
            main[static_cast<Eigen::Index>(i)] = fill;
        }
        return HermitianOperator(target, std::move(diags));
    };
    if (regime == PaddingRegime::ZeroBlock) {
        return {extend(a, 0.0), extend(b, 1.0), n, eps};
    }
    // Same padded eigenvalue 1/eps either way; flipping both signs for eps < 0
    // keeps B positive definite.
    const double sign = eps > 0.0 ? 1.0 : -1.0;
    return {extend(a, sign), extend(b, sign * eps), n, eps};
}

CVector pad_vector(const CVector &v) {
    const auto n = static_cast<std::size_t>(v.size());
    const std::size_t target = std::size_t{1} << ceil_log2(std::max<std::size_t>(n, 2));
    CVector out = CVector::Zero(static_cast<Eigen::Index>(target));
    out.head(v.size()) = v;
    return out;
}

GEProblem sle_to_gep(const SleProblem &sle) {
    StateVector f = StateVector::normalized(sle.f());
    Rank1Projector proj = sle.preparer() ? Rank1Projector(*sle.preparer())
                                         : Rank1Projector(f);
    return GEProblem(Observable(std::move(proj)), sle.k(), Sense::Maximize);
}

CVector recover_sle_solution(const SleProblem &sle, double lambda_hat,
                             const CVector &v_hat) {
    if (v_hat.size() != sle.f().size()) {
        throw ValidationError("eigenvector dimension does not match f");
    }
    if (lambda_hat == 0.0) {
        throw NumericalError("recovery needs the nonzero eigenvalue");
    }
    const Complex overlap = sle.f().dot(v_hat);
    if (std::abs(overlap) <= 1e-12) {
        throw NumericalError("|f^H v| is numerically zero; v is not the "
                             "eigenvector of the nonzero eigenvalue");
    }
    return (lambda_hat / overlap) * v_hat;
}

std::vector<EigenPair> classical_reference_solve(const CMatrix &a,
                                                 const CMatrix &b) {
    if (a.rows() != a.cols() || b.rows() != b.cols() ||
        a.rows() != b.rows()) {
        throw ValidationError("pencil matrices must be square and equal size");
    }
    if (static_cast<std::size_t>(a.rows()) > GEProblem::kDenseCheckLimit) {
        throw ValidationError("dense reference solve limited to dim <= 1024");
    }
    // Explicit Cholesky reduction: Eigen's generalized solver mishandles
    // complex pencils.
    Eigen::LLT<CMatrix> llt(b);
    if (llt.info() != Eigen::Success) {
        throw ValidationError("B is not positive definite");
    }
    const CMatrix l = llt.matrixL();
    CMatrix c = l.triangularView<Eigen::Lower>().solve(a);
    c = l.triangularView<Eigen::Lower>().solve(c.adjoint()).adjoint();
    c = (0.5 * (c + c.adjoint())).eval();
    Eigen::SelfAdjointEigenSolver<CMatrix> es(c);
    if (es.info() != Eigen::Success) {
        throw NumericalError("generalized eigensolver failed");
    }
    const CMatrix vecs =
        l.adjoint().triangularView<Eigen::Upper>().solve(es.eigenvectors());
    std::vector<EigenPair> out;
    out.reserve(static_cast<std::size_t>(a.rows()));
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        out.push_back({es.eigenvalues()[i], vecs.col(i)});
    }
    return out;
}

std::vector<EigenPair> classical_reference_solve(const GEProblem &problem) {
    return classical_reference_solve(problem.a().to_dense(),
                                     problem.b().to_dense());
}

EigenPair classical_extremal(const GEProblem &problem) {
    auto pairs = classical_reference_solve(problem);
    return problem.sense() == Sense::Minimize ? pairs.front() : pairs.back();
}

} // namespace vqgep

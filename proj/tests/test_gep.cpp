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

#include <doctest.h>

#include <cmath>

#include <Eigen/Eigenvalues>

#include "support.hpp"
#include "vqgep/gep.hpp"

using namespace vqgep;
using namespace vqgep::testing;

namespace {

HermitianOperator op(const CMatrix &m) { return HermitianOperator::from_dense(m); }

// Generalized eigenvalues through the real symmetric (LLT) route on the
// 2n-dimensional realification; independent of the library's complex path.
Eigen::VectorXd realified_eigenvalues(const CMatrix &a, const CMatrix &b) {
    const Eigen::Index n = a.rows();
    auto real_form = [n](const CMatrix &m) {
        RMatrix r(2 * n, 2 * n);
        r << m.real(), -m.imag(), m.imag(), m.real();
        return r;
    };
    Eigen::GeneralizedSelfAdjointEigenSolver<RMatrix> es(real_form(a),
                                                         real_form(b));
    Eigen::VectorXd all = es.eigenvalues();
    Eigen::VectorXd out(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        out[i] = all[2 * i]; // each eigenvalue appears twice
    }
    return out;
}

} // namespace

TEST_SUITE("gep") {

TEST_CASE("dense oracle residuals and ordering") {
    Rng rng(20);
    for (int t = 0; t < 5; ++t) {
        const CMatrix a = random_hermitian(8, rng);
        const CMatrix b = random_pd(8, rng);
        const auto pairs = classical_reference_solve(a, b);
        REQUIRE(pairs.size() == 8);
        const Eigen::VectorXd expect = realified_eigenvalues(a, b);
        for (std::size_t i = 0; i < pairs.size(); ++i) {
            const auto &p = pairs[i];
            CHECK((a * p.vector - p.value * b * p.vector).norm() < 1e-10);
            CHECK(std::abs((p.vector.adjoint() * b * p.vector)(0, 0) - 1.0) <
                  1e-10);
            CHECK(p.value == doctest::Approx(expect[static_cast<Eigen::Index>(i)])
                                 .epsilon(1e-10));
            if (i > 0) {
                CHECK(pairs[i - 1].value <= p.value);
            }
        }
    }
}

TEST_CASE("dense oracle on simple pencils") {
    CMatrix a = CMatrix::Zero(2, 2);
    a(0, 0) = 1.0;
    a(1, 1) = 2.0;
    const auto pairs = classical_reference_solve(a, CMatrix::Identity(2, 2));
    CHECK(pairs[0].value == doctest::Approx(1.0));
    CHECK(pairs[1].value == doctest::Approx(2.0));
    CMatrix bad = CMatrix::Identity(2, 2);
    bad(1, 1) = -1.0;
    CHECK_THROWS_AS((void)classical_reference_solve(a, bad), ValidationError);
}

TEST_CASE("problem validation") {
    Rng rng(21);
    CHECK_THROWS_AS(GEProblem(op(random_hermitian(3, rng)),
                              op(random_pd(3, rng)), Sense::Minimize),
                    ValidationError);
    CHECK_THROWS_AS(GEProblem(op(random_hermitian(4, rng)),
                              op(random_pd(2, rng)), Sense::Minimize),
                    ValidationError);
    CHECK_THROWS_AS(GEProblem(op(random_hermitian(4, rng)),
                              op(random_hermitian(4, rng) -
                                 10.0 * CMatrix::Identity(4, 4)),
                              Sense::Minimize),
                    ValidationError);
    const GEProblem p(op(random_hermitian(4, rng)), op(random_pd(4, rng)),
                      Sense::Maximize);
    CHECK(p.n_qubits() == 2);
}

TEST_CASE("Rayleigh quotient stays between the extremal eigenvalues") {
    Rng rng(22);
    for (Eigen::Index n : {4, 8}) {
        const CMatrix a = random_hermitian(n, rng);
        const CMatrix b = random_pd(n, rng);
        const auto pairs = classical_reference_solve(a, b);
        for (int t = 0; t < 200; ++t) {
            const double r = rayleigh_quotient(a, b, random_vector(n, rng));
            CHECK(r >= pairs.front().value - 1e-9);
            CHECK(r <= pairs.back().value + 1e-9);
        }
        CHECK(rayleigh_quotient(op(a), op(b), pairs.front().vector) ==
              doctest::Approx(pairs.front().value).epsilon(1e-10));
    }
    CHECK_THROWS_AS((void)rayleigh_quotient(CMatrix::Identity(2, 2),
                                            CMatrix::Identity(2, 2),
                                            CVector::Zero(2)),
                    ValidationError);
}

TEST_CASE("2x2 linear system by hand") {
    RMatrix k(2, 2);
    k << 2, -1, -1, 2;
    CVector f(2);
    f << 1.0, 0.0;
    const SleProblem sle(op(k.cast<Complex>()), f);
    const auto problem = sle_to_gep(sle);
    CHECK(problem.sense() == Sense::Maximize);
    const auto top = classical_extremal(problem);
    CHECK(top.value == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
    CVector v(2);
    v << 2.0 / std::sqrt(5.0), 1.0 / std::sqrt(5.0);
    const CVector u = recover_sle_solution(sle, 2.0 / 3.0, v);
    CHECK(u[0].real() == doctest::Approx(2.0 / 3.0));
    CHECK(u[1].real() == doctest::Approx(1.0 / 3.0));
    const CVector u2 =
        recover_sle_solution(sle, 2.0 / 3.0, v * std::polar(1.0, 0.7));
    CHECK((u2 - u).norm() < 1e-14);
    CVector orth(2);
    orth << 0.0, 1.0;
    CHECK_THROWS_AS((void)recover_sle_solution(sle, 1.0, orth), NumericalError);
}

TEST_CASE("identity system returns the right-hand side") {
    Rng rng(23);
    const CVector f = random_vector(4, rng).normalized();
    const SleProblem sle(HermitianOperator::identity(4), f);
    const auto top = classical_extremal(sle_to_gep(sle));
    CHECK((recover_sle_solution(sle, top.value, top.vector) - f).norm() < 1e-12);
}

TEST_CASE("linear-system pencils have rank one and recover K^-1 f") {
    Rng rng(24);
    for (Eigen::Index n : {2, 4, 8, 16, 32, 64}) {
        const CMatrix k = random_pd(n, rng);
        const CVector f = random_vector(n, rng).normalized();
        const SleProblem sle(op(k), f);
        const auto pairs = classical_reference_solve(sle_to_gep(sle));
        int nonzero = 0;
        for (const auto &p : pairs) {
            nonzero += std::abs(p.value) > 1e-10 ? 1 : 0;
        }
        CHECK(nonzero == 1);
        const CVector u =
            recover_sle_solution(sle, pairs.back().value, pairs.back().vector);
        CHECK((k * u - f).norm() < 1e-9);
    }
    CHECK_THROWS_AS(SleProblem(HermitianOperator::identity(2),
                               CVector::Ones(2)),
                    ValidationError);
}

TEST_CASE("padding preserves the targeted extremal eigenvalue") {
    Rng rng(25);
    for (Eigen::Index n : {3, 5, 6, 7}) {
        const CMatrix b = random_pd(n, rng);
        // Indefinite A, both positive-definite and negative-definite A.
        const CMatrix indef = random_hermitian(n, rng);
        const CMatrix pos = random_pd(n, rng);
        const CMatrix neg = -random_pd(n, rng);
        const auto ref = [&](const CMatrix &a) {
            return classical_reference_solve(a, b);
        };
        const auto check = [&](const CMatrix &a, PaddingRegime regime,
                               bool min_side) {
            const auto padded = pad_to_power_of_two(op(a), op(b), regime);
            CHECK(is_power_of_two(padded.a.dim()));
            CHECK(padded.original_dim == static_cast<std::size_t>(n));
            const auto before = ref(a);
            const auto after = classical_reference_solve(padded.a.to_dense(),
                                                         padded.b.to_dense());
            if (min_side) {
                CHECK(after.front().value ==
                      doctest::Approx(before.front().value).epsilon(1e-12));
            } else {
                CHECK(after.back().value ==
                      doctest::Approx(before.back().value).epsilon(1e-12));
            }
        };
        check(indef, PaddingRegime::ZeroBlock, true);
        check(indef, PaddingRegime::ZeroBlock, false);
        check(pos, PaddingRegime::PositiveMin, true);
        check(neg, PaddingRegime::NegativeMax, false);
    }
}

TEST_CASE("padding arguments") {
    Rng rng(26);
    const auto a = op(random_pd(3, rng));
    const auto b = op(random_pd(3, rng));
    CHECK_THROWS_AS((void)pad_to_power_of_two(a, b, PaddingRegime::PositiveMin,
                                              -0.1),
                    ValidationError);
    CHECK_THROWS_AS((void)pad_to_power_of_two(a, b, PaddingRegime::NegativeMax,
                                              0.1),
                    ValidationError);
    const auto same = pad_to_power_of_two(op(random_pd(4, rng)),
                                          op(random_pd(4, rng)),
                                          PaddingRegime::PositiveMin);
    CHECK(same.a.dim() == 4);
    CHECK(default_pad_eps(a, b, PaddingRegime::PositiveMin) > 0.0);
    CHECK(default_pad_eps(a, b, PaddingRegime::NegativeMax) < 0.0);
    CHECK(pad_vector(CVector::Ones(5)).size() == 8);
}

} // TEST_SUITE

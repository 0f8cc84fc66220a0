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
#include <numbers>

#include "support.hpp"
#include "vqgep/statevector.hpp"

using namespace vqgep;
using vqgep::testing::random_quaternion;
using vqgep::testing::random_state;

namespace {

Eigen::Matrix2cd pauli(int k) {
    const Complex i(0.0, 1.0);
    Eigen::Matrix2cd m;
    switch (k) {
    case 1:
        m << 0, 1, 1, 0;
        break;
    case 2:
        m << 0, -i, i, 0;
        break;
    case 3:
        m << 1, 0, 0, -1;
        break;
    default:
        m.setIdentity();
    }
    return m;
}

// Dense operator of `u` on `target`, qubit 0 leftmost in the Kronecker
// product.
CMatrix embed(const Eigen::Matrix2cd &u, std::size_t target, std::size_t n) {
    CMatrix out = CMatrix::Identity(1, 1);
    for (std::size_t q = 0; q < n; ++q) {
        const CMatrix f = q == target ? CMatrix(u) : CMatrix::Identity(2, 2);
        CMatrix next(out.rows() * 2, out.cols() * 2);
        for (Eigen::Index i = 0; i < out.rows(); ++i) {
            for (Eigen::Index j = 0; j < out.cols(); ++j) {
                next.block(2 * i, 2 * j, 2, 2) = out(i, j) * f;
            }
        }
        out = next;
    }
    return out;
}

CMatrix dense_cz(std::size_t a, std::size_t b, std::size_t n) {
    const Eigen::Index dim = Eigen::Index{1} << n;
    CMatrix m = CMatrix::Identity(dim, dim);
    for (Eigen::Index x = 0; x < dim; ++x) {
        const bool ba = (x >> (n - 1 - a)) & 1;
        const bool bb = (x >> (n - 1 - b)) & 1;
        if (ba && bb) {
            m(x, x) = -1.0;
        }
    }
    return m;
}

CVector dense_circuit(const CircuitLayout &layout,
                      const std::vector<GateQuaternion> &params) {
    const std::size_t n = layout.n_qubits();
    CVector psi = CVector::Zero(Eigen::Index{1} << n);
    psi[0] = 1.0;
    for (const auto &op : layout.ops()) {
        if (op.kind == CircuitOp::Kind::Gate) {
            psi = embed(params[op.a].matrix(), op.b, n) * psi;
        } else {
            psi = dense_cz(op.a, op.b, n) * psi;
        }
    }
    return psi;
}

} // namespace

TEST_SUITE("statevector") {

TEST_CASE("quaternion gate is q0 I - i(qx X + qy Y + qz Z)") {
    Rng rng(1);
    for (int t = 0; t < 20; ++t) {
        const auto q = random_quaternion(rng);
        Eigen::Matrix2cd expect = q[0] * pauli(0);
        for (int k = 1; k <= 3; ++k) {
            expect -= Complex(0.0, 1.0) * q[static_cast<std::size_t>(k)] * pauli(k);
        }
        CHECK((q.matrix() - expect).norm() < 1e-14);
        CHECK((q.matrix().adjoint() * q.matrix() -
               Eigen::Matrix2cd::Identity())
                  .norm() < 1e-14);
        CHECK(std::abs(q.matrix().determinant() - 1.0) < 1e-14);
    }
}

TEST_CASE("angle-axis form") {
    const auto q = GateQuaternion::from_angle_axis(std::numbers::pi / 3,
                                                   {0.0, 2.0, 0.0});
    CHECK(q[0] == doctest::Approx(std::cos(std::numbers::pi / 6)));
    CHECK(q[2] == doctest::Approx(std::sin(std::numbers::pi / 6)));
    CHECK(q.angle() == doctest::Approx(std::numbers::pi / 3));
    const auto axis = q.axis();
    REQUIRE(axis.has_value());
    CHECK((*axis)[1] == doctest::Approx(1.0));
    CHECK_FALSE(GateQuaternion().axis().has_value());
}

TEST_CASE("non-unit quaternion is rejected") {
    CHECK_THROWS_AS(GateQuaternion(1.0, 1.0, 0.0, 0.0), ValidationError);
    CHECK_NOTHROW(GateQuaternion(1.0, 1e-12, 0.0, 0.0));
}

TEST_CASE("state construction") {
    const StateVector s(3);
    CHECK(s.dim() == 8);
    CHECK(s[0] == Complex(1.0));
    CHECK_THROWS_AS(StateVector(CVector::Ones(4)), ValidationError);
    CHECK_THROWS_AS(StateVector(std::size_t{0}), ValidationError);
    CHECK(StateVector::basis(2, 3)[3] == Complex(1.0));
}

TEST_CASE("qubit 0 is the most significant bit") {
    StateVector s(3);
    s.apply_x(0);
    CHECK(std::abs(s[4]) == doctest::Approx(1.0));
    StateVector t(3);
    t.apply_x(2);
    CHECK(std::abs(t[1]) == doctest::Approx(1.0));
}

TEST_CASE("single-qubit gates match the dense Kronecker embedding") {
    Rng rng(2);
    for (std::size_t n : {1u, 2u, 4u}) {
        for (std::size_t target = 0; target < n; ++target) {
            const auto psi = random_state(n, rng);
            const auto q = random_quaternion(rng);
            const StateVector out = apply_single_qubit(psi, q, target);
            const CVector expect = embed(q.matrix(), target, n) * psi.amplitudes();
            CHECK((out.amplitudes() - expect).norm() < 1e-13);
        }
    }
}

TEST_CASE("CZ is symmetric and diagonal") {
    Rng rng(3);
    const auto psi = random_state(3, rng);
    const auto a = apply_cz(psi, 0, 2);
    const auto b = apply_cz(psi, 2, 0);
    CHECK((a.amplitudes() - b.amplitudes()).norm() < 1e-15);
    CHECK((a.amplitudes() - dense_cz(0, 2, 3) * psi.amplitudes()).norm() <
          1e-15);
    CHECK_THROWS_AS((void)apply_cz(psi, 1, 1), IndexError);
    CHECK_THROWS_AS((void)apply_cz(psi, 0, 3), IndexError);
}

TEST_CASE("layout gate counts") {
    for (std::size_t l : {1u, 2u, 3u}) {
        CHECK(CircuitLayout::alternating_layered(5, l).gate_count() == 5 + 8 * l);
        CHECK(CircuitLayout::alternating_layered(7, l).gate_count() == 7 + 12 * l);
        CHECK(CircuitLayout::cascading_block(5, l).gate_count() == 5 * l + 9);
    }
    CHECK(CircuitLayout::single_layer(4).gate_count() == 4);
}

TEST_CASE("alternating layout structure") {
    const auto layout = CircuitLayout::alternating_layered(5, 1);
    const auto ent = layout.entanglers();
    REQUIRE(ent.size() == 4);
    CHECK(ent[0] == Entangler{5, 0, 1});
    CHECK(ent[1] == Entangler{5, 2, 3});
    CHECK(ent[2] == Entangler{9, 1, 2});
    CHECK(ent[3] == Entangler{9, 3, 4});
    for (std::size_t d = 0; d < 5; ++d) {
        CHECK(layout.qubit_of(d) == d);
    }
    CHECK(layout.qubit_of(5) == 0);
    CHECK(layout.qubit_of(9) == 1);
    CHECK(layout.qubit_of(12) == 4);
}

TEST_CASE("cascading layout closes the ring") {
    const auto layout = CircuitLayout::cascading_block(5, 1);
    const auto ent = layout.entanglers();
    REQUIRE(ent.size() == 5);
    CHECK(ent.back().control == 4);
    CHECK(ent.back().target == 0);
    CHECK(layout.qubit_of(layout.gate_count() - 1) == 4);
    CHECK(layout.qubit_of(9) == 0);
}

TEST_CASE("layout validation") {
    using Op = CircuitOp;
    CHECK_THROWS_AS(CircuitLayout(2, AnsatzKind::Custom, 0,
                                  {Op::gate(1, 0)}),
                    ValidationError);
    CHECK_THROWS_AS(CircuitLayout(2, AnsatzKind::Custom, 0,
                                  {Op::gate(0, 2)}),
                    ValidationError);
    CHECK_THROWS_AS(CircuitLayout(2, AnsatzKind::Custom, 0, {Op::cz(1, 1)}),
                    ValidationError);
}

TEST_CASE("run_circuit agrees with dense matrices") {
    Rng rng(4);
    for (const auto &layout :
         {CircuitLayout::alternating_layered(3, 2),
          CircuitLayout::cascading_block(4, 1),
          CircuitLayout::alternating_layered(4, 1)}) {
        std::vector<GateQuaternion> params;
        for (std::size_t d = 0; d < layout.gate_count(); ++d) {
            params.push_back(random_quaternion(rng));
        }
        const auto s = run_circuit(layout, params, StateVector(layout.n_qubits()));
        CHECK((s.amplitudes() - dense_circuit(layout, params)).norm() < 1e-12);
    }
}

TEST_CASE("GateContext substitutes one gate") {
    Rng rng(5);
    const auto layout = CircuitLayout::cascading_block(3, 2);
    std::vector<GateQuaternion> params;
    for (std::size_t d = 0; d < layout.gate_count(); ++d) {
        params.push_back(random_quaternion(rng));
    }
    const StateVector init(3);
    for (std::size_t d = 0; d < layout.gate_count(); ++d) {
        const GateContext ctx(layout, params, d, init);
        const auto q = random_quaternion(rng);
        auto swapped = params;
        swapped[d] = q;
        CHECK((ctx.state_with(q).amplitudes() -
               run_circuit(layout, swapped, init).amplitudes())
                  .norm() < 1e-12);
    }
}

TEST_CASE("step state") {
    const auto s = prepare_step_state(3);
    const double a = 1.0 / std::sqrt(8.0);
    for (std::size_t i = 0; i < 8; ++i) {
        CHECK(s[i].real() == doctest::Approx(i < 4 ? a : -a));
        CHECK(s[i].imag() == doctest::Approx(0.0));
    }
}

} // TEST_SUITE

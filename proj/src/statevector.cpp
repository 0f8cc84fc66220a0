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

#include "vqgep/statevector.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace vqgep {

namespace {

void check_qubit(std::size_t qubit, std::size_t n) {
    if (qubit >= n) {
        throw IndexError("qubit index " + std::to_string(qubit) +
                         " out of range for " + std::to_string(n) +
                         " qubits");
    }
}

} // namespace

GateQuaternion::GateQuaternion(double q0, double qx, double qy, double qz)
    : GateQuaternion(Eigen::Vector4d(q0, qx, qy, qz)) {}

GateQuaternion::GateQuaternion(const Eigen::Vector4d &q) : q_(q) {
    if (!q_.allFinite() || std::abs(q_.norm() - 1.0) > kUnitTolerance) {
        throw ValidationError("gate quaternion must have unit norm, got " +
                              std::to_string(q_.norm()));
    }
}

GateQuaternion GateQuaternion::normalized(const Eigen::Vector4d &v) {
    const double nrm = v.norm();
    if (!(nrm > 0.0) || !std::isfinite(nrm)) {
        throw ValidationError("cannot normalize a zero quaternion");
    }
    return GateQuaternion(Eigen::Vector4d(v / nrm));
}

GateQuaternion
GateQuaternion::from_angle_axis(double angle,
                                const std::array<double, 3> &axis) {
    const Eigen::Vector3d n(axis[0], axis[1], axis[2]);
    const double nrm = n.norm();
    if (!(nrm > 0.0)) {
        throw ValidationError("rotation axis must be nonzero");
    }
    const double s = std::sin(angle / 2.0) / nrm;
    Eigen::Vector4d q(std::cos(angle / 2.0), s * n[0], s * n[1], s * n[2]);
    return normalized(q);
}

double GateQuaternion::angle() const {
    return 2.0 * std::atan2(q_.tail<3>().norm(), q_[0]);
}

std::optional<std::array<double, 3>> GateQuaternion::axis() const {
    const double s = q_.tail<3>().norm();
    if (s == 0.0) {
        return std::nullopt;
    }
    return std::array<double, 3>{q_[1] / s, q_[2] / s, q_[3] / s};
}

Eigen::Matrix2cd GateQuaternion::matrix() const {
    const double q0 = q_[0], qx = q_[1], qy = q_[2], qz = q_[3];
    Eigen::Matrix2cd u;
    u(0, 0) = Complex(q0, -qz);
    u(0, 1) = Complex(-qy, -qx);
    u(1, 0) = Complex(qy, -qx);
    u(1, 1) = Complex(q0, qz);
    return u;
}

StateVector::StateVector(std::size_t n_qubits) : n_(n_qubits) {
    if (n_qubits == 0 || n_qubits > 30) {
        throw ValidationError("qubit count must be in [1, 30]");
    }
    amps_ = CVector::Zero(static_cast<Eigen::Index>(std::size_t{1} << n_));
    amps_[0] = 1.0;
}

StateVector::StateVector(CVector amps) : n_(0), amps_(std::move(amps)) {
    const auto len = static_cast<std::size_t>(amps_.size());
    if (len < 2 || !is_power_of_two(len)) {
        throw ValidationError("amplitude vector length must be 2^n with n >= 1");
    }
    n_ = ceil_log2(len);
    if (std::abs(amps_.norm() - 1.0) > kNormTolerance) {
        throw ValidationError("state vector must be normalized, norm = " +
                              std::to_string(amps_.norm()));
    }
}

StateVector StateVector::normalized(const CVector &amps) {
    const double nrm = amps.norm();
    if (!(nrm > 0.0)) {
        throw ValidationError("cannot normalize a zero vector");
    }
    return StateVector(CVector(amps / nrm));
}

StateVector StateVector::basis(std::size_t n_qubits, std::size_t index) {
    StateVector s(n_qubits);
    if (index >= s.dim()) {
        throw IndexError("basis index out of range");
    }
    s.amps_[0] = 0.0;
    s.amps_[static_cast<Eigen::Index>(index)] = 1.0;
    return s;
}

Complex StateVector::inner(const StateVector &other) const {
    if (other.dim() != dim()) {
        throw ValidationError("state dimension mismatch");
    }
    return amps_.dot(other.amps_);
}

std::size_t StateVector::mask_of(std::size_t qubit) const {
    check_qubit(qubit, n_);
    return std::size_t{1} << (n_ - 1 - qubit);
}

void StateVector::apply_unitary_1q(const Eigen::Matrix2cd &u,
                                   std::size_t target) {
    const std::size_t mask = mask_of(target);
    const std::size_t len = dim();
    for (std::size_t i = 0; i < len; ++i) {
        if ((i & mask) != 0) {
            continue;
        }
        const auto i0 = static_cast<Eigen::Index>(i);
        const auto i1 = static_cast<Eigen::Index>(i | mask);
        const Complex a0 = amps_[i0];
        const Complex a1 = amps_[i1];
        amps_[i0] = u(0, 0) * a0 + u(0, 1) * a1;
        amps_[i1] = u(1, 0) * a0 + u(1, 1) * a1;
    }
}

void StateVector::apply_gate(const GateQuaternion &q, std::size_t target) {
    apply_unitary_1q(q.matrix(), target);
}

void StateVector::apply_cz(std::size_t control, std::size_t target) {
    if (control == target) {
        throw IndexError("CZ control and target must differ");
    }
    const std::size_t both = mask_of(control) | mask_of(target);
    for (std::size_t i = 0; i < dim(); ++i) {
        if ((i & both) == both) {
            amps_[static_cast<Eigen::Index>(i)] *= -1.0;
        }
    }
}

void StateVector::apply_x(std::size_t target) {
    Eigen::Matrix2cd x;
    x << 0.0, 1.0, 1.0, 0.0;
    apply_unitary_1q(x, target);
}

void StateVector::apply_hadamard(std::size_t target) {
    const double r = 1.0 / std::numbers::sqrt2;
    Eigen::Matrix2cd h;
    h << r, r, r, -r;
    apply_unitary_1q(h, target);
}

StateVector apply_single_qubit(const StateVector &state,
                               const GateQuaternion &q, std::size_t target) {
    StateVector out = state;
    out.apply_gate(q, target);
    return out;
}

StateVector apply_cz(const StateVector &state, std::size_t control,
                     std::size_t target) {
    StateVector out = state;
    out.apply_cz(control, target);
    return out;
}

CircuitLayout::CircuitLayout(std::size_t n_qubits, AnsatzKind kind,
                             std::size_t layers, std::vector<CircuitOp> ops)
    : n_(n_qubits), kind_(kind), layers_(layers), ops_(std::move(ops)) {
    if (n_ == 0) {
        throw ValidationError("layout needs at least one qubit");
    }
    for (const auto &op : ops_) {
        if (op.kind == CircuitOp::Kind::Gate) {
            if (op.a != gates_) {
                throw ValidationError("gate indices must be consecutive from 0");
            }
            check_qubit(op.b, n_);
            gate_qubit_.push_back(op.b);
            ++gates_;
        } else {
            check_qubit(op.a, n_);
            check_qubit(op.b, n_);
            if (op.a == op.b) {
                throw IndexError("CZ control and target must differ");
            }
        }
    }
    if (gates_ == 0) {
        throw ValidationError("layout has no parameterized gates");
    }
}

CircuitLayout CircuitLayout::alternating_layered(std::size_t n_qubits,
                                                 std::size_t layers) {
    if (n_qubits < 2 || layers == 0) {
        throw ValidationError("alternating layout needs n >= 2 and L >= 1");
    }
    std::vector<CircuitOp> ops;
    std::size_t d = 0;
    for (std::size_t q = 0; q < n_qubits; ++q) {
        ops.push_back(CircuitOp::gate(d++, q));
    }
    for (std::size_t l = 0; l < layers; ++l) {
        for (std::size_t start : {std::size_t{0}, std::size_t{1}}) {
            std::vector<std::size_t> covered;
            for (std::size_t q = start; q + 1 < n_qubits; q += 2) {
                ops.push_back(CircuitOp::cz(q, q + 1));
                covered.push_back(q);
                covered.push_back(q + 1);
            }
            for (std::size_t q : covered) {
                ops.push_back(CircuitOp::gate(d++, q));
            }
        }
    }
    return CircuitLayout(n_qubits, AnsatzKind::AlternatingLayered, layers,
                         std::move(ops));
}

CircuitLayout CircuitLayout::cascading_block(std::size_t n_qubits,
                                             std::size_t layers) {
    if (n_qubits < 2 || layers == 0) {
        throw ValidationError("cascading layout needs n >= 2 and L >= 1");
    }
    std::vector<CircuitOp> ops;
    std::size_t d = 0;
    for (std::size_t q = 0; q < n_qubits; ++q) {
        ops.push_back(CircuitOp::gate(d++, q));
    }
    for (std::size_t l = 0; l < layers; ++l) {
        for (std::size_t q = 0; q + 1 < n_qubits; ++q) {
            ops.push_back(CircuitOp::cz(q, q + 1));
            ops.push_back(CircuitOp::gate(d++, q + 1));
        }
        ops.push_back(CircuitOp::cz(n_qubits - 1, 0));
        ops.push_back(CircuitOp::gate(d++, 0));
    }
    for (std::size_t q = 1; q < n_qubits; ++q) {
        ops.push_back(CircuitOp::gate(d++, q));
    }
    return CircuitLayout(n_qubits, AnsatzKind::CascadingBlock, layers,
                         std::move(ops));
}

CircuitLayout CircuitLayout::single_layer(std::size_t n_qubits) {
    std::vector<CircuitOp> ops;
    for (std::size_t q = 0; q < n_qubits; ++q) {
        ops.push_back(CircuitOp::gate(q, q));
    }
    return CircuitLayout(n_qubits, AnsatzKind::Custom, 0, std::move(ops));
}

std::vector<GateSlot> CircuitLayout::slots() const {
    std::vector<GateSlot> out;
    for (const auto &op : ops_) {
        if (op.kind == CircuitOp::Kind::Gate) {
            out.push_back({op.a, op.b});
        }
    }
    return out;
}

std::vector<Entangler> CircuitLayout::entanglers() const {
    std::vector<Entangler> out;
    std::size_t seen = 0;
    for (const auto &op : ops_) {
        if (op.kind == CircuitOp::Kind::Gate) {
            ++seen;
        } else {
            out.push_back({seen, op.a, op.b});
        }
    }
    return out;
}

std::size_t CircuitLayout::qubit_of(std::size_t d) const {
    if (d >= gates_) {
        throw IndexError("gate index " + std::to_string(d) +
                         " out of range for " + std::to_string(gates_) +
                         " gates");
    }
    return gate_qubit_[d];
}

namespace {

void check_params(const CircuitLayout &layout,
                  std::span<const GateQuaternion> params) {
    if (params.size() != layout.gate_count()) {
        throw ValidationError("expected " +
                              std::to_string(layout.gate_count()) +
                              " gate parameters, got " +
                              std::to_string(params.size()));
    }
}

void check_initial(const CircuitLayout &layout, const StateVector &initial) {
    if (initial.n_qubits() != layout.n_qubits()) {
        throw ValidationError("initial state qubit count does not match layout");
    }
}

} // namespace

StateVector run_circuit(const CircuitLayout &layout,
                        std::span<const GateQuaternion> params,
                        const StateVector &initial) {
    check_params(layout, params);
    check_initial(layout, initial);
    StateVector s = initial;
    for (const auto &op : layout.ops()) {
        if (op.kind == CircuitOp::Kind::Gate) {
            s.apply_gate(params[op.a], op.b);
        } else {
            s.apply_cz(op.a, op.b);
        }
    }
    return s;
}

GateContext::GateContext(const CircuitLayout &layout,
                         std::span<const GateQuaternion> params,
                         std::size_t d, const StateVector &initial)
    : d_(d), target_(layout.qubit_of(d)), prefix_(initial) {
    check_params(layout, params);
    check_initial(layout, initial);
    const auto &ops = layout.ops();
    std::size_t i = 0;
    for (; i < ops.size(); ++i) {
        const auto &op = ops[i];
        if (op.kind == CircuitOp::Kind::Gate) {
            if (op.a == d) {
                ++i;
                break;
            }
            prefix_.apply_gate(params[op.a], op.b);
        } else {
            prefix_.apply_cz(op.a, op.b);
        }
    }
    for (; i < ops.size(); ++i) {
        suffix_.push_back(ops[i]);
        if (ops[i].kind == CircuitOp::Kind::Gate) {
            suffix_params_.push_back(params[ops[i].a]);
        }
    }
}

StateVector GateContext::state_with(const GateQuaternion &q) const {
    StateVector s = prefix_;
    s.apply_gate(q, target_);
    std::size_t p = 0;
    for (const auto &op : suffix_) {
        if (op.kind == CircuitOp::Kind::Gate) {
            s.apply_gate(suffix_params_[p++], op.b);
        } else {
            s.apply_cz(op.a, op.b);
        }
    }
    return s;
}

StateVector prepare_step_state(std::size_t n_qubits) {
    StateVector s(n_qubits);
    s.apply_x(0);
    for (std::size_t q = 0; q < n_qubits; ++q) {
        s.apply_hadamard(q);
    }
    return s;
}

} // namespace vqgep

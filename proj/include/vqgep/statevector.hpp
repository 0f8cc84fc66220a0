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
 * Dense statevector simulation of circuits made of quaternion-parameterized
 * single-qubit gates and fixed CZ entanglers.
 *
 * Basis ordering: qubit 0 is the most significant bit of the basis index,
 * i.e. amplitude j corresponds to |j_{n-1} ... j_0> with qubit 0 holding
 * j_{n-1}. The FEM degree-of-freedom mapping uses the same convention.
 */

#pragma once

#include <array>
#include <optional>
#include <span>
#include <vector>

#include "vqgep/common.hpp"

namespace vqgep {

/// Unit quaternion (q0, qx, qy, qz) encoding the single-qubit gate
/// U = q0 I - i (qx X + qy Y + qz Z) = cos(t/2) I - i sin(t/2) n.sigma.
class GateQuaternion {
  public:
    static constexpr double kUnitTolerance = 1e-9;

    /// Identity gate.
    GateQuaternion() : q_(1.0, 0.0, 0.0, 0.0) {}

    /// Throws ValidationError unless the components have unit norm.
    GateQuaternion(double q0, double qx, double qy, double qz);
    explicit GateQuaternion(const Eigen::Vector4d &q);

    /// Scales `v` to unit length. Throws ValidationError on a zero vector.
    static GateQuaternion normalized(const Eigen::Vector4d &v);
    /// Rotation by `angle` about `axis` (the axis is normalized first).
    static GateQuaternion from_angle_axis(double angle,
                                          const std::array<double, 3> &axis);

    [[nodiscard]] const Eigen::Vector4d &vec() const noexcept { return q_; }
    [[nodiscard]] double operator[](std::size_t i) const { return q_[i]; }

    /// Rotation angle in [0, 2pi].
    [[nodiscard]] double angle() const;
    /// Unit rotation axis; empty when the vector part vanishes.
    [[nodiscard]] std::optional<std::array<double, 3>> axis() const;

    /// The 2x2 unitary represented by this quaternion.
    [[nodiscard]] Eigen::Matrix2cd matrix() const;

  private:
    Eigen::Vector4d q_;
};

/// Amplitudes of an n-qubit register. Always normalized.
class StateVector {
  public:
    static constexpr double kNormTolerance = 1e-10;

    /// |0...0> on `n_qubits` qubits.
    explicit StateVector(std::size_t n_qubits);
    /// Takes ownership of `amps`; length must be 2^n and norm 1 (1e-10).
    explicit StateVector(CVector amps);

    /// Normalizes `amps` first. Throws ValidationError for a zero vector.
    static StateVector normalized(const CVector &amps);
    static StateVector basis(std::size_t n_qubits, std::size_t index);

    [[nodiscard]] std::size_t n_qubits() const noexcept { return n_; }
    [[nodiscard]] std::size_t dim() const noexcept {
        return static_cast<std::size_t>(amps_.size());
    }
    [[nodiscard]] const CVector &amplitudes() const noexcept { return amps_; }
    [[nodiscard]] Complex operator[](std::size_t i) const { return amps_[i]; }
    [[nodiscard]] double norm() const { return amps_.norm(); }

    /// <this|other>.
    [[nodiscard]] Complex inner(const StateVector &other) const;

    // In-place kernels. The free functions below wrap these on copies.
    void apply_unitary_1q(const Eigen::Matrix2cd &u, std::size_t target);
    void apply_gate(const GateQuaternion &q, std::size_t target);
    void apply_cz(std::size_t control, std::size_t target);
    void apply_x(std::size_t target);
    void apply_hadamard(std::size_t target);

  private:
    [[nodiscard]] std::size_t mask_of(std::size_t qubit) const;

    std::size_t n_;
    CVector amps_;
};

/// Returns a copy of `state` with the quaternion gate applied to `target`.
[[nodiscard]] StateVector apply_single_qubit(const StateVector &state,
                                             const GateQuaternion &q,
                                             std::size_t target);
/// Returns a copy of `state` with CZ applied. Throws IndexError when the
/// qubits coincide or are out of range.
[[nodiscard]] StateVector apply_cz(const StateVector &state,
                                   std::size_t control, std::size_t target);

enum class AnsatzKind { AlternatingLayered, CascadingBlock, Custom };

/// One element of a circuit: a parameterized gate or a CZ.
struct CircuitOp {
    enum class Kind { Gate, CZ };
    Kind kind;
    std::size_t a; ///< Gate: gate index d. CZ: control qubit.
    std::size_t b; ///< Gate: target qubit. CZ: target qubit.

    static CircuitOp gate(std::size_t d, std::size_t qubit) {
        return {Kind::Gate, d, qubit};
    }
    static CircuitOp cz(std::size_t control, std::size_t target) {
        return {Kind::CZ, control, target};
    }
    friend bool operator==(const CircuitOp &, const CircuitOp &) = default;
};

struct GateSlot {
    std::size_t gate;
    std::size_t qubit;
    friend bool operator==(const GateSlot &, const GateSlot &) = default;
};

/// A CZ placed after the first `position` parameterized gates.
struct Entangler {
    std::size_t position;
    std::size_t control;
    std::size_t target;
    friend bool operator==(const Entangler &, const Entangler &) = default;
};

/// Gate/entangler placement of a parameterized circuit. Gate indices are
/// 0-based and increase in application order ("top left to bottom right").
class CircuitLayout {
  public:
    /// Validates qubit ranges, CZ distinctness and that gate indices are
    /// exactly 0..D-1 in order.
    CircuitLayout(std::size_t n_qubits, AnsatzKind kind, std::size_t layers,
                  std::vector<CircuitOp> ops);

    /// Initial gate layer on every qubit, then per layer: CZ on (0,1),(2,3),..
    /// with gates on the covered qubits, then CZ on (1,2),(3,4),.. with gates
    /// on the covered qubits. Five qubits give D = 5 + 8L.
    static CircuitLayout alternating_layered(std::size_t n_qubits,
                                             std::size_t layers);
    /// Initial gate layer, then per layer a ring of CZ(i,i+1) each followed
    /// by a gate on qubit i+1, closed by CZ(n-1,0) and a gate on qubit 0;
    /// a final layer on qubits 1..n-1. Five qubits give D = 5L + 9.
    static CircuitLayout cascading_block(std::size_t n_qubits,
                                         std::size_t layers);
    /// One gate on each qubit, no entanglers.
    static CircuitLayout single_layer(std::size_t n_qubits);

    [[nodiscard]] std::size_t n_qubits() const noexcept { return n_; }
    [[nodiscard]] AnsatzKind kind() const noexcept { return kind_; }
    [[nodiscard]] std::size_t layers() const noexcept { return layers_; }
    [[nodiscard]] std::size_t gate_count() const noexcept { return gates_; }
    [[nodiscard]] const std::vector<CircuitOp> &ops() const noexcept {
        return ops_;
    }
    [[nodiscard]] std::vector<GateSlot> slots() const;
    [[nodiscard]] std::vector<Entangler> entanglers() const;
    /// Target qubit of gate `d`.
    [[nodiscard]] std::size_t qubit_of(std::size_t d) const;

  private:
    std::size_t n_;
    AnsatzKind kind_;
    std::size_t layers_;
    std::size_t gates_ = 0;
    std::vector<CircuitOp> ops_;
    std::vector<std::size_t> gate_qubit_;
};

/// U_D ... U_1 |initial> with entanglers interleaved in layout order.
[[nodiscard]] StateVector run_circuit(const CircuitLayout &layout,
                                      std::span<const GateQuaternion> params,
                                      const StateVector &initial);

/// Circuit output as a function of one gate's quaternion, all others fixed.
/// The state entering gate d is cached, so each evaluation only replays the
/// gates after d.
class GateContext {
  public:
    GateContext(const CircuitLayout &layout,
                std::span<const GateQuaternion> params, std::size_t d,
                const StateVector &initial);

    [[nodiscard]] StateVector state_with(const GateQuaternion &q) const;
    [[nodiscard]] std::size_t gate() const noexcept { return d_; }
    [[nodiscard]] const StateVector &prefix_state() const noexcept {
        return prefix_;
    }

  private:
    std::size_t d_;
    std::size_t target_;
    StateVector prefix_;
    std::vector<CircuitOp> suffix_;
    std::vector<GateQuaternion> suffix_params_;
};

/// (-1)^{j_{n-1}} / 2^{n/2}: X on the most significant qubit of |0...0>
/// followed by a Hadamard on every qubit.
[[nodiscard]] StateVector prepare_step_state(std::size_t n_qubits);

} // namespace vqgep

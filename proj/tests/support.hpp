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

// Random instances shared by the unit tests and the acceptance runner.

#pragma once

#include <random>

#include <Eigen/Dense>

#include "vqgep/common.hpp"
#include "vqgep/statevector.hpp"

namespace vqgep::testing {

inline GateQuaternion random_quaternion(Rng &rng) {
    std::normal_distribution<double> g;
    Eigen::Vector4d v;
    for (int i = 0; i < 4; ++i) {
        v[i] = g(rng);
    }
    return GateQuaternion::normalized(v);
}

inline CMatrix random_hermitian(Eigen::Index n, Rng &rng,
                                Eigen::Index band = -1) {
    std::normal_distribution<double> g;
    CMatrix m(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
            m(i, j) = Complex(g(rng), g(rng));
        }
    }
    CMatrix h = 0.5 * (m + m.adjoint());
    if (band >= 0) {
        for (Eigen::Index i = 0; i < n; ++i) {
            for (Eigen::Index j = 0; j < n; ++j) {
                if (std::abs(i - j) > band) {
                    h(i, j) = 0.0;
                }
            }
        }
    }
    return h;
}

inline RMatrix random_symmetric(Eigen::Index n, Rng &rng) {
    return random_hermitian(n, rng).real();
}

/// X X^H / n + shift I.
inline CMatrix random_pd(Eigen::Index n, Rng &rng, double shift = 0.5) {
    std::normal_distribution<double> g;
    CMatrix x(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
            x(i, j) = Complex(g(rng), g(rng));
        }
    }
    return x * x.adjoint() / static_cast<double>(n) +
           shift * CMatrix::Identity(n, n);
}

inline CVector random_vector(Eigen::Index n, Rng &rng) {
    std::normal_distribution<double> g;
    CVector v(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        v[i] = Complex(g(rng), g(rng));
    }
    return v;
}

inline StateVector random_state(std::size_t n_qubits, Rng &rng) {
    return StateVector::normalized(
        random_vector(Eigen::Index{1} << n_qubits, rng));
}

} // namespace vqgep::testing

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
 * Finite element front-end: 1D Poisson with linear elements and 2D linear
 * elasticity with bilinear quadrilaterals on a structured grid.
 *
 * Numbering: grid node (jx, jy), both 0-based, is j = Ny * jx + jy, so nodes
 * run bottom to top within a column and columns run left to right. The
 * displacement component k of node j is DOF 2 j + k. After Dirichlet
 * elimination the retained DOFs keep their relative order and DOF r maps to
 * computational basis state r (qubit 0 is the most significant bit).
 */

#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "vqgep/common.hpp"
#include "vqgep/gep.hpp"
#include "vqgep/operators.hpp"

namespace vqgep {

/// N interior nodes of a uniform mesh with spacing h; the Dirichlet ends
/// are not DOFs.
struct Mesh1D {
    std::size_t n = 0;
    double h = 0.0;

    /// n interior nodes of [0, 1]: h = 1 / (n + 1).
    static Mesh1D unit_interval(std::size_t n);
    [[nodiscard]] double node(std::size_t j) const {
        return h * static_cast<double>(j + 1);
    }
    void validate() const;
};

struct Mesh2DGrid {
    std::size_t nx = 0;
    std::size_t ny = 0;
    double width = 0.0;
    double height = 0.0;

    [[nodiscard]] double hx() const {
        return width / static_cast<double>(nx - 1);
    }
    [[nodiscard]] double hy() const {
        return height / static_cast<double>(ny - 1);
    }
    [[nodiscard]] std::size_t node_count() const { return nx * ny; }
    [[nodiscard]] std::size_t node(std::size_t jx, std::size_t jy) const {
        return ny * jx + jy;
    }
    void validate() const;
};

struct Material {
    double young = 0.0;   ///< Pa
    double poisson = 0.0; ///< dimensionless, in (-1, 0.5)
    double density = 0.0; ///< kg/m^3

    static Material steel() { return {200e9, 0.3, 7850.0}; }
    void validate() const;
};

enum class PlaneModel { Stress, Strain };

struct FemSystem {
    HermitianOperator k;
    std::optional<HermitianOperator> m;
    std::optional<RVector> f;
    /// Original DOF index of every retained DOF, ascending.
    std::vector<std::size_t> dofs;

    [[nodiscard]] std::size_t dim() const { return k.dim(); }
};

/// K = tridiag(-1, 2, -1) / h over the interior nodes.
[[nodiscard]] FemSystem assemble_poisson_1d(const Mesh1D &mesh);

/// F_j = f(x_j) scaled to unit norm. Throws ValidationError when every
/// sample is zero.
[[nodiscard]] RVector assemble_poisson_load(std::span<const double> samples);

/// +1 on the left half of the interior nodes and -1 on the right half.
[[nodiscard]] std::vector<double> step_samples(std::size_t n);

/// Stiffness and consistent mass of the whole grid, before any boundary
/// condition. The stiffness uses the Lame form
///   lambda phi_{i,k} phi_{j,l} + mu delta_kl grad phi_i . grad phi_j
///   + mu phi_{j,k} phi_{i,l}
/// with lambda replaced by E nu / (1 - nu^2) for plane stress.
/// `gauss_points` is the per-axis Gauss order (2 or 3).
[[nodiscard]] FemSystem assemble_elasticity_2d(const Mesh2DGrid &mesh,
                                               const Material &mat,
                                               PlaneModel model =
                                                   PlaneModel::Stress,
                                               int gauss_points = 2);

/// Lame parameters (lambda, mu) for the chosen plane model.
[[nodiscard]] std::pair<double, double> lame_parameters(const Material &mat,
                                                        PlaneModel model);

/// Removes every DOF of the listed nodes from K, M and F. Throws
/// ValidationError for unknown nodes or when nothing would remain.
[[nodiscard]] FemSystem apply_dirichlet(const FemSystem &system,
                                        const std::vector<std::size_t> &nodes,
                                        std::size_t dofs_per_node);

/// Left and right node columns.
[[nodiscard]] std::vector<std::size_t>
clamped_ends(const Mesh2DGrid &mesh);

/// Elasticity system of the grid with both end columns fixed.
[[nodiscard]] FemSystem beam_system(const Mesh2DGrid &mesh,
                                    const Material &mat,
                                    PlaneModel model = PlaneModel::Stress);

struct BasisMapping {
    /// Basis index of retained DOF r (always r).
    std::vector<std::size_t> basis_of_dof;
    std::size_t n_qubits = 0;
    PaddedPencil pencil;
};

/// Pencil (K, M) mapped onto qubits, padded to a power of two when needed.
/// Requires M.
[[nodiscard]] BasisMapping
dof_to_basis_map(const FemSystem &system,
                 PaddingRegime regime = PaddingRegime::PositiveMin,
                 std::optional<double> pad_eps = std::nullopt);

} // namespace vqgep

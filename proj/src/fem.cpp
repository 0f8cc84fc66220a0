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

#include "vqgep/fem.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <set>
#include <string>

namespace vqgep {

namespace {

struct GaussRule {
    std::vector<double> x;
    std::vector<double> w;
};

GaussRule gauss_rule(int points) {
    if (points == 2) {
        const double a = 1.0 / std::sqrt(3.0);
        return {{-a, a}, {1.0, 1.0}};
    }
    if (points == 3) {
        const double a = std::sqrt(0.6);
        return {{-a, 0.0, a}, {5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0}};
    }
    throw ValidationError("Gauss order must be 2 or 3, got " +
                          std::to_string(points));
}

RMatrix restrict_dense(const RMatrix &m, const std::vector<std::size_t> &keep) {
    const auto n = static_cast<Eigen::Index>(keep.size());
    RMatrix out(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
            out(i, j) = m(static_cast<Eigen::Index>(keep[static_cast<std::size_t>(i)]),
                          static_cast<Eigen::Index>(keep[static_cast<std::size_t>(j)]));
        }
    }
    return out;
}

} // namespace

Mesh1D Mesh1D::unit_interval(std::size_t n) {
    Mesh1D mesh{n, 1.0 / static_cast<double>(n + 1)};
    mesh.validate();
    return mesh;
}

void Mesh1D::validate() const {
    if (n < 1) {
        throw ValidationError("Mesh1D needs at least one interior node");
    }
    if (!(h > 0.0) || !std::isfinite(h)) {
        throw ValidationError("Mesh1D spacing must be positive");
    }
}

void Mesh2DGrid::validate() const {
    if (nx < 2 || ny < 2) {
        throw ValidationError("Mesh2DGrid needs at least 2 nodes per axis");
    }
    if (!(width > 0.0) || !(height > 0.0) || !std::isfinite(width) ||
        !std::isfinite(height)) {
        throw ValidationError("Mesh2DGrid extents must be positive");
    }
}

void Material::validate() const {
    if (!(young > 0.0)) {
        throw ValidationError("Young's modulus must be positive");
    }
    if (!(poisson > -1.0 && poisson < 0.5)) {
        throw ValidationError("Poisson ratio must lie in (-1, 0.5)");
    }
    if (!(density > 0.0)) {
        throw ValidationError("density must be positive");
    }
}

FemSystem assemble_poisson_1d(const Mesh1D &mesh) {
    mesh.validate();
    std::map<std::size_t, CVector> diags;
    diags[0] = CVector::Constant(static_cast<Eigen::Index>(mesh.n),
                                 Complex(2.0 / mesh.h, 0.0));
    if (mesh.n > 1) {
        diags[1] = CVector::Constant(static_cast<Eigen::Index>(mesh.n - 1),
                                     Complex(-1.0 / mesh.h, 0.0));
    }
    FemSystem sys{HermitianOperator(mesh.n, std::move(diags)), std::nullopt,
                  std::nullopt, {}};
    sys.dofs.resize(mesh.n);
    for (std::size_t i = 0; i < mesh.n; ++i) {
        sys.dofs[i] = i;
    }
    return sys;
}

RVector assemble_poisson_load(std::span<const double> samples) {
    RVector f(static_cast<Eigen::Index>(samples.size()));
    for (std::size_t i = 0; i < samples.size(); ++i) {
        f[static_cast<Eigen::Index>(i)] = samples[i];
    }
    const double nrm = f.norm();
    if (!(nrm > 0.0) || !std::isfinite(nrm)) {
        throw ValidationError("load samples are all zero");
    }
    return f / nrm;
}

std::vector<double> step_samples(std::size_t n) {
    std::vector<double> s(n);
    for (std::size_t j = 0; j < n; ++j) {
        s[j] = 2 * j < n ? 1.0 : -1.0;
    }
    return s;
}

std::pair<double, double> lame_parameters(const Material &mat,
                                          PlaneModel model) {
    const double e = mat.young;
    const double nu = mat.poisson;
    const double mu = e / (2.0 * (1.0 + nu));
    const double lambda = model == PlaneModel::Stress
                              ? e * nu / (1.0 - nu * nu)
                              : e * nu / ((1.0 + nu) * (1.0 - 2.0 * nu));
    return {lambda, mu};
}

FemSystem assemble_elasticity_2d(const Mesh2DGrid &mesh, const Material &mat,
                                 PlaneModel model, int gauss_points) {
    mesh.validate();
    mat.validate();
    const GaussRule rule = gauss_rule(gauss_points);
    const auto [lambda, mu] = lame_parameters(mat, model);
    const double hx = mesh.hx();
    const double hy = mesh.hy();
    const auto ndof = static_cast<Eigen::Index>(2 * mesh.node_count());
    RMatrix k = RMatrix::Zero(ndof, ndof);
    RMatrix m = RMatrix::Zero(ndof, ndof);

    // Reference corners, counter-clockwise from bottom left.
    constexpr std::array<std::array<int, 2>, 4> corner{
        {{-1, -1}, {1, -1}, {1, 1}, {-1, 1}}};
    Eigen::Matrix<double, 8, 8> ke;
    Eigen::Matrix<double, 8, 8> me;
    for (std::size_t ex = 0; ex + 1 < mesh.nx; ++ex) {
        for (std::size_t ey = 0; ey + 1 < mesh.ny; ++ey) {
            const std::array<std::size_t, 4> nodes{
                mesh.node(ex, ey), mesh.node(ex + 1, ey),
                mesh.node(ex + 1, ey + 1), mesh.node(ex, ey + 1)};
            ke.setZero();
            me.setZero();
            for (std::size_t gi = 0; gi < rule.x.size(); ++gi) {
                for (std::size_t gj = 0; gj < rule.x.size(); ++gj) {
                    const double xi = rule.x[gi];
                    const double eta = rule.x[gj];
                    const double wgt = rule.w[gi] * rule.w[gj] * hx * hy / 4.0;
                    std::array<double, 4> phi{};
                    std::array<std::array<double, 2>, 4> grad{};
                    for (std::size_t a = 0; a < 4; ++a) {
                        const double sx = corner[a][0];
                        const double sy = corner[a][1];
                        phi[a] = (1 + sx * xi) * (1 + sy * eta) / 4.0;
                        grad[a][0] = sx * (1 + sy * eta) / 4.0 * (2.0 / hx);
                        grad[a][1] = sy * (1 + sx * xi) / 4.0 * (2.0 / hy);
                    }
                    for (std::size_t a = 0; a < 4; ++a) {
                        for (std::size_t b = 0; b < 4; ++b) {
                            const double dot = grad[a][0] * grad[b][0] +
                                               grad[a][1] * grad[b][1];
                            for (std::size_t kk = 0; kk < 2; ++kk) {
                                for (std::size_t ll = 0; ll < 2; ++ll) {
                                    double v = lambda * grad[a][kk] * grad[b][ll] +
                                               mu * grad[b][kk] * grad[a][ll];
                                    if (kk == ll) {
                                        v += mu * dot;
                                    }
                                    ke(static_cast<Eigen::Index>(2 * a + kk),
                                       static_cast<Eigen::Index>(2 * b + ll)) +=
                                        wgt * v;
                                }
                                me(static_cast<Eigen::Index>(2 * a + kk),
                                   static_cast<Eigen::Index>(2 * b + kk)) +=
                                    wgt * mat.density * phi[a] * phi[b];
                            }
                        }
                    }
                }
            }
            for (std::size_t a = 0; a < 8; ++a) {
                const auto ga =
                    static_cast<Eigen::Index>(2 * nodes[a / 2] + a % 2);
                for (std::size_t b = 0; b < 8; ++b) {
                    const auto gb =
                        static_cast<Eigen::Index>(2 * nodes[b / 2] + b % 2);
                    k(ga, gb) += ke(static_cast<Eigen::Index>(a),
                                    static_cast<Eigen::Index>(b));
                    m(ga, gb) += me(static_cast<Eigen::Index>(a),
                                    static_cast<Eigen::Index>(b));
                }
            }
        }
    }
    k = 0.5 * (k + k.transpose()).eval();
    m = 0.5 * (m + m.transpose()).eval();
    // Round-off leftovers would otherwise widen the band.
    FemSystem sys{
        HermitianOperator::from_dense(k, 1e-13 * k.cwiseAbs().maxCoeff()),
        HermitianOperator::from_dense(m, 1e-13 * m.cwiseAbs().maxCoeff()),
        std::nullopt,
        {}};
    sys.dofs.resize(static_cast<std::size_t>(ndof));
    for (std::size_t i = 0; i < sys.dofs.size(); ++i) {
        sys.dofs[i] = i;
    }
    return sys;
}

FemSystem apply_dirichlet(const FemSystem &system,
                          const std::vector<std::size_t> &nodes,
                          std::size_t dofs_per_node) {
    if (dofs_per_node == 0) {
        throw ValidationError("dofs_per_node must be positive");
    }
    const std::size_t n = system.dim();
    std::set<std::size_t> fixed;
    for (std::size_t node : nodes) {
        if ((node + 1) * dofs_per_node > n) {
            throw ValidationError("fixed node " + std::to_string(node) +
                                  " is outside the mesh");
        }
        for (std::size_t c = 0; c < dofs_per_node; ++c) {
            fixed.insert(node * dofs_per_node + c);
        }
    }
    if (fixed.empty()) {
        return system;
    }
    std::vector<std::size_t> keep;
    for (std::size_t i = 0; i < n; ++i) {
        if (!fixed.contains(i)) {
            keep.push_back(i);
        }
    }
    if (keep.empty()) {
        throw ValidationError("every DOF is fixed");
    }
    FemSystem out;
    out.k = HermitianOperator::from_dense(
        restrict_dense(system.k.to_dense_real(), keep));
    if (system.m) {
        out.m = HermitianOperator::from_dense(
            restrict_dense(system.m->to_dense_real(), keep));
    }
    if (system.f) {
        RVector f(static_cast<Eigen::Index>(keep.size()));
        for (std::size_t i = 0; i < keep.size(); ++i) {
            f[static_cast<Eigen::Index>(i)] =
                (*system.f)[static_cast<Eigen::Index>(keep[i])];
        }
        out.f = f;
    }
    out.dofs.reserve(keep.size());
    for (std::size_t i : keep) {
        out.dofs.push_back(system.dofs[i]);
    }
    return out;
}

std::vector<std::size_t> clamped_ends(const Mesh2DGrid &mesh) {
    mesh.validate();
    std::vector<std::size_t> nodes;
    for (std::size_t jy = 0; jy < mesh.ny; ++jy) {
        nodes.push_back(mesh.node(0, jy));
    }
    for (std::size_t jy = 0; jy < mesh.ny; ++jy) {
        nodes.push_back(mesh.node(mesh.nx - 1, jy));
    }
    return nodes;
}

FemSystem beam_system(const Mesh2DGrid &mesh, const Material &mat,
                      PlaneModel model) {
    return apply_dirichlet(assemble_elasticity_2d(mesh, mat, model),
                           clamped_ends(mesh), 2);
}

BasisMapping dof_to_basis_map(const FemSystem &system, PaddingRegime regime,
                              std::optional<double> pad_eps) {
    if (!system.m) {
        throw ValidationError("dof_to_basis_map needs a mass matrix");
    }
    BasisMapping out{{}, ceil_log2(system.dim()),
                     pad_to_power_of_two(system.k, *system.m, regime, pad_eps)};
    out.basis_of_dof.resize(system.dim());
    for (std::size_t r = 0; r < system.dim(); ++r) {
        out.basis_of_dof[r] = r;
    }
    return out;
}

} // namespace vqgep

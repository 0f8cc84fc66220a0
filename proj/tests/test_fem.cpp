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

#include "vqgep/fem.hpp"
#include "vqgep/statevector.hpp"

using namespace vqgep;

namespace {

// Plane-stress stiffness of one W x H rectangle, written in strain-matrix
// form with its own 3x3 Gauss rule and node coordinates taken from the
// global numbering j = 2 jx + jy.
RMatrix element_stiffness_bdb(double w, double h, const Material &m) {
    const double c = m.young / (1.0 - m.poisson * m.poisson);
    Eigen::Matrix3d d;
    d << c, c * m.poisson, 0, c * m.poisson, c, 0, 0, 0,
        c * (1.0 - m.poisson) / 2.0;
    const double gx[3] = {-std::sqrt(0.6), 0.0, std::sqrt(0.6)};
    const double gw[3] = {5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0};
    RMatrix k = RMatrix::Zero(8, 8);
    for (int a = 0; a < 3; ++a) {
        for (int b = 0; b < 3; ++b) {
            const double x = w * (gx[a] + 1.0) / 2.0;
            const double y = h * (gx[b] + 1.0) / 2.0;
            Eigen::Matrix<double, 3, 8> bm = Eigen::Matrix<double, 3, 8>::Zero();
            for (int j = 0; j < 4; ++j) {
                const int jx = j / 2;
                const int jy = j % 2;
                const double fx = jx ? x / w : 1.0 - x / w;
                const double fy = jy ? y / h : 1.0 - y / h;
                const double dx = (jx ? 1.0 : -1.0) / w * fy;
                const double dy = (jy ? 1.0 : -1.0) / h * fx;
                bm(0, 2 * j) = dx;
                bm(1, 2 * j + 1) = dy;
                bm(2, 2 * j) = dy;
                bm(2, 2 * j + 1) = dx;
            }
            k += gw[a] * gw[b] * (w * h / 4.0) * bm.transpose() * d * bm;
        }
    }
    return k;
}

double pencil_min(const RMatrix &k, const RMatrix &m) {
    Eigen::GeneralizedSelfAdjointEigenSolver<RMatrix> es(k, m);
    return es.eigenvalues()[0];
}

} // namespace

TEST_SUITE("fem") {

TEST_CASE("1D Poisson stiffness") {
    const auto k = assemble_poisson_1d(Mesh1D{3, 1.0}).k.to_dense_real();
    RMatrix expect(3, 3);
    expect << 2, -1, 0, -1, 2, -1, 0, -1, 2;
    CHECK((k - expect).norm() == 0.0);
    CHECK(assemble_poisson_1d(Mesh1D{1, 0.5}).k.to_dense_real()(0, 0) == 4.0);
    const auto big = assemble_poisson_1d(Mesh1D::unit_interval(32));
    CHECK(big.k.bandwidth() == 1);
    Eigen::SelfAdjointEigenSolver<RMatrix> es(big.k.to_dense_real());
    CHECK(es.eigenvalues()[0] > 0.0);
    CHECK_THROWS_AS((void)assemble_poisson_1d(Mesh1D{0, 1.0}), ValidationError);
}

TEST_CASE("Poisson load normalization") {
    const auto step = assemble_poisson_load(step_samples(32));
    const auto psi = prepare_step_state(5);
    for (Eigen::Index i = 0; i < 32; ++i) {
        CHECK(step[i] == doctest::Approx(psi[static_cast<std::size_t>(i)].real()));
    }
    const std::vector<double> ones(16, 3.0);
    const auto u = assemble_poisson_load(ones);
    CHECK(u[5] == doctest::Approx(0.25));
    const std::vector<double> single{0.0, -2.0, 0.0};
    CHECK(assemble_poisson_load(single)[1] == doctest::Approx(-1.0));
    const std::vector<double> zeros(4, 0.0);
    CHECK_THROWS_AS((void)assemble_poisson_load(zeros), ValidationError);
}

TEST_CASE("single element matches the strain-matrix form") {
    const Material steel = Material::steel();
    const Mesh2DGrid mesh{2, 2, 0.7, 0.3};
    const auto sys = assemble_elasticity_2d(mesh, steel);
    const RMatrix k = sys.k.to_dense_real();
    const RMatrix ref = element_stiffness_bdb(0.7, 0.3, steel);
    CHECK((k - ref).norm() < 1e-9 * ref.norm());
}

TEST_CASE("rigid translation and mass consistency") {
    const Mesh2DGrid mesh{5, 3, 1.2, 0.4};
    const Material mat{70e9, 0.33, 2700.0};
    const auto sys = assemble_elasticity_2d(mesh, mat);
    const RMatrix k = sys.k.to_dense_real();
    const RMatrix m = sys.m->to_dense_real();
    RVector ux = RVector::Zero(k.rows());
    for (Eigen::Index i = 0; i < k.rows(); i += 2) {
        ux[i] = 1.0;
    }
    CHECK((k * ux).norm() < 1e-9 * k.norm());
    CHECK(ux.dot(m * ux) == doctest::Approx(2700.0 * 1.2 * 0.4).epsilon(1e-12));
    CHECK((k - k.transpose()).norm() <= 1e-12 * k.norm());
    Eigen::SelfAdjointEigenSolver<RMatrix> es(m);
    CHECK(es.eigenvalues()[0] > 0.0);
}

TEST_CASE("3x3 Gauss leaves the bilinear mass matrix unchanged") {
    const Mesh2DGrid mesh{4, 3, 1.0, 0.5};
    const auto m2 = assemble_elasticity_2d(mesh, Material::steel(),
                                           PlaneModel::Stress, 2);
    const auto m3 = assemble_elasticity_2d(mesh, Material::steel(),
                                           PlaneModel::Stress, 3);
    const RMatrix a = m2.m->to_dense_real();
    const RMatrix b = m3.m->to_dense_real();
    CHECK((a - b).norm() < 1e-12 * a.norm());
    CHECK_THROWS_AS((void)assemble_elasticity_2d(mesh, Material::steel(),
                                                 PlaneModel::Stress, 4),
                    ValidationError);
}

TEST_CASE("Lame parameters") {
    const auto [ls, mus] = lame_parameters(Material::steel(), PlaneModel::Stress);
    const auto [le, mue] = lame_parameters(Material::steel(), PlaneModel::Strain);
    CHECK(mus == doctest::Approx(200e9 / 2.6));
    CHECK(mue == mus);
    CHECK(ls == doctest::Approx(200e9 * 0.3 / 0.91));
    CHECK(le == doctest::Approx(200e9 * 0.3 / (1.3 * 0.4)));
    CHECK_THROWS_AS((Material{1.0, 0.5, 1.0}.validate()), ValidationError);
    CHECK_THROWS_AS((Material{-1.0, 0.2, 1.0}.validate()), ValidationError);
}

TEST_CASE("beam elimination and spectrum") {
    const Mesh2DGrid mesh{18, 4, 1.0, 3.0 / 17.0};
    const auto sys = beam_system(mesh, Material::steel());
    CHECK(sys.dim() == 128);
    CHECK(sys.dofs.front() == 8);
    CHECK(sys.dofs.back() == 2 * 17 * 4 - 1);
    CHECK(sys.k.bandwidth() <= 2 * (4 + 1) + 1);
    CHECK(sys.m->bandwidth() <= 2 * (4 + 1) + 1);
    const RMatrix k = sys.k.to_dense_real();
    const RMatrix m = sys.m->to_dense_real();
    Eigen::SelfAdjointEigenSolver<RMatrix> ek(k);
    CHECK(ek.eigenvalues()[0] > 0.0);
    const double lam = pencil_min(k, m);
    CHECK(lam == doctest::Approx(2.55e7).epsilon(0.02));
    const auto strain = beam_system(mesh, Material::steel(), PlaneModel::Strain);
    CHECK(pencil_min(strain.k.to_dense_real(), strain.m->to_dense_real()) > lam);
    const auto map = dof_to_basis_map(sys);
    CHECK(map.n_qubits == 7);
    CHECK(map.pencil.a.dim() == 128);
    CHECK(map.basis_of_dof[17] == 17);
}

TEST_CASE("Dirichlet elimination edge cases") {
    const Mesh2DGrid mesh{2, 2, 1.0, 1.0};
    const auto sys = assemble_elasticity_2d(mesh, Material::steel());
    const auto same = apply_dirichlet(sys, {}, 2);
    CHECK(same.dim() == sys.dim());
    CHECK_THROWS_AS((void)apply_dirichlet(sys, {0, 1, 2, 3}, 2), ValidationError);
    CHECK_THROWS_AS((void)apply_dirichlet(sys, {4}, 2), ValidationError);
    const auto reduced = apply_dirichlet(sys, {0}, 2);
    CHECK(reduced.dim() == 6);
    CHECK(reduced.dofs == std::vector<std::size_t>{2, 3, 4, 5, 6, 7});
}

TEST_CASE("non power-of-two systems are padded") {
    const Mesh2DGrid mesh{3, 3, 1.0, 1.0};
    const auto sys = apply_dirichlet(
        assemble_elasticity_2d(mesh, Material::steel()), {0, 1, 2}, 2);
    const auto map = dof_to_basis_map(sys);
    CHECK(map.pencil.a.dim() == 16);
    CHECK(map.pencil.original_dim == 12);
    CHECK(pencil_min(map.pencil.a.to_dense_real(), map.pencil.b.to_dense_real()) ==
          doctest::Approx(pencil_min(sys.k.to_dense_real(),
                                     sys.m->to_dense_real()))
              .epsilon(1e-10));
}

} // TEST_SUITE

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

#include "vqgep/seqopt.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <numeric>
#include <ostream>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <Eigen/SVD>

namespace vqgep {

namespace {

constexpr std::array<std::array<int, 2>, 6> kOffDiagonal{
    {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}}};

Eigen::Matrix<double, 1, 10> design_row(const Eigen::Vector4d &q) {
    Eigen::Matrix<double, 1, 10> row;
    for (int i = 0; i < 4; ++i) {
        row[i] = q[i] * q[i];
    }
    for (int k = 0; k < 6; ++k) {
        const auto [i, j] = kOffDiagonal[static_cast<std::size_t>(k)];
        row[4 + k] = 2.0 * q[i] * q[j];
    }
    return row;
}

struct SmallSolution {
    double lambda;
    Eigen::VectorXd p;
};

// Extremal eigenpair of a x = lambda b x with b positive definite.
SmallSolution solve_small_gep(const Eigen::MatrixXd &a,
                              const Eigen::MatrixXd &b, Sense sense,
                              const Eigen::VectorXd *current) {
    Eigen::LLT<Eigen::MatrixXd> llt(b);
    if (llt.info() != Eigen::Success) {
        throw NumericalError("S_B is not positive definite after "
                             "regularization; increase the regularization");
    }
    const Eigen::MatrixXd l = llt.matrixL();
    Eigen::MatrixXd c = l.triangularView<Eigen::Lower>().solve(a);
    c = l.triangularView<Eigen::Lower>().solve(c.transpose()).transpose();
    c = 0.5 * (c + c.transpose()).eval();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(c);
    if (es.info() != Eigen::Success) {
        throw NumericalError("symmetric eigensolver failed");
    }
    const Eigen::VectorXd &w = es.eigenvalues();
    const Eigen::Index m = w.size();
    const Eigen::Index pick = sense == Sense::Minimize ? 0 : m - 1;
    const double lambda = w[pick];
    if (!std::isfinite(lambda)) {
        return {lambda, Eigen::VectorXd::Zero(m)};
    }
    // p = L^{-T} y, B-orthonormal.
    auto back = [&](const Eigen::VectorXd &y) -> Eigen::VectorXd {
        return l.transpose().triangularView<Eigen::Upper>().solve(y);
    };
    Eigen::VectorXd p = back(es.eigenvectors().col(pick));
    if (current != nullptr) {
        const double tol = 1e-10 * std::max(1.0, std::abs(lambda));
        std::vector<Eigen::VectorXd> space;
        for (Eigen::Index i = 0; i < m; ++i) {
            if (std::abs(w[i] - lambda) <= tol) {
                space.push_back(back(es.eigenvectors().col(i)));
            }
        }
        if (space.size() > 1) {
            // B-orthogonal projection of the current point onto the
            // degenerate eigenspace.
            Eigen::VectorXd proj = Eigen::VectorXd::Zero(m);
            const Eigen::VectorXd bc = b * (*current);
            for (const auto &v : space) {
                proj += v.dot(bc) * v;
            }
            if (proj.norm() > 1e-12) {
                p = proj;
            }
        }
    }
    p.normalize();
    Eigen::Index big = 0;
    p.cwiseAbs().maxCoeff(&big);
    if (p[big] < 0.0) {
        p = -p;
    }
    return {lambda, p};
}

GateUpdate solve_in_subspace(const SMatrixPair &pair,
                             const Eigen::MatrixXd &basis, Sense sense,
                             const GateQuaternion &current) {
    const Eigen::MatrixXd a = basis.transpose() * pair.a * basis;
    const Eigen::MatrixXd b = basis.transpose() * pair.b * basis;
    const Eigen::VectorXd coords = basis.transpose() * current.vec();
    const auto sol = solve_small_gep(a, b, sense, &coords);
    if (!std::isfinite(sol.lambda)) {
        throw NumericalError("non-finite eigenvalue in gate update");
    }
    Eigen::Vector4d q = basis * sol.p;
    Eigen::Index big = 0;
    q.cwiseAbs().maxCoeff(&big);
    if (q[big] < 0.0) {
        q = -q;
    }
    return {sol.lambda, GateQuaternion::normalized(q)};
}

bool better(double candidate, double incumbent, Sense sense) {
    return sense == Sense::Minimize ? candidate < incumbent
                                    : candidate > incumbent;
}

} // namespace

ParameterConfiguration::ParameterConfiguration(
    std::array<GateQuaternion, 10> points)
    : points_(points) {
    for (std::size_t k = 0; k < 10; ++k) {
        design_.row(static_cast<Eigen::Index>(k)) = design_row(points_[k].vec());
    }
    Eigen::FullPivLU<Matrix10> lu(design_);
    if (!lu.isInvertible()) {
        throw ValidationError("parameter configuration does not determine S");
    }
    reconstruction_ = lu.inverse();
}

double ParameterConfiguration::condition_number() const {
    Eigen::JacobiSVD<Matrix10> svd(design_);
    const auto &s = svd.singularValues();
    return s[0] / s[9];
}

Matrix4 ParameterConfiguration::reconstruct(const Vector10 &values) const {
    const Vector10 free = reconstruction_ * values;
    Matrix4 s;
    for (int i = 0; i < 4; ++i) {
        s(i, i) = free[i];
    }
    for (int k = 0; k < 6; ++k) {
        const auto [i, j] = kOffDiagonal[static_cast<std::size_t>(k)];
        s(i, j) = free[4 + k];
        s(j, i) = free[4 + k];
    }
    return s;
}

const ParameterConfiguration &default_configuration() {
    static const ParameterConfiguration config = [] {
        std::array<GateQuaternion, 10> pts;
        for (int i = 0; i < 4; ++i) {
            pts[static_cast<std::size_t>(i)] =
                GateQuaternion(Eigen::Vector4d::Unit(i));
        }
        const double r = 1.0 / std::numbers::sqrt2;
        for (int k = 0; k < 6; ++k) {
            const auto [i, j] = kOffDiagonal[static_cast<std::size_t>(k)];
            Eigen::Vector4d q = Eigen::Vector4d::Zero();
            q[i] = r;
            q[j] = r;
            pts[static_cast<std::size_t>(4 + k)] = GateQuaternion(q);
        }
        return ParameterConfiguration(pts);
    }();
    return config;
}

SMatrixPair build_s_pair(const GateEvaluator &evaluator,
                         const ParameterConfiguration &config) {
    Vector10 va, vb;
    for (std::size_t k = 0; k < 10; ++k) {
        const auto e = evaluator(config.points()[k]);
        va[static_cast<Eigen::Index>(k)] = e.a;
        vb[static_cast<Eigen::Index>(k)] = e.b;
    }
    return {config.reconstruct(va), config.reconstruct(vb)};
}

double default_regularization(const Matrix4 &s_b) {
    const double inf_norm = s_b.cwiseAbs().rowwise().sum().maxCoeff();
    return 1e-8 * std::max(1.0, inf_norm);
}

Matrix4 regularize_sb(const Matrix4 &s_b, double eps) {
    if (!(eps > 0.0)) {
        throw ValidationError("regularization eps must be positive");
    }
    Eigen::SelfAdjointEigenSolver<Matrix4> es(s_b, Eigen::EigenvaluesOnly);
    const double beta_min = es.eigenvalues()[0];
    if (beta_min < 0.0) {
        return s_b + (eps - beta_min) * Matrix4::Identity();
    }
    return s_b;
}

GateUpdate solve_gate_gep(const SMatrixPair &pair, Sense sense,
                          std::optional<double> eps,
                          const GateQuaternion *current) {
    const double e = eps.value_or(default_regularization(pair.b));
    const SMatrixPair reg{pair.a, regularize_sb(pair.b, e)};
    Eigen::VectorXd cur;
    if (current != nullptr) {
        cur = current->vec();
    }
    const auto sol = solve_small_gep(reg.a, reg.b, sense,
                                     current != nullptr ? &cur : nullptr);
    if (!std::isfinite(sol.lambda)) {
        throw NumericalError("non-finite eigenvalue in gate update");
    }
    return {sol.lambda, GateQuaternion::normalized(sol.p)};
}

OptimizerKind OptimizerKind::nft(const std::array<double, 3> &axis) {
    const double nrm =
        std::sqrt(axis[0] * axis[0] + axis[1] * axis[1] + axis[2] * axis[2]);
    if (std::abs(nrm - 1.0) > 1e-9) {
        throw ValidationError("NFT axis must be a unit vector");
    }
    return {Type::NFT, axis};
}

GateUpdate restrict_update(const SMatrixPair &pair, const OptimizerKind &kind,
                           const GateQuaternion &current, Sense sense,
                           std::optional<double> eps) {
    if (kind.type == OptimizerKind::Type::FQS) {
        return solve_gate_gep(pair, sense, eps, &current);
    }
    const double e = eps.value_or(default_regularization(pair.b));
    const SMatrixPair reg{pair.a, regularize_sb(pair.b, e)};
    auto nft_basis = [](const std::array<double, 3> &n) {
        Eigen::MatrixXd v = Eigen::MatrixXd::Zero(4, 2);
        v(0, 0) = 1.0;
        v(1, 1) = n[0];
        v(2, 1) = n[1];
        v(3, 1) = n[2];
        return v;
    };
    switch (kind.type) {
    case OptimizerKind::Type::Fraxis: {
        Eigen::MatrixXd v = Eigen::MatrixXd::Zero(4, 3);
        v.bottomRows(3) = Eigen::Matrix3d::Identity();
        return solve_in_subspace(reg, v, sense, current);
    }
    case OptimizerKind::Type::NFT:
        return solve_in_subspace(reg, nft_basis(kind.axis), sense, current);
    case OptimizerKind::Type::Rotoselect: {
        std::optional<GateUpdate> best;
        for (const auto &axis : {std::array<double, 3>{1.0, 0.0, 0.0},
                                 std::array<double, 3>{0.0, 1.0, 0.0},
                                 std::array<double, 3>{0.0, 0.0, 1.0}}) {
            const auto upd =
                solve_in_subspace(reg, nft_basis(axis), sense, current);
            if (!best || better(upd.lambda, best->lambda, sense)) {
                best = upd;
            }
        }
        return *best;
    }
    case OptimizerKind::Type::FQS:
        break;
    }
    return solve_gate_gep(pair, sense, eps, &current);
}

std::vector<GateQuaternion> init_params(InitStrategy strategy,
                                        const CircuitLayout &layout,
                                        Rng &rng) {
    std::uniform_real_distribution<double> angle(0.0,
                                                 2.0 * std::numbers::pi);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_int_distribution<int> pick_axis(0, 2);
    std::vector<GateQuaternion> out;
    out.reserve(layout.gate_count());
    for (std::size_t d = 0; d < layout.gate_count(); ++d) {
        switch (strategy) {
        case InitStrategy::RealSpace:
        case InitStrategy::NftRandom:
            out.push_back(GateQuaternion::from_angle_axis(angle(rng),
                                                          {0.0, 1.0, 0.0}));
            break;
        case InitStrategy::ComplexSpace: {
            Eigen::Vector4d v;
            do {
                for (int i = 0; i < 4; ++i) {
                    v[i] = gauss(rng);
                }
            } while (v.norm() < 1e-12);
            out.push_back(GateQuaternion::normalized(v));
            break;
        }
        case InitStrategy::FraxisRandom: {
            Eigen::Vector4d v = Eigen::Vector4d::Zero();
            do {
                for (int i = 1; i < 4; ++i) {
                    v[i] = gauss(rng);
                }
            } while (v.norm() < 1e-12);
            out.push_back(GateQuaternion::normalized(v));
            break;
        }
        case InitStrategy::DiscreteAxisRandom: {
            std::array<double, 3> axis{0.0, 0.0, 0.0};
            axis[static_cast<std::size_t>(pick_axis(rng))] = 1.0;
            out.push_back(GateQuaternion::from_angle_axis(angle(rng), axis));
            break;
        }
        }
    }
    return out;
}

ExpectationBackend::ExpectationBackend(const GEProblem &problem,
                                       StateVector initial)
    : problem_(&problem), initial_(std::move(initial)) {
    if (initial_.dim() != problem.dim()) {
        throw ValidationError("initial state does not match the problem "
                              "dimension");
    }
}

GateEvaluator ExactBackend::gate_evaluator(
    const CircuitLayout &layout, std::span<const GateQuaternion> params,
    std::size_t d) {
    auto ctx = std::make_shared<const GateContext>(layout, params, d, initial_);
    const GEProblem *problem = problem_;
    return [ctx, problem](const GateQuaternion &q) {
        const StateVector s = ctx->state_with(q);
        return ExpectationPair{problem->a().expectation(s),
                               problem->b_observable().expectation(s)};
    };
}

SampledBackend::SampledBackend(const GEProblem &problem, StateVector initial,
                               std::uint64_t shots, Rng rng)
    : ExpectationBackend(problem, std::move(initial)), shots_(shots),
      rng_(rng) {
    ShotPlan{shots, 0}.validate();
}

GateEvaluator SampledBackend::gate_evaluator(
    const CircuitLayout &layout, std::span<const GateQuaternion> params,
    std::size_t d) {
    auto ctx = std::make_shared<const GateContext>(layout, params, d, initial_);
    const GEProblem *problem = problem_;
    Rng *rng = &rng_;
    const std::uint64_t shots = shots_;
    return [ctx, problem, rng, shots](const GateQuaternion &q) {
        const StateVector s = ctx->state_with(q);
        const double a = problem->a().expectation(s, shots, *rng);
        const double b = problem->b_observable().expectation(s, shots, *rng);
        return ExpectationPair{a, b};
    };
}

OptimizeTrace sequential_optimize(ExpectationBackend &backend,
                                  const CircuitLayout &layout,
                                  std::vector<GateQuaternion> params0,
                                  const OptimizeOptions &options) {
    if (params0.size() != layout.gate_count()) {
        throw ValidationError("expected " +
                              std::to_string(layout.gate_count()) +
                              " initial parameters, got " +
                              std::to_string(params0.size()));
    }
    if (!(options.eps_tol > 0.0)) {
        throw ValidationError("eps_tol must be positive");
    }
    const GEProblem &problem = backend.problem();
    const Sense sense = problem.sense();
    const ParameterConfiguration &config =
        options.config != nullptr ? *options.config : default_configuration();

    OptimizeTrace trace;
    trace.params = std::move(params0);
    auto observe = [&](std::optional<double> &objective,
                       std::optional<double> &metric) {
        if (!options.track_exact && !options.state_metric) {
            return;
        }
        const StateVector s =
            run_circuit(layout, trace.params, backend.initial());
        if (options.track_exact) {
            objective = problem.objective(s);
        }
        if (options.state_metric) {
            metric = options.state_metric(s);
        }
    };
    observe(trace.initial_objective, trace.initial_metric);

    std::vector<std::size_t> order(layout.gate_count());
    std::iota(order.begin(), order.end(), std::size_t{0});
    Rng perm_rng(options.seed);

    double f_curr = 0.0;
    double f_prev = 0.0;
    double eps = 1.0;
    std::size_t evaluations = 0;
    for (std::size_t iter = 1; iter <= options.max_iters; ++iter) {
        if (options.order == SweepOrder::RandomPermutation) {
            std::shuffle(order.begin(), order.end(), perm_rng);
        }
        for (std::size_t d : order) {
            const GateEvaluator eval =
                backend.gate_evaluator(layout, trace.params, d);
            const SMatrixPair pair = build_s_pair(eval, config);
            evaluations += 10;
            GateUpdate upd{0.0, GateQuaternion()};
            try {
                upd = restrict_update(pair, options.kind, trace.params[d],
                                      sense, options.reg_eps);
            } catch (const NumericalError &e) {
                throw OptimizationError(e.what(), trace);
            }
            if (options.on_update) {
                options.on_update(d, pair, trace.params[d], upd);
            }
            trace.params[d] = upd.q;
            f_prev = f_curr;
            f_curr = upd.lambda;
            eps = f_prev == 0.0 ? std::numeric_limits<double>::infinity()
                                : std::abs(f_curr - f_prev) / std::abs(f_prev);
            UpdateRecord rec{iter, d, upd.lambda, std::nullopt, std::nullopt,
                             evaluations};
            observe(rec.exact_objective, rec.metric);
            trace.records.push_back(rec);
        }
        trace.iterations = iter;
        if (eps < options.eps_tol) {
            trace.converged = true;
            break;
        }
    }
    return trace;
}

void write_trace_csv(std::ostream &os, const OptimizeTrace &trace) {
    auto fmt = [](std::optional<double> v) -> std::string {
        if (!v) {
            return {};
        }
        char buf[40];
        std::snprintf(buf, sizeof(buf), "%.17g", *v);
        return buf;
    };
    os << "iteration,gate_index,lambda,exact_objective,distance_metric\n";
    for (const auto &r : trace.records) {
        os << r.iteration << ',' << r.gate << ',' << fmt(r.lambda) << ','
           << fmt(r.exact_objective) << ',' << fmt(r.metric) << '\n';
    }
}

} // namespace vqgep

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

#include "vqgep/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <ostream>

namespace vqgep {

double real_space_distance(const CVector &amplitudes) {
    double rr = 0.0;
    double ri = 0.0;
    double ii = 0.0;
    for (Eigen::Index k = 0; k < amplitudes.size(); ++k) {
        const double r = amplitudes[k].real();
        const double c = amplitudes[k].imag();
        rr += r * r;
        ri += r * c;
        ii += c * c;
    }
    const double tr = rr + ii;
    if (tr <= 0.0) {
        return 0.0;
    }
    // Closed-form 2x2 eigenvalues; mu2 = tr/2 - sqrt(...) can round below 0.
    const double half = 0.5 * (rr - ii);
    const double disc = std::sqrt(half * half + ri * ri);
    const double mu2 = std::max(0.0, 0.5 * tr - disc);
    return mu2 / tr;
}

double real_space_distance(const StateVector &state) {
    return real_space_distance(state.amplitudes());
}

double solution_fidelity(const CVector &state, const CVector &reference) {
    if (state.size() != reference.size()) {
        throw ValidationError("fidelity: dimension mismatch");
    }
    const double rn = reference.norm();
    const double sn = state.norm();
    if (!(rn > 0.0) || !(sn > 0.0)) {
        throw ValidationError("fidelity: zero vector");
    }
    return std::norm(reference.dot(state)) / (rn * rn * sn * sn);
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

std::vector<BiasRow> bias_study(const GEProblem &problem,
                                const CircuitLayout &layout,
                                std::span<const GateQuaternion> params,
                                std::size_t d,
                                const BiasStudyOptions &options) {
    if (options.repeats < 2) {
        throw ValidationError("bias_study needs at least two repeats");
    }
    if (options.shot_grid.empty()) {
        throw ValidationError("bias_study needs a non-empty shot grid");
    }
    const StateVector initial(problem.n_qubits());
    const ParameterConfiguration &config = default_configuration();
    ExactBackend exact(problem, initial);
    const GateQuaternion &current = params[d];
    const double exact_lambda =
        solve_gate_gep(build_s_pair(exact.gate_evaluator(layout, params, d),
                                    config),
                       problem.sense(), options.reg_eps, &current)
            .lambda;

    std::vector<BiasRow> rows;
    for (std::size_t g = 0; g < options.shot_grid.size(); ++g) {
        const std::uint64_t shots = options.shot_grid[g];
        std::vector<double> samples;
        samples.reserve(options.repeats);
        for (std::size_t r = 0; r < options.repeats; ++r) {
            const std::uint64_t stream = (static_cast<std::uint64_t>(g) << 32) |
                                         static_cast<std::uint64_t>(r);
            SampledBackend backend(problem, initial, shots,
                                   Rng(derive_seed(options.seed, stream)));
            const SMatrixPair pair =
                build_s_pair(backend.gate_evaluator(layout, params, d), config);
            samples.push_back(
                solve_gate_gep(pair, problem.sense(), options.reg_eps, &current)
                    .lambda);
        }
        const double n = static_cast<double>(samples.size());
        const double mean =
            std::accumulate(samples.begin(), samples.end(), 0.0) / n;
        double ss = 0.0;
        for (double s : samples) {
            ss += (s - mean) * (s - mean);
        }
        rows.push_back({shots, mean, std::sqrt(ss / (n - 1.0)), exact_lambda,
                        mean - exact_lambda});
    }
    return rows;
}

double loglog_slope(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 2) {
        throw ValidationError("loglog_slope needs two or more paired points");
    }
    const auto n = static_cast<double>(x.size());
    double sx = 0.0;
    double sy = 0.0;
    double sxx = 0.0;
    double sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double lx = std::log(x[i]);
        const double ly = std::log(std::abs(y[i]));
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

void write_bias_csv(std::ostream &os, const std::vector<BiasRow> &rows) {
    os << "shots,mean_lambda,std_lambda,exact_lambda,bias\n";
    char buf[160];
    for (const auto &r : rows) {
        std::snprintf(buf, sizeof(buf), "%llu,%.17g,%.17g,%.17g,%.17g\n",
                      static_cast<unsigned long long>(r.shots), r.mean,
                      r.stddev, r.exact, r.bias);
        os << buf;
    }
}

std::vector<std::vector<double>>
pad_trajectories(const std::vector<std::vector<double>> &series) {
    std::size_t len = 0;
    for (const auto &s : series) {
        len = std::max(len, s.size());
    }
    auto out = series;
    for (auto &s : out) {
        if (!s.empty()) {
            s.resize(len, s.back());
        }
    }
    return out;
}

double percentile(std::vector<double> values, double p) {
    if (values.empty()) {
        throw ValidationError("percentile of an empty set");
    }
    if (!(p >= 0.0 && p <= 100.0)) {
        throw ValidationError("percentile must lie in [0, 100]");
    }
    std::sort(values.begin(), values.end());
    const double pos = p / 100.0 * static_cast<double>(values.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, values.size() - 1);
    const double t = pos - static_cast<double>(lo);
    return values[lo] + t * (values[hi] - values[lo]);
}

TrajectoryBand trajectory_band(const std::vector<std::vector<double>> &series) {
    const auto padded = pad_trajectories(series);
    TrajectoryBand band;
    std::size_t len = 0;
    for (const auto &s : padded) {
        len = std::max(len, s.size());
    }
    for (std::size_t t = 0; t < len; ++t) {
        std::vector<double> col;
        for (const auto &s : padded) {
            if (!s.empty()) {
                col.push_back(s[t]);
            }
        }
        band.median.push_back(percentile(col, 50.0));
        band.p25.push_back(percentile(col, 25.0));
        band.p75.push_back(percentile(col, 75.0));
    }
    return band;
}

} // namespace vqgep

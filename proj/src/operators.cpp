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

#include "vqgep/operators.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <numbers>
#include <ostream>
#include <set>
#include <sstream>

namespace vqgep {

HermitianOperator::HermitianOperator(std::size_t dim,
                                     std::map<std::size_t, CVector> upper)
    : dim_(dim), diags_(std::move(upper)) {
    if (dim_ == 0) {
        throw ValidationError("operator dimension must be positive");
    }
    for (const auto &[k, d] : diags_) {
        if (k >= dim_ || static_cast<std::size_t>(d.size()) != dim_ - k) {
            throw ValidationError("diagonal " + std::to_string(k) +
                                  " has the wrong length");
        }
    }
    if (auto it = diags_.find(0); it != diags_.end()) {
        const double scale = std::max(1.0, it->second.cwiseAbs().maxCoeff());
        for (Eigen::Index i = 0; i < it->second.size(); ++i) {
            if (std::abs(it->second[i].imag()) > kHermitianTolerance * scale) {
                throw ValidationError("main diagonal of a Hermitian operator "
                                      "must be real");
            }
            it->second[i] = it->second[i].real();
        }
    }
}

HermitianOperator HermitianOperator::from_dense(const CMatrix &m,
                                                double drop_tol) {
    if (m.rows() != m.cols() || m.rows() == 0) {
        throw ValidationError("operator matrix must be square and non-empty");
    }
    const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
    if ((m - m.adjoint()).cwiseAbs().maxCoeff() >
        kHermitianTolerance * scale) {
        throw ValidationError("matrix is not Hermitian");
    }
    const auto n = static_cast<std::size_t>(m.rows());
    std::map<std::size_t, CVector> diags;
    for (std::size_t k = 0; k < n; ++k) {
        CVector d(static_cast<Eigen::Index>(n - k));
        bool nonzero = false;
        for (std::size_t i = 0; i + k < n; ++i) {
            // Average the two triangles so the stored band is exactly
            // Hermitian.
            const auto r = static_cast<Eigen::Index>(i);
            const auto c = static_cast<Eigen::Index>(i + k);
            Complex v = 0.5 * (m(r, c) + std::conj(m(c, r)));
            if (std::abs(v) <= drop_tol) {
                v = 0.0;
            }
            nonzero = nonzero || v != Complex(0.0);
            d[r] = v;
        }
        if (nonzero || k == 0) {
            diags.emplace(k, std::move(d));
        }
    }
    return HermitianOperator(n, std::move(diags));
}

HermitianOperator HermitianOperator::from_dense(const RMatrix &m,
                                                double drop_tol) {
    return from_dense(CMatrix(m.cast<Complex>()), drop_tol);
}

HermitianOperator HermitianOperator::identity(std::size_t dim) {
    return diagonal(RVector::Ones(static_cast<Eigen::Index>(dim)));
}

HermitianOperator HermitianOperator::diagonal(const RVector &d) {
    std::map<std::size_t, CVector> diags;
    diags.emplace(0, d.cast<Complex>());
    return HermitianOperator(static_cast<std::size_t>(d.size()),
                             std::move(diags));
}

std::size_t HermitianOperator::bandwidth() const noexcept {
    std::size_t k = 0;
    for (const auto &[off, d] : diags_) {
        if (d.cwiseAbs().maxCoeff() > 0.0) {
            k = std::max(k, off);
        }
    }
    return k;
}

Complex HermitianOperator::entry(std::size_t i, std::size_t j) const {
    if (i >= dim_ || j >= dim_) {
        throw IndexError("operator entry out of range");
    }
    const bool upper = j >= i;
    const std::size_t k = upper ? j - i : i - j;
    auto it = diags_.find(k);
    if (it == diags_.end()) {
        return 0.0;
    }
    const Complex v = it->second[static_cast<Eigen::Index>(upper ? i : j)];
    return upper ? v : std::conj(v);
}

bool HermitianOperator::is_real(double tol) const {
    for (const auto &[k, d] : diags_) {
        if (d.imag().cwiseAbs().maxCoeff() > tol) {
            return false;
        }
    }
    return true;
}

CVector HermitianOperator::apply(const CVector &x) const {
    if (static_cast<std::size_t>(x.size()) != dim_) {
        throw ValidationError("operator/vector dimension mismatch");
    }
    CVector y = CVector::Zero(x.size());
    for (const auto &[k, d] : diags_) {
        const Eigen::Index len = d.size();
        if (k == 0) {
            y += d.cwiseProduct(x);
            continue;
        }
        y.head(len) += d.cwiseProduct(x.tail(len));
        y.tail(len) += d.conjugate().cwiseProduct(x.head(len));
    }
    return y;
}

CMatrix HermitianOperator::to_dense() const {
    const auto n = static_cast<Eigen::Index>(dim_);
    CMatrix m = CMatrix::Zero(n, n);
    for (const auto &[k, d] : diags_) {
        const auto kk = static_cast<Eigen::Index>(k);
        for (Eigen::Index i = 0; i < d.size(); ++i) {
            m(i, i + kk) = d[i];
            m(i + kk, i) = std::conj(d[i]);
        }
    }
    return m;
}

RMatrix HermitianOperator::to_dense_real() const { return to_dense().real(); }

double expectation_exact(const HermitianOperator &op,
                         const StateVector &state) {
    if (op.dim() != state.dim()) {
        throw ValidationError("operator/state dimension mismatch");
    }
    return state.amplitudes().dot(op.apply(state.amplitudes())).real();
}

double expectation_with_gate(const CircuitLayout &layout,
                             std::span<const GateQuaternion> params,
                             std::size_t d, const GateQuaternion &q,
                             const HermitianOperator &op,
                             const StateVector &initial) {
    const GateContext ctx(layout, params, d, initial);
    return expectation_exact(op, ctx.state_with(q));
}

StatePreparer::StatePreparer(StateVector target, InverseAction inverse)
    : target_(std::move(target)), inverse_(std::move(inverse)) {}

StatePreparer StatePreparer::step(std::size_t n_qubits) {
    return StatePreparer(prepare_step_state(n_qubits), [n_qubits](CVector &v) {
        // U_F^dagger = (X (x) I) H^{(x)n}
        StateVector s = StateVector::normalized(v);
        for (std::size_t q = 0; q < n_qubits; ++q) {
            s.apply_hadamard(q);
        }
        s.apply_x(0);
        v = s.amplitudes();
    });
}

StatePreparer StatePreparer::householder(const StateVector &f) {
    const CVector &fv = f.amplitudes();
    const Complex phase =
        std::abs(fv[0]) > 0.0 ? fv[0] / std::abs(fv[0]) : Complex(1.0);
    // H reflects e0 onto conj(phase) f; U = phase * H, U^dagger = conj(phase) H.
    CVector w = -std::conj(phase) * fv;
    w[0] += 1.0;
    const double ww = w.squaredNorm();
    return StatePreparer(f, [w, ww, phase](CVector &v) {
        if (ww > 0.0) {
            v -= (2.0 * w.dot(v) / ww) * w;
        }
        v *= std::conj(phase);
    });
}

CVector StatePreparer::unprepare(const StateVector &psi) const {
    if (psi.dim() != target_.dim()) {
        throw ValidationError("preparer/state dimension mismatch");
    }
    CVector v = psi.amplitudes();
    inverse_(v);
    return v;
}

Rank1Projector::Rank1Projector(const StateVector &f)
    : preparer_(StatePreparer::householder(f)) {}

Rank1Projector::Rank1Projector(StatePreparer preparer)
    : preparer_(std::move(preparer)) {}

double fidelity_exact(const Rank1Projector &proj, const StateVector &state) {
    return std::norm(proj.f().inner(state));
}

void ShotPlan::validate() const {
    if (shots == 0) {
        throw ValidationError("shot count must be at least 1");
    }
}

double fidelity_sampled(const StatePreparer &preparer,
                        const StateVector &state, std::uint64_t shots,
                        Rng &rng) {
    ShotPlan{shots, 0}.validate();
    const CVector v = preparer.unprepare(state);
    const double p0 = std::clamp(std::norm(v[0]), 0.0, 1.0);
    std::binomial_distribution<std::uint64_t> dist(shots, p0);
    return static_cast<double>(dist(rng)) / static_cast<double>(shots);
}

std::vector<std::size_t> XbmGrouping::offsets() const {
    std::set<std::size_t> s;
    for (const auto &g : groups) {
        s.insert(g.offset);
    }
    return {s.begin(), s.end()};
}

XbmGrouping xbm_groups(const HermitianOperator &op) {
    const std::size_t n = op.dim();
    XbmGrouping out;
    std::map<std::size_t, std::pair<RVector, RVector>> tables;
    for (const auto &[k, d] : op.upper_diagonals()) {
        for (std::size_t i = 0; i + k < n; ++i) {
            const Complex a = d[static_cast<Eigen::Index>(i)];
            if (a == Complex(0.0)) {
                continue;
            }
            if (k == 0) {
                if (!out.diagonal) {
                    out.diagonal = RVector::Zero(static_cast<Eigen::Index>(n));
                }
                (*out.diagonal)[static_cast<Eigen::Index>(i)] = a.real();
                continue;
            }
            const std::size_t j = i + k;
            const std::size_t l = i ^ j;
            auto [it, inserted] = tables.try_emplace(
                l, RVector::Zero(static_cast<Eigen::Index>(n)),
                RVector::Zero(static_cast<Eigen::Index>(n)));
            auto &[re, im] = it->second;
            // i < j and i ^ j == l, so i has a 0 at the top bit of l.
            re[static_cast<Eigen::Index>(i)] += a.real();
            re[static_cast<Eigen::Index>(j)] -= a.real();
            im[static_cast<Eigen::Index>(i)] -= a.imag();
            im[static_cast<Eigen::Index>(j)] += a.imag();
        }
    }
    for (auto &[l, t] : tables) {
        if (t.first.cwiseAbs().maxCoeff() > 0.0) {
            out.groups.push_back({l, XbmPart::Re, std::move(t.first)});
        }
        if (t.second.cwiseAbs().maxCoeff() > 0.0) {
            out.groups.push_back({l, XbmPart::Im, std::move(t.second)});
        }
    }
    return out;
}

RVector xbm_probabilities(const StateVector &state, std::size_t offset,
                          XbmPart part) {
    const CVector &a = state.amplitudes();
    const std::size_t n = state.dim();
    if (offset >= n) {
        throw IndexError("XBM offset out of range");
    }
    RVector p(static_cast<Eigen::Index>(n));
    if (offset == 0) {
        return a.cwiseAbs2();
    }
    const std::size_t top = std::bit_floor(offset);
    const double r = 1.0 / std::numbers::sqrt2;
    const Complex iu(0.0, 1.0);
    for (std::size_t x = 0; x < n; ++x) {
        if ((x & top) != 0) {
            continue;
        }
        const std::size_t y = x ^ offset;
        const Complex ax = a[static_cast<Eigen::Index>(x)];
        const Complex ay = a[static_cast<Eigen::Index>(y)];
        Complex lo, hi;
        if (part == XbmPart::Re) {
            lo = r * (ax + ay);
            hi = r * (ax - ay);
        } else {
            lo = r * (ax - iu * ay);
            hi = r * (ax + iu * ay);
        }
        p[static_cast<Eigen::Index>(x)] = std::norm(lo);
        p[static_cast<Eigen::Index>(y)] = std::norm(hi);
    }
    return p;
}

double xbm_expectation(const XbmGrouping &grouping, const StateVector &state) {
    double total = 0.0;
    if (grouping.diagonal) {
        total += grouping.diagonal->dot(state.amplitudes().cwiseAbs2());
    }
    for (const auto &g : grouping.groups) {
        total += g.coefficients.dot(xbm_probabilities(state, g.offset, g.part));
    }
    return total;
}

std::vector<std::uint64_t> sample_counts(const RVector &probs,
                                         std::uint64_t shots, Rng &rng) {
    std::vector<std::uint64_t> counts(static_cast<std::size_t>(probs.size()),
                                      0);
    std::uint64_t remaining = shots;
    double mass = probs.sum();
    for (Eigen::Index i = 0; i < probs.size() && remaining > 0; ++i) {
        const double pi = std::max(0.0, probs[i]);
        if (i + 1 == probs.size() || mass <= pi) {
            counts[static_cast<std::size_t>(i)] = remaining;
            remaining = 0;
            break;
        }
        const double cond = std::clamp(pi / mass, 0.0, 1.0);
        std::binomial_distribution<std::uint64_t> dist(remaining, cond);
        const std::uint64_t c = dist(rng);
        counts[static_cast<std::size_t>(i)] = c;
        remaining -= c;
        mass -= pi;
    }
    return counts;
}

namespace {

double weighted_frequency(const RVector &coeffs, const RVector &probs,
                          std::uint64_t shots, Rng &rng) {
    const auto counts = sample_counts(probs, shots, rng);
    double acc = 0.0;
    for (std::size_t x = 0; x < counts.size(); ++x) {
        if (counts[x] != 0) {
            acc += coeffs[static_cast<Eigen::Index>(x)] *
                   static_cast<double>(counts[x]);
        }
    }
    return acc / static_cast<double>(shots);
}

} // namespace

double expectation_sampled(const XbmGrouping &grouping,
                           const StateVector &state, std::uint64_t shots,
                           Rng &rng) {
    ShotPlan{shots, 0}.validate();
    double total = 0.0;
    if (grouping.diagonal) {
        total += weighted_frequency(*grouping.diagonal,
                                    state.amplitudes().cwiseAbs2(), shots,
                                    rng);
    }
    for (const auto &g : grouping.groups) {
        total += weighted_frequency(
            g.coefficients, xbm_probabilities(state, g.offset, g.part), shots,
            rng);
    }
    return total;
}

double expectation_sampled(const HermitianOperator &op,
                           const StateVector &state, std::uint64_t shots,
                           Rng &rng) {
    if (op.dim() != state.dim()) {
        throw ValidationError("operator/state dimension mismatch");
    }
    return expectation_sampled(xbm_groups(op), state, shots, rng);
}

Observable::Observable(HermitianOperator op)
    : value_(std::move(op)),
      grouping_(xbm_groups(std::get<HermitianOperator>(value_))) {}

Observable::Observable(Rank1Projector proj) : value_(std::move(proj)) {}

std::size_t Observable::dim() const noexcept {
    return std::visit([](const auto &v) { return v.dim(); }, value_);
}

double Observable::expectation(const StateVector &state) const {
    if (const auto *op = as_operator()) {
        return expectation_exact(*op, state);
    }
    return fidelity_exact(*as_projector(), state);
}

double Observable::expectation(const StateVector &state, std::uint64_t shots,
                               Rng &rng) const {
    if (state.dim() != dim()) {
        throw ValidationError("observable/state dimension mismatch");
    }
    if (as_operator() != nullptr) {
        return expectation_sampled(grouping_, state, shots, rng);
    }
    return fidelity_sampled(as_projector()->preparer(), state, shots, rng);
}

std::size_t Observable::circuit_count() const noexcept {
    return is_projector() ? 1 : grouping_.circuit_count();
}

CMatrix Observable::to_dense() const {
    if (const auto *op = as_operator()) {
        return op->to_dense();
    }
    const CVector &f = as_projector()->f().amplitudes();
    return f * f.adjoint();
}

HermitianOperator Observable::to_operator() const {
    if (const auto *op = as_operator()) {
        return *op;
    }
    return HermitianOperator::from_dense(to_dense());
}

namespace {

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

bool parse_double(const std::string &tok, double &out) {
    if (tok.empty()) {
        return false;
    }
    char *end = nullptr;
    out = std::strtod(tok.c_str(), &end);
    return end == tok.c_str() + tok.size() && std::isfinite(out);
}

bool next_content_line(std::istream &is, std::string &line,
                       std::size_t &lineno) {
    while (std::getline(is, line)) {
        ++lineno;
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#') {
            continue;
        }
        return true;
    }
    return false;
}

} // namespace

void write_banded(std::ostream &os, const HermitianOperator &op) {
    const std::size_t n = op.dim();
    os << n;
    for (const auto &[k, d] : op.upper_diagonals()) {
        os << ' ' << k;
    }
    os << '\n';
    for (const auto &[k, d] : op.upper_diagonals()) {
        for (std::size_t i = 0; i < n; ++i) {
            const Complex v =
                i + k < n ? d[static_cast<Eigen::Index>(i)] : Complex(0.0);
            if (i != 0) {
                os << ' ';
            }
            os << format_double(v.real()) << ',' << format_double(v.imag());
        }
        os << '\n';
    }
}

void write_banded_file(const std::string &path, const HermitianOperator &op) {
    std::ofstream os(path);
    if (!os) {
        throw IoError("cannot open " + path + " for writing");
    }
    write_banded(os, op);
    if (!os) {
        throw IoError("failed writing " + path);
    }
}

HermitianOperator read_banded(std::istream &is, const std::string &source) {
    std::string line;
    std::size_t lineno = 0;
    if (!next_content_line(is, line, lineno)) {
        throw ParseError(source, lineno + 1, "missing header line");
    }
    std::istringstream header(line);
    std::vector<long long> offsets;
    long long dim_ll = 0;
    if (!(header >> dim_ll) || dim_ll <= 0) {
        throw ParseError(source, lineno, "header must start with a positive "
                                         "dimension");
    }
    long long off = 0;
    while (header >> off) {
        offsets.push_back(off);
    }
    if (!header.eof()) {
        throw ParseError(source, lineno, "header offsets must be integers");
    }
    if (offsets.empty()) {
        throw ParseError(source, lineno, "header lists no offsets");
    }
    const auto n = static_cast<std::size_t>(dim_ll);
    std::map<long long, std::pair<std::size_t, CVector>> rows;
    for (long long o : offsets) {
        if (static_cast<std::size_t>(o < 0 ? -o : o) >= n) {
            throw ParseError(source, lineno,
                             "offset " + std::to_string(o) + " out of range");
        }
        if (rows.count(o) != 0) {
            throw ParseError(source, lineno,
                             "duplicate offset " + std::to_string(o));
        }
        if (!next_content_line(is, line, lineno)) {
            throw ParseError(source, lineno + 1,
                             "missing entries for offset " +
                                 std::to_string(o));
        }
        std::istringstream ls(line);
        std::string tok;
        CVector v(static_cast<Eigen::Index>(n));
        std::size_t count = 0;
        while (ls >> tok) {
            if (count == n) {
                throw ParseError(source, lineno, "too many entries");
            }
            const auto comma = tok.find(',');
            double re = 0.0, im = 0.0;
            if (comma == std::string::npos ||
                !parse_double(tok.substr(0, comma), re) ||
                !parse_double(tok.substr(comma + 1), im)) {
                throw ParseError(source, lineno,
                                 "malformed entry '" + tok +
                                     "', expected re,im");
            }
            v[static_cast<Eigen::Index>(count++)] = Complex(re, im);
        }
        if (count != n) {
            throw ParseError(source, lineno,
                             "expected " + std::to_string(n) +
                                 " entries, got " + std::to_string(count));
        }
        // Positions falling outside the matrix must be zero.
        for (std::size_t i = 0; i < n; ++i) {
            const long long j = static_cast<long long>(i) + o;
            if ((j < 0 || j >= dim_ll) &&
                v[static_cast<Eigen::Index>(i)] != Complex(0.0)) {
                throw ParseError(source, lineno,
                                 "nonzero entry outside the matrix at "
                                 "position " + std::to_string(i));
            }
        }
        rows.emplace(o, std::make_pair(lineno, std::move(v)));
    }
    std::map<std::size_t, CVector> upper;
    for (const auto &[o, entry] : rows) {
        const auto &[ln, v] = entry;
        const auto k = static_cast<std::size_t>(o < 0 ? -o : o);
        CVector d(static_cast<Eigen::Index>(n - k));
        for (std::size_t i = 0; i + k < n; ++i) {
            // Upper entry A(i, i+k); a negative offset row stores A(i+k, i)
            // at position i+k.
            d[static_cast<Eigen::Index>(i)] =
                o >= 0 ? v[static_cast<Eigen::Index>(i)]
                       : std::conj(v[static_cast<Eigen::Index>(i + k)]);
        }
        if (o == 0) {
            const double scale = std::max(1.0, d.cwiseAbs().maxCoeff());
            if (d.imag().cwiseAbs().maxCoeff() >
                HermitianOperator::kHermitianTolerance * scale) {
                throw ValidationError(source + ":" + std::to_string(ln) +
                                      ": main diagonal is not real "
                                      "(operator is not Hermitian)");
            }
        }
        auto [it, inserted] = upper.emplace(k, d);
        if (!inserted) {
            const double scale =
                std::max(1.0, std::max(it->second.cwiseAbs().maxCoeff(),
                                       d.cwiseAbs().maxCoeff()));
            if ((it->second - d).cwiseAbs().maxCoeff() >
                HermitianOperator::kHermitianTolerance * scale) {
                throw ValidationError(source + ":" + std::to_string(ln) +
                                      ": offsets +" + std::to_string(k) +
                                      " and -" + std::to_string(k) +
                                      " are not conjugate (operator is not "
                                      "Hermitian)");
            }
        }
    }
    return HermitianOperator(n, std::move(upper));
}

HermitianOperator read_banded_file(const std::string &path) {
    std::ifstream is(path);
    if (!is) {
        throw IoError("cannot open " + path);
    }
    return read_banded(is, path);
}

} // namespace vqgep

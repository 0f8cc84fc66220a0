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

#include "vqgep/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <mutex>
#include <numbers>
#include <sstream>
#include <thread>

#include <Eigen/Cholesky>

namespace vqgep {

namespace {

std::string trim(const std::string &s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) {
        return {};
    }
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string fmt_opt(const std::optional<double> &v) {
    return v ? fmt_double(*v) : std::string();
}

struct FieldError {
    std::string what;
};

std::uint64_t parse_uint(const std::string &v) {
    if (v.empty() || v.find_first_not_of("0123456789") != std::string::npos) {
        throw FieldError{"expected a non-negative integer, got '" + v + "'"};
    }
    try {
        return std::stoull(v);
    } catch (const std::exception &) {
        throw FieldError{"integer out of range: '" + v + "'"};
    }
}

double parse_real(const std::string &v) {
    auto one = [](const std::string &s) {
        std::size_t used = 0;
        double x = 0.0;
        try {
            x = std::stod(s, &used);
        } catch (const std::exception &) {
            used = 0;
        }
        if (used == 0 || used != s.size() || !std::isfinite(x)) {
            throw FieldError{"expected a real number, got '" + s + "'"};
        }
        return x;
    };
    const auto slash = v.find('/');
    if (slash == std::string::npos) {
        return one(trim(v));
    }
    const double den = one(trim(v.substr(slash + 1)));
    if (den == 0.0) {
        throw FieldError{"division by zero in '" + v + "'"};
    }
    return one(trim(v.substr(0, slash))) / den;
}

std::vector<std::string> split_list(const std::string &v) {
    std::vector<std::string> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) {
        out.push_back(trim(item));
    }
    return out;
}

template <typename T>
T parse_choice(const std::string &v,
               const std::vector<std::pair<const char *, T>> &choices) {
    std::string names;
    for (const auto &[name, value] : choices) {
        if (v == name) {
            return value;
        }
        names += names.empty() ? name : std::string("|") + name;
    }
    throw FieldError{"expected one of " + names + ", got '" + v + "'"};
}

template <typename T>
const char *choice_name(T value,
                        const std::vector<std::pair<const char *, T>> &choices) {
    for (const auto &[name, v] : choices) {
        if (v == value) {
            return name;
        }
    }
    return "?";
}

const std::vector<std::pair<const char *, ExperimentKind>> kExperiments{
    {"poisson", ExperimentKind::Poisson},
    {"beam", ExperimentKind::Beam},
    {"custom-gep", ExperimentKind::CustomGep},
    {"bias-study", ExperimentKind::BiasStudy}};
const std::vector<std::pair<const char *, AnsatzKind>> kAnsatz{
    {"alternating", AnsatzKind::AlternatingLayered},
    {"cascading", AnsatzKind::CascadingBlock}};
const std::vector<std::pair<const char *, OptimizerKind::Type>> kOptimizers{
    {"fqs", OptimizerKind::Type::FQS},
    {"fraxis", OptimizerKind::Type::Fraxis},
    {"nft", OptimizerKind::Type::NFT},
    {"rotoselect", OptimizerKind::Type::Rotoselect}};
const std::vector<std::pair<const char *, InitStrategy>> kInits{
    {"real", InitStrategy::RealSpace},
    {"complex", InitStrategy::ComplexSpace},
    {"fraxis", InitStrategy::FraxisRandom},
    {"nft", InitStrategy::NftRandom},
    {"discrete-axis", InitStrategy::DiscreteAxisRandom}};
const std::vector<std::pair<const char *, SweepOrder>> kOrders{
    {"ascending", SweepOrder::Ascending},
    {"random", SweepOrder::RandomPermutation}};
const std::vector<std::pair<const char *, PlaneModel>> kPlanes{
    {"stress", PlaneModel::Stress}, {"strain", PlaneModel::Strain}};
const std::vector<std::pair<const char *, PaddingRegime>> kRegimes{
    {"zero-block", PaddingRegime::ZeroBlock},
    {"positive-min", PaddingRegime::PositiveMin},
    {"negative-max", PaddingRegime::NegativeMax}};

using Setter = std::function<void(ExperimentConfig &, const std::string &)>;
using Getter = std::function<std::string(const ExperimentConfig &)>;

struct Field {
    const char *key;
    Setter set;
    Getter get;
};

const std::vector<Field> &fields() {
    static const std::vector<Field> table{
        {"experiment",
         [](auto &c, const auto &v) { c.experiment = parse_choice(v, kExperiments); },
         [](const auto &c) { return std::string(choice_name(c.experiment, kExperiments)); }},
        {"ansatz",
         [](auto &c, const auto &v) { c.ansatz = parse_choice(v, kAnsatz); },
         [](const auto &c) { return std::string(choice_name(c.ansatz, kAnsatz)); }},
        {"layers",
         [](auto &c, const auto &v) { c.layers = parse_uint(v); },
         [](const auto &c) { return std::to_string(c.layers); }},
        {"optimizer",
         [](auto &c, const auto &v) { c.optimizer.type = parse_choice(v, kOptimizers); },
         [](const auto &c) { return std::string(choice_name(c.optimizer.type, kOptimizers)); }},
        {"nft_axis",
         [](auto &c, const auto &v) {
             const auto items = split_list(v);
             if (items.size() != 3) {
                 throw FieldError{"expected three comma-separated components"};
             }
             std::array<double, 3> axis{};
             for (std::size_t i = 0; i < 3; ++i) {
                 axis[i] = parse_real(items[i]);
             }
             const double n = std::sqrt(axis[0] * axis[0] + axis[1] * axis[1] +
                                        axis[2] * axis[2]);
             if (!(n > 0.0)) {
                 throw FieldError{"axis must be nonzero"};
             }
             for (auto &a : axis) {
                 a /= n;
             }
             c.optimizer.axis = axis;
         },
         [](const auto &c) {
             return fmt_double(c.optimizer.axis[0]) + "," +
                    fmt_double(c.optimizer.axis[1]) + "," +
                    fmt_double(c.optimizer.axis[2]);
         }},
        {"init",
         [](auto &c, const auto &v) { c.init = parse_choice(v, kInits); },
         [](const auto &c) { return std::string(choice_name(c.init, kInits)); }},
        {"sense",
         [](auto &c, const auto &v) {
             if (v == "auto") {
                 c.sense.reset();
             } else {
                 c.sense = parse_choice(
                     v, std::vector<std::pair<const char *, Sense>>{
                            {"min", Sense::Minimize}, {"max", Sense::Maximize}});
             }
         },
         [](const auto &c) -> std::string {
             if (!c.sense) {
                 return "auto";
             }
             return *c.sense == Sense::Minimize ? "min" : "max";
         }},
        {"shots",
         [](auto &c, const auto &v) {
             if (v == "exact") {
                 c.shots.reset();
             } else {
                 c.shots = parse_uint(v);
             }
         },
         [](const auto &c) {
             return c.shots ? std::to_string(*c.shots) : std::string("exact");
         }},
        {"trials",
         [](auto &c, const auto &v) { c.trials = parse_uint(v); },
         [](const auto &c) { return std::to_string(c.trials); }},
        {"seed",
         [](auto &c, const auto &v) { c.seed = parse_uint(v); },
         [](const auto &c) { return std::to_string(c.seed); }},
        {"eps_tol",
         [](auto &c, const auto &v) { c.eps_tol = parse_real(v); },
         [](const auto &c) { return fmt_double(c.eps_tol); }},
        {"max_iters",
         [](auto &c, const auto &v) { c.max_iters = parse_uint(v); },
         [](const auto &c) { return std::to_string(c.max_iters); }},
        {"reg_eps",
         [](auto &c, const auto &v) {
             if (v == "default") {
                 c.reg_eps.reset();
             } else {
                 c.reg_eps = parse_real(v);
             }
         },
         [](const auto &c) {
             return c.reg_eps ? fmt_double(*c.reg_eps) : std::string("default");
         }},
        {"order",
         [](auto &c, const auto &v) { c.order = parse_choice(v, kOrders); },
         [](const auto &c) { return std::string(choice_name(c.order, kOrders)); }},
        {"workers",
         [](auto &c, const auto &v) { c.workers = parse_uint(v); },
         [](const auto &c) { return std::to_string(c.workers); }},
        {"output",
         [](auto &c, const auto &v) { c.output = v; },
         [](const auto &c) { return c.output.string(); }},
        {"poisson_nodes",
         [](auto &c, const auto &v) { c.poisson_nodes = parse_uint(v); },
         [](const auto &c) { return std::to_string(c.poisson_nodes); }},
        {"beam_width",
         [](auto &c, const auto &v) { c.beam_mesh.width = parse_real(v); },
         [](const auto &c) { return fmt_double(c.beam_mesh.width); }},
        {"beam_height",
         [](auto &c, const auto &v) { c.beam_mesh.height = parse_real(v); },
         [](const auto &c) { return fmt_double(c.beam_mesh.height); }},
        {"beam_nx",
         [](auto &c, const auto &v) { c.beam_mesh.nx = parse_uint(v); },
         [](const auto &c) { return std::to_string(c.beam_mesh.nx); }},
        {"beam_ny",
         [](auto &c, const auto &v) { c.beam_mesh.ny = parse_uint(v); },
         [](const auto &c) { return std::to_string(c.beam_mesh.ny); }},
        {"young",
         [](auto &c, const auto &v) { c.material.young = parse_real(v); },
         [](const auto &c) { return fmt_double(c.material.young); }},
        {"poisson_ratio",
         [](auto &c, const auto &v) { c.material.poisson = parse_real(v); },
         [](const auto &c) { return fmt_double(c.material.poisson); }},
        {"density",
         [](auto &c, const auto &v) { c.material.density = parse_real(v); },
         [](const auto &c) { return fmt_double(c.material.density); }},
        {"plane",
         [](auto &c, const auto &v) { c.plane = parse_choice(v, kPlanes); },
         [](const auto &c) { return std::string(choice_name(c.plane, kPlanes)); }},
        {"matrix_a",
         [](auto &c, const auto &v) { c.matrix_a = v; },
         [](const auto &c) { return c.matrix_a.string(); }},
        {"matrix_b",
         [](auto &c, const auto &v) { c.matrix_b = v; },
         [](const auto &c) { return c.matrix_b.string(); }},
        {"pad_regime",
         [](auto &c, const auto &v) { c.pad_regime = parse_choice(v, kRegimes); },
         [](const auto &c) { return std::string(choice_name(c.pad_regime, kRegimes)); }},
        {"pad_eps",
         [](auto &c, const auto &v) {
             if (v == "default") {
                 c.pad_eps.reset();
             } else {
                 c.pad_eps = parse_real(v);
             }
         },
         [](const auto &c) {
             return c.pad_eps ? fmt_double(*c.pad_eps) : std::string("default");
         }},
        {"bias_shots",
         [](auto &c, const auto &v) {
             c.bias_shots.clear();
             for (const auto &item : split_list(v)) {
                 c.bias_shots.push_back(parse_uint(item));
             }
         },
         [](const auto &c) {
             std::string s;
             for (auto n : c.bias_shots) {
                 s += (s.empty() ? "" : ",") + std::to_string(n);
             }
             return s;
         }},
        {"bias_repeats",
         [](auto &c, const auto &v) { c.bias_repeats = parse_uint(v); },
         [](const auto &c) { return std::to_string(c.bias_repeats); }},
        {"bias_gate",
         [](auto &c, const auto &v) {
             if (v == "last") {
                 c.bias_gate.reset();
             } else {
                 c.bias_gate = parse_uint(v);
             }
         },
         [](const auto &c) {
             return c.bias_gate ? std::to_string(*c.bias_gate)
                                : std::string("last");
         }},
    };
    return table;
}

std::filesystem::path trial_path(const std::filesystem::path &dir,
                                 const char *stem, std::size_t i) {
    return dir / (std::string(stem) + "_" + std::to_string(i) + ".csv");
}

std::ofstream open_out(const std::filesystem::path &p) {
    std::ofstream os(p);
    if (!os) {
        throw IoError("cannot open " + p.string() + " for writing");
    }
    return os;
}

HermitianOperator pad_with_identity(const HermitianOperator &k) {
    const std::size_t n = k.dim();
    const std::size_t full = std::size_t{1} << ceil_log2(n);
    if (full == n) {
        return k;
    }
    CMatrix d = CMatrix::Identity(static_cast<Eigen::Index>(full),
                                  static_cast<Eigen::Index>(full));
    d.topLeftCorner(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n)) =
        k.to_dense();
    return HermitianOperator::from_dense(d);
}

} // namespace

const std::vector<std::string> &ExperimentConfig::keys() {
    static const std::vector<std::string> k = [] {
        std::vector<std::string> out;
        for (const auto &f : fields()) {
            out.emplace_back(f.key);
        }
        return out;
    }();
    return k;
}

void ExperimentConfig::set(const std::string &key, const std::string &value,
                           const std::string &source, std::size_t line) {
    for (const auto &f : fields()) {
        if (key == f.key) {
            try {
                f.set(*this, value);
            } catch (const FieldError &e) {
                throw ParseError(source, line, key + ": " + e.what);
            }
            return;
        }
    }
    throw ParseError(source, line, "unknown key '" + key + "'");
}

void ExperimentConfig::apply_override(const std::string &assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos) {
        throw ParseError("<override>", 0,
                         "expected key=value, got '" + assignment + "'");
    }
    set(trim(assignment.substr(0, eq)), trim(assignment.substr(eq + 1)));
}

ExperimentConfig ExperimentConfig::parse(std::istream &is,
                                         const std::string &source) {
    ExperimentConfig cfg;
    std::map<std::string, std::size_t> seen;
    std::string raw;
    std::size_t line = 0;
    while (std::getline(is, raw)) {
        ++line;
        const auto hash = raw.find('#');
        const std::string text = trim(raw.substr(0, hash));
        if (text.empty()) {
            continue;
        }
        const auto eq = text.find('=');
        if (eq == std::string::npos) {
            throw ParseError(source, line, "expected 'key = value'");
        }
        const std::string key = trim(text.substr(0, eq));
        if (auto it = seen.find(key); it != seen.end()) {
            throw ParseError(source, line,
                             "duplicate key '" + key + "' (first on line " +
                                 std::to_string(it->second) + ")");
        }
        seen.emplace(key, line);
        cfg.set(key, trim(text.substr(eq + 1)), source, line);
    }
    return cfg;
}

ExperimentConfig ExperimentConfig::load(const std::filesystem::path &path) {
    std::ifstream is(path);
    if (!is) {
        throw IoError("cannot open " + path.string());
    }
    ExperimentConfig cfg = parse(is, path.string());
    const auto base = path.parent_path();
    for (auto *p : {&cfg.matrix_a, &cfg.matrix_b}) {
        if (!p->empty() && p->is_relative()) {
            *p = base / *p;
        }
    }
    return cfg;
}

void ExperimentConfig::validate() const {
    auto fail = [](const std::string &field, const std::string &what) {
        throw ValidationError("config field '" + field + "': " + what);
    };
    if (layers < 1) {
        fail("layers", "must be at least 1");
    }
    if (trials < 1) {
        fail("trials", "must be at least 1");
    }
    if (!(eps_tol > 0.0)) {
        fail("eps_tol", "must be positive");
    }
    if (max_iters < 1) {
        fail("max_iters", "must be at least 1");
    }
    if (workers < 1) {
        fail("workers", "must be at least 1");
    }
    if (shots && *shots == 0) {
        fail("shots", "must be positive or 'exact'");
    }
    if (reg_eps && !(*reg_eps > 0.0)) {
        fail("reg_eps", "must be positive");
    }
    switch (experiment) {
    case ExperimentKind::Poisson:
        if (poisson_nodes < 2) {
            fail("poisson_nodes", "must be at least 2");
        }
        if (sense && *sense != Sense::Maximize) {
            fail("sense", "the linear-system pencil is maximized");
        }
        break;
    case ExperimentKind::Beam:
        try {
            beam_mesh.validate();
            material.validate();
        } catch (const ValidationError &e) {
            fail("beam", e.what());
        }
        if (beam_mesh.nx < 3) {
            fail("beam_nx", "both fixed ends leave no free node below 3");
        }
        break;
    case ExperimentKind::BiasStudy:
        if (bias_shots.empty()) {
            fail("bias_shots", "must list at least one shot count");
        }
        for (auto n : bias_shots) {
            if (n == 0) {
                fail("bias_shots", "shot counts must be positive");
            }
        }
        if (bias_repeats < 2) {
            fail("bias_repeats", "must be at least 2");
        }
        [[fallthrough]];
    case ExperimentKind::CustomGep:
        for (const auto &[name, p] :
             {std::pair{"matrix_a", &matrix_a}, std::pair{"matrix_b", &matrix_b}}) {
            if (p->empty()) {
                fail(name, "required for this experiment");
            }
            if (!std::filesystem::exists(*p)) {
                fail(name, "file not found: " + p->string());
            }
        }
        if (pad_eps && (*pad_eps == 0.0 || !std::isfinite(*pad_eps))) {
            fail("pad_eps", "must be nonzero");
        }
        break;
    }
    if (optimizer.type == OptimizerKind::Type::NFT) {
        try {
            (void)OptimizerKind::nft(optimizer.axis);
        } catch (const ValidationError &e) {
            fail("nft_axis", e.what());
        }
    }
}

std::string ExperimentConfig::echo() const {
    std::string out;
    for (const auto &f : fields()) {
        out += std::string(f.key) + " = " + f.get(*this) + "\n";
    }
    return out;
}

Sense ExperimentConfig::effective_sense() const {
    if (sense) {
        return *sense;
    }
    return experiment == ExperimentKind::Poisson ? Sense::Maximize
                                                 : Sense::Minimize;
}

CircuitLayout ExperimentConfig::layout(std::size_t n_qubits) const {
    return ansatz == AnsatzKind::CascadingBlock
               ? CircuitLayout::cascading_block(n_qubits, layers)
               : CircuitLayout::alternating_layered(n_qubits, layers);
}

GEProblem load_pencil(const std::filesystem::path &a,
                      const std::filesystem::path &b, Sense sense,
                      PaddingRegime regime, std::optional<double> pad_eps) {
    const HermitianOperator ma = read_banded_file(a.string());
    const HermitianOperator mb = read_banded_file(b.string());
    if (ma.dim() != mb.dim()) {
        throw ValidationError("pencil matrices differ in dimension: " +
                              std::to_string(ma.dim()) + " vs " +
                              std::to_string(mb.dim()));
    }
    if (mb.dim() <= GEProblem::kDenseCheckLimit) {
        Eigen::LLT<CMatrix> llt(mb.to_dense());
        if (llt.info() != Eigen::Success) {
            throw ValidationError(b.string() + ": B is not positive definite");
        }
    }
    PaddedPencil padded = pad_to_power_of_two(ma, mb, regime, pad_eps);
    return GEProblem(Observable(std::move(padded.a)), std::move(padded.b),
                     sense);
}

BuiltProblem build_problem(const ExperimentConfig &config) {
    config.validate();
    BuiltProblem built;
    const Sense sense = config.effective_sense();
    switch (config.experiment) {
    case ExperimentKind::Poisson: {
        const std::size_t n = config.poisson_nodes;
        const FemSystem sys = assemble_poisson_1d(Mesh1D::unit_interval(n));
        const RVector f = assemble_poisson_load(step_samples(n));
        const std::size_t nq = ceil_log2(n);
        built.original_dim = n;
        const HermitianOperator k = pad_with_identity(sys.k);
        if ((std::size_t{1} << nq) == n) {
            built.sle.emplace(k, StatePreparer::step(nq));
        } else {
            const CVector fp = pad_vector(f.cast<Complex>());
            built.sle.emplace(k, StatePreparer::householder(StateVector(fp)));
        }
        built.problem = std::make_unique<GEProblem>(sle_to_gep(*built.sle));
        const CMatrix kd = sys.k.to_dense();
        built.classical_solution = kd.ldlt().solve(f.cast<Complex>());
        break;
    }
    case ExperimentKind::Beam: {
        const FemSystem sys =
            beam_system(config.beam_mesh, config.material, config.plane);
        built.original_dim = sys.dim();
        BasisMapping map = dof_to_basis_map(sys, PaddingRegime::PositiveMin,
                                            config.pad_eps);
        built.problem = std::make_unique<GEProblem>(
            Observable(std::move(map.pencil.a)), std::move(map.pencil.b), sense);
        break;
    }
    case ExperimentKind::CustomGep:
    case ExperimentKind::BiasStudy: {
        built.problem = std::make_unique<GEProblem>(
            load_pencil(config.matrix_a, config.matrix_b, sense,
                        config.pad_regime, config.pad_eps));
        built.original_dim =
            read_banded_file(config.matrix_a.string()).dim();
        break;
    }
    }
    built.reference = classical_extremal(*built.problem);
    return built;
}

std::uint64_t trial_seed(std::uint64_t master, std::size_t trial) {
    return derive_seed(master, static_cast<std::uint64_t>(trial));
}

TrialResult run_trial(const BuiltProblem &built, const ExperimentConfig &config,
                      std::size_t index) {
    const auto t0 = std::chrono::steady_clock::now();
    TrialResult r;
    r.index = index;
    r.seed = trial_seed(config.seed, index);
    const GEProblem &problem = *built.problem;
    const std::size_t nq = problem.n_qubits();
    const CircuitLayout layout = config.layout(nq);
    Rng rng(r.seed);
    auto params0 = init_params(config.init, layout, rng);
    const StateVector initial(nq);
    std::unique_ptr<ExpectationBackend> backend;
    if (config.shots) {
        backend = std::make_unique<SampledBackend>(
            problem, initial, *config.shots, Rng(derive_seed(r.seed, 1)));
    } else {
        backend = std::make_unique<ExactBackend>(problem, initial);
    }
    OptimizeOptions opts;
    opts.kind = config.optimizer;
    opts.eps_tol = config.eps_tol;
    opts.max_iters = config.max_iters;
    opts.reg_eps = config.reg_eps;
    opts.order = config.order;
    opts.seed = derive_seed(r.seed, 2);
    opts.state_metric = [](const StateVector &s) {
        return real_space_distance(s);
    };
    auto finish = [&] {
        r.wall_seconds = std::chrono::duration<double>(
                             std::chrono::steady_clock::now() - t0)
                             .count();
    };
    try {
        r.trace = sequential_optimize(*backend, layout, std::move(params0), opts);
    } catch (const OptimizationError &e) {
        r.trace = e.trace();
        r.status = "numerical";
        r.message = e.what();
        finish();
        return r;
    } catch (const NumericalError &e) {
        r.status = "numerical";
        r.message = e.what();
        finish();
        return r;
    }
    const StateVector state = run_circuit(layout, r.trace.params, initial);
    const double obj = problem.objective(state);
    r.final_objective = obj;
    const double ref = built.reference.value;
    if (ref != 0.0) {
        r.relative_error = std::abs(obj - ref) / std::abs(ref);
    }
    r.fidelity = solution_fidelity(state.amplitudes(), built.reference.vector);
    if (built.sle) {
        try {
            CVector u = recover_sle_solution(*built.sle, obj, state.amplitudes());
            r.residual = (built.sle->k().apply(u) - built.sle->f()).norm();
            r.solution = u.head(static_cast<Eigen::Index>(built.original_dim));
        } catch (const NumericalError &e) {
            r.message = e.what();
        }
    }
    finish();
    return r;
}

void write_summary_csv(std::ostream &os, const BuiltProblem &built,
                       const std::vector<TrialResult> &trials) {
    os << "trial,seed,status,converged,iterations,evaluations,final_lambda,"
          "final_objective,classical_lambda,relative_error,fidelity,"
          "initial_L,final_L,residual\n";
    for (const auto &t : trials) {
        const auto &tr = t.trace;
        std::optional<double> final_l;
        std::optional<double> lambda;
        std::size_t evals = 0;
        if (!tr.records.empty()) {
            final_l = tr.records.back().metric;
            lambda = tr.records.back().lambda;
            evals = tr.records.back().evaluations;
        }
        os << t.index << ',' << t.seed << ',' << t.status << ','
           << (tr.converged ? 1 : 0) << ',' << tr.iterations << ',' << evals
           << ',' << fmt_opt(lambda) << ',' << fmt_opt(t.final_objective)
           << ',' << fmt_double(built.reference.value) << ','
           << fmt_opt(t.relative_error) << ',' << fmt_opt(t.fidelity) << ','
           << fmt_opt(tr.initial_metric) << ',' << fmt_opt(final_l) << ','
           << fmt_opt(t.residual) << '\n';
    }
}

ExperimentResult run_experiment(const ExperimentConfig &config) {
    const BuiltProblem built = build_problem(config);
    std::error_code ec;
    std::filesystem::create_directories(config.output, ec);
    if (ec) {
        throw IoError("cannot create " + config.output.string() + ": " +
                      ec.message());
    }
    {
        auto os = open_out(config.output / "config.echo");
        os << config.echo();
    }
    ExperimentResult result;
    const GEProblem &problem = *built.problem;

    if (config.experiment == ExperimentKind::BiasStudy) {
        const CircuitLayout layout = config.layout(problem.n_qubits());
        Rng rng(config.seed);
        const auto params = init_params(config.init, layout, rng);
        const std::size_t gate = config.bias_gate.value_or(layout.gate_count() - 1);
        if (gate >= layout.gate_count()) {
            throw ValidationError("config field 'bias_gate': gate " +
                                  std::to_string(gate) + " out of range");
        }
        BiasStudyOptions opts{config.bias_shots, config.bias_repeats,
                              derive_seed(config.seed, 1), config.reg_eps};
        result.bias = bias_study(problem, layout, params, gate, opts);
        auto os = open_out(config.output / "bias.csv");
        write_bias_csv(os, result.bias);
        return result;
    }

    result.trials.resize(config.trials);
    std::atomic<std::size_t> next{0};
    std::mutex io_mutex;
    std::exception_ptr io_failure;
    auto worker = [&] {
        for (std::size_t i = next++; i < config.trials; i = next++) {
            TrialResult tr;
            try {
                tr = run_trial(built, config, i);
            } catch (const std::exception &e) {
                tr.index = i;
                tr.seed = trial_seed(config.seed, i);
                tr.status = "error";
                tr.message = e.what();
            }
            try {
                auto os = open_out(trial_path(config.output, "trial", i));
                write_trace_csv(os, tr.trace);
                if (tr.solution) {
                    auto us = open_out(trial_path(config.output, "solution", i));
                    us << "index,u_re,u_im,u_classical\n";
                    for (Eigen::Index j = 0; j < tr.solution->size(); ++j) {
                        us << j << ',' << fmt_double((*tr.solution)[j].real())
                           << ',' << fmt_double((*tr.solution)[j].imag()) << ','
                           << fmt_double((*built.classical_solution)[j].real())
                           << '\n';
                    }
                }
            } catch (...) {
                std::lock_guard lock(io_mutex);
                if (!io_failure) {
                    io_failure = std::current_exception();
                }
            }
            result.trials[i] = std::move(tr);
        }
    };
    const std::size_t n_workers = std::min(config.workers, config.trials);
    if (n_workers <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (std::size_t w = 0; w < n_workers; ++w) {
            pool.emplace_back(worker);
        }
        for (auto &t : pool) {
            t.join();
        }
    }
    if (io_failure) {
        std::rethrow_exception(io_failure);
    }

    {
        auto os = open_out(config.output / "summary.csv");
        write_summary_csv(os, built, result.trials);
    }
    {
        auto os = open_out(config.output / "timing.csv");
        os << "trial,wall_seconds\n";
        for (const auto &t : result.trials) {
            os << t.index << ',' << fmt_double(t.wall_seconds) << '\n';
        }
    }
    {
        std::vector<std::vector<double>> series;
        for (const auto &t : result.trials) {
            std::vector<double> s;
            for (const auto &rec : t.trace.records) {
                s.push_back(rec.exact_objective.value_or(rec.lambda));
            }
            series.push_back(std::move(s));
        }
        const auto band = trajectory_band(series);
        auto os = open_out(config.output / "band.csv");
        os << "update,median_objective,p25_objective,p75_objective\n";
        for (std::size_t t = 0; t < band.median.size(); ++t) {
            os << t + 1 << ',' << fmt_double(band.median[t]) << ','
               << fmt_double(band.p25[t]) << ',' << fmt_double(band.p75[t])
               << '\n';
        }
    }
    return result;
}

std::vector<std::filesystem::path>
export_pencil(const ExperimentConfig &config, const std::filesystem::path &dir) {
    config.validate();
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) {
        throw IoError("cannot create " + dir.string() + ": " + ec.message());
    }
    std::vector<std::filesystem::path> written;
    auto put = [&](const char *name, const HermitianOperator &op) {
        const auto p = dir / name;
        write_banded_file(p.string(), op);
        written.push_back(p);
    };
    switch (config.experiment) {
    case ExperimentKind::Poisson: {
        const std::size_t n = config.poisson_nodes;
        put("K.banded", assemble_poisson_1d(Mesh1D::unit_interval(n)).k);
        const RVector f = assemble_poisson_load(step_samples(n));
        const auto p = dir / "F.csv";
        auto os = open_out(p);
        for (Eigen::Index i = 0; i < f.size(); ++i) {
            os << fmt_double(f[i]) << '\n';
        }
        written.push_back(p);
        break;
    }
    case ExperimentKind::Beam: {
        const FemSystem sys =
            beam_system(config.beam_mesh, config.material, config.plane);
        put("K.banded", sys.k);
        put("M.banded", *sys.m);
        break;
    }
    case ExperimentKind::CustomGep:
    case ExperimentKind::BiasStudy:
        put("A.banded", read_banded_file(config.matrix_a.string()));
        put("B.banded", read_banded_file(config.matrix_b.string()));
        break;
    }
    return written;
}

void write_classical_spectrum(std::ostream &os,
                              const ExperimentConfig &config) {
    config.validate();
    CMatrix a;
    CMatrix b;
    switch (config.experiment) {
    case ExperimentKind::Poisson: {
        const std::size_t n = config.poisson_nodes;
        const CVector f =
            assemble_poisson_load(step_samples(n)).cast<Complex>();
        a = f * f.adjoint();
        b = assemble_poisson_1d(Mesh1D::unit_interval(n)).k.to_dense();
        break;
    }
    case ExperimentKind::Beam: {
        const FemSystem sys =
            beam_system(config.beam_mesh, config.material, config.plane);
        a = sys.k.to_dense();
        b = sys.m->to_dense();
        break;
    }
    case ExperimentKind::CustomGep:
    case ExperimentKind::BiasStudy:
        a = read_banded_file(config.matrix_a.string()).to_dense();
        b = read_banded_file(config.matrix_b.string()).to_dense();
        break;
    }
    const auto pairs = classical_reference_solve(a, b);
    const bool beam = config.experiment == ExperimentKind::Beam;
    os << "index,eigenvalue" << (beam ? ",frequency_hz" : "") << '\n';
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        os << i << ',' << fmt_double(pairs[i].value);
        if (beam) {
            os << ','
               << fmt_double(std::sqrt(std::max(0.0, pairs[i].value)) /
                             (2.0 * std::numbers::pi));
        }
        os << '\n';
    }
}

} // namespace vqgep

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

// vqgep: batch runner for the variational GEP experiments.
//
//   vqgep run <config> [--set key=value]... [--output dir] [--workers n]
//   vqgep export-pencil <config> --dir out
//   vqgep solve-classical <config>
//
// Exit codes: 0 success, 2 invalid input, 3 numerical failure, 4 I/O.

#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "vqgep/experiment.hpp"

namespace {

int exit_code(const vqgep::Error &e) {
    const std::string cat = e.category();
    if (cat == "numerical") {
        return 3;
    }
    if (cat == "io") {
        return 4;
    }
    return 2;
}

vqgep::ExperimentConfig load(const std::string &path,
                             const std::vector<std::string> &overrides) {
    auto cfg = vqgep::ExperimentConfig::load(path);
    for (const auto &o : overrides) {
        cfg.apply_override(o);
    }
    cfg.validate();
    return cfg;
}

} // namespace

int main(int argc, char **argv) {
    CLI::App app{"Variational generalized eigenvalue solver experiments"};
    app.require_subcommand(1);

    std::string config_path;
    std::vector<std::string> overrides;

    auto *run = app.add_subcommand("run", "run the configured experiment");
    run->add_option("config", config_path, "config file")->required();
    run->add_option("--set", overrides, "override a config key (key=value)");
    std::string output;
    run->add_option("--output", output, "output directory");
    std::size_t workers = 0;
    run->add_option("--workers", workers, "concurrent trials");

    auto *exp = app.add_subcommand("export-pencil",
                                   "write the problem matrices as banded text");
    exp->add_option("config", config_path, "config file")->required();
    exp->add_option("--set", overrides, "override a config key (key=value)");
    std::string dir = "pencil";
    exp->add_option("--dir", dir, "destination directory");

    auto *solve = app.add_subcommand("solve-classical",
                                     "print the dense reference spectrum");
    solve->add_option("config", config_path, "config file")->required();
    solve->add_option("--set", overrides, "override a config key (key=value)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        if (run->parsed()) {
            if (!output.empty()) {
                overrides.push_back("output=" + output);
            }
            if (workers > 0) {
                overrides.push_back("workers=" + std::to_string(workers));
            }
            const auto cfg = load(config_path, overrides);
            const auto result = vqgep::run_experiment(cfg);
            std::size_t failed = 0;
            for (const auto &t : result.trials) {
                if (t.status != "ok") {
                    ++failed;
                    std::cerr << "trial " << t.index << ": " << t.status
                              << ": " << t.message << '\n';
                }
            }
            std::cout << "wrote " << cfg.output.string() << '\n';
            if (!result.trials.empty() && failed == result.trials.size()) {
                return 3;
            }
        } else if (exp->parsed()) {
            const auto cfg = load(config_path, overrides);
            for (const auto &p : vqgep::export_pencil(cfg, dir)) {
                std::cout << p.string() << '\n';
            }
        } else if (solve->parsed()) {
            const auto cfg = load(config_path, overrides);
            vqgep::write_classical_spectrum(std::cout, cfg);
        }
    } catch (const vqgep::Error &e) {
        std::cerr << "vqgep: " << e.category() << " error: " << e.what()
                  << '\n';
        return exit_code(e);
    } catch (const std::exception &e) {
        std::cerr << "vqgep: error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}

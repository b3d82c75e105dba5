// Copyright 2026 The thermshadow Authors
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

#include <cstdint>
#include <exception>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "thermshadow/experiments.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitOther = 1;

struct Flags {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::string out;
    int threads = 0;
};

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Thermal pure-state shadow experiments"};
    app.set_version_flag("--version", thermshadow::kVersion);
    app.require_subcommand(1);

    Flags flags;
    const char* kinds[] = {"tpq-sweep", "shadow-compare", "purity-scan", "tpq-ensemble", "qbm-train"};
    const char* help[] = {"Pauli error of polynomial TPQ states vs degree and beta",
                          "shadow error vs count for Gibbs, exact-TPQ and polynomial-TPQ sources",
                          "Gibbs-state purity vs system size",
                          "mean error of averaged TPQ ensembles vs system size",
                          "quantum Boltzmann machine training"};
    for (int i = 0; i < 5; ++i) {
        CLI::App* sub = app.add_subcommand(kinds[i], help[i]);
        sub->add_option("--config", flags.config, "experiment config file")->required()->check(CLI::ExistingFile);
        sub->add_option("--seed", flags.seed, "overrides the config seed");
        sub->add_option("--out", flags.out, "output directory (default: config out_dir)");
        sub->add_option("--threads", flags.threads, "OpenMP threads (0 keeps the default)")->check(CLI::NonNegativeNumber);
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfig;
    }

    const std::string kind = app.get_subcommands().front()->get_name();
    thermshadow::RunContext ctx;
    ctx.seed_override = flags.seed.has_value();
    ctx.seed = flags.seed.value_or(0);
    ctx.out_dir = flags.out;
    ctx.threads = flags.threads;

    try {
        const auto cfg = thermshadow::Config::load(flags.config);
        for (const auto& path : thermshadow::run_experiment(kind, cfg, ctx)) std::cout << path.string() << '\n';
        return kExitOk;
    } catch (const thermshadow::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const thermshadow::NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return kExitNumerical;
    } catch (const std::invalid_argument& e) {
        std::cerr << "invalid configuration: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitOther;
    }
}

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

#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "thermshadow/config.hpp"
#include "thermshadow/models.hpp"
#include "thermshadow/qbm.hpp"

namespace thermshadow {

inline constexpr const char* kVersion = "thermshadow 1.0.0";

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    std::string to_string() const;
    void write(const std::filesystem::path& path) const;
};

/// Shortest round-trip text for a double.
std::string format_double(double v);

struct ChainModel {
    int n = 10;
    double J = 0.5;
    double Delta = 0.75;
    Boundary boundary = Boundary::Open;
};

/// Per (beta, degree): max error over all one- and two-qubit Paulis between
/// the Gibbs state and the polynomial TPQ expectations averaged over U seeds.
/// Every (beta, degree) cell reuses the same U seeds.
struct TpqSweepParams {
    ChainModel model;
    std::vector<double> betas;
    std::vector<int> degrees;
    std::size_t seeds = 10;
    std::uint64_t seed = 0;
    WindowMode window = WindowMode::CoefficientBound;
};

struct TpqSweepRow {
    double beta;
    int degree;
    double max_err;
    std::size_t seed_count;
};

std::vector<TpqSweepRow> run_tpq_degree_sweep(const TpqSweepParams& p);
CsvTable tpq_sweep_table(std::span<const TpqSweepRow> rows);

enum class ShadowSource { Gibbs, TpqExact, TpqPoly };
std::string source_name(ShadowSource s);
ShadowSource parse_source_name(std::string_view name);

/// Shadows of the Gibbs state (eigenstates drawn with Boltzmann weights), of
/// exact TPQ states and of polynomial TPQ states. Every shadow uses a fresh
/// TPQ unitary. Counts are nested prefixes of one snapshot stream per method,
/// and every method draws from the same seed.
struct ShadowCompareParams {
    ChainModel model;
    double beta = 1.0;
    int degree = 32;
    std::vector<std::size_t> shadow_counts;
    std::vector<ShadowSource> methods = {ShadowSource::Gibbs, ShadowSource::TpqExact, ShadowSource::TpqPoly};
    ShadowKind kind = ShadowKind::Pauli;
    std::size_t groups = 1;
    std::uint64_t seed = 0;
    WindowMode window = WindowMode::CoefficientBound;
};

struct ShadowCompareRow {
    ShadowSource method;
    std::size_t n_shadows;
    double max_err;
};

std::vector<ShadowCompareRow> run_shadow_compare(const ShadowCompareParams& p);
CsvTable shadow_compare_table(std::span<const ShadowCompareRow> rows);

/// Boltzmann weights used by the Gibbs shadow source, in eigenvalue order.
RVector gibbs_mixture_weights(const ThermalSpectrum& spectrum, double beta);

struct PurityScanParams {
    std::vector<std::string> models = {"xxz", "random"};
    double J = 0.5;
    double Delta = 0.7;
    Boundary boundary = Boundary::Closed;
    std::vector<double> betas;
    std::vector<int> ns;
    std::uint64_t seed = 0;  // random-model coefficients, one stream per n
};

struct PurityScanRow {
    std::string model;
    double beta;
    int n;
    double purity;
};

std::vector<PurityScanRow> run_purity_scan(const PurityScanParams& p);
CsvTable purity_scan_table(std::span<const PurityScanRow> rows);

/// Mean absolute error over the one-qubit Paulis and XX/YY/ZZ pairs of the
/// average of `size` exact TPQ states, repeated `repetitions` times.
struct TpqEnsembleParams {
    ChainModel model;
    double beta = 1.0;
    std::vector<int> ns;
    std::vector<std::size_t> ensemble_sizes = {1, 5, 10, 100};
    std::size_t repetitions = 20;
    std::uint64_t seed = 0;
};

struct TpqEnsembleRow {
    int n;
    std::size_t ensemble_size;
    double mean_err;
    double std_err;  // standard error of mean_err over repetitions
};

std::vector<TpqEnsembleRow> run_tpq_ensemble(const TpqEnsembleParams& p);
CsvTable tpq_ensemble_table(std::span<const TpqEnsembleRow> rows);

struct QbmTrainParams {
    int n = 8;
    std::string target = "gibbs";  // gibbs | classical
    ChainModel model;               // gibbs target Hamiltonian
    double target_beta = 1.0;
    std::string samples_path;       // classical target; empty means synthetic
    int support = 6;                // synthetic classical target
    std::size_t sample_count = 1000;
    std::vector<GradientBackendKind> backends = {GradientBackendKind::Exact};
    GradientBackend shadow_settings;  // shared by the tpq and shadows backends
    TrainOptions options;
    double init_scale = 0.1;
    bool log_wall_time = false;
};

struct QbmBackendResult {
    GradientBackendKind backend;
    TrainState state;
    std::vector<double> model_prob;  // classical targets only
    double total_variation = 0.0;
    std::string error;  // non-empty when training aborted
};

struct QbmTrainResult {
    TargetState target;
    std::vector<double> q;  // classical targets only
    std::vector<QbmBackendResult> backends;
};

QbmTrainResult run_qbm_train(const QbmTrainParams& p);
CsvTable qbm_log_table(const TrainState& state, bool log_wall_time);
CsvTable distribution_table(std::span<const double> q, std::span<const double> model_prob, int n);

/// Key schema of each experiment kind.
std::span<const KeySpec> experiment_schema(std::string_view kind);
bool is_experiment_kind(std::string_view kind);

struct RunContext {
    std::uint64_t seed = 0;
    bool seed_override = false;
    std::filesystem::path out_dir;  // empty: use the config's out_dir
    int threads = 0;  // 0 keeps the OpenMP default
};

/// Validates `cfg` against the kind's schema, runs it, writes the CSVs and a
/// `<kind>.json` metadata file. Returns the paths written.
std::vector<std::filesystem::path> run_experiment(std::string_view kind, Config cfg, const RunContext& ctx);

}  // namespace thermshadow

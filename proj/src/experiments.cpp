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

#include "thermshadow/experiments.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>
#include <stdexcept>

#include <omp.h>

namespace thermshadow {

std::string CsvTable::to_string() const {
    std::string out;
    auto line = [&](const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) out += ',';
            out += cells[i];
        }
        out += '\n';
    };
    line(header);
    for (const auto& r : rows) line(r);
    return out;
}

void CsvTable::write(const std::filesystem::path& path) const {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + path.string());
    f << to_string();
    if (!f) throw std::runtime_error("write failed for " + path.string());
}

std::string format_double(double v) {
    char buf[64];
    const auto r = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, r.ptr);
}

namespace {

PauliSum chain(const ChainModel& m) { return build_xxz(m.n, m.J, m.Delta, m.boundary); }

std::vector<double> gibbs_expectations(const ThermalSpectrum& spec, double beta, std::span<const PauliString> obs) {
    const DensityOperator rho{spec.num_qubits(), spec.density(beta)};
    std::vector<double> out(obs.size());
    for (std::size_t k = 0; k < obs.size(); ++k) out[k] = rho.expectation(obs[k]);
    return out;
}

double max_abs_error(std::span<const double> a, std::span<const double> b) {
    double m = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) m = std::max(m, std::abs(a[k] - b[k]));
    return m;
}

std::vector<double> state_expectations(const StateVector& psi, std::span<const PauliString> obs) {
    std::vector<double> out(obs.size());
    for (std::size_t k = 0; k < obs.size(); ++k) out[k] = pauli_expectation(psi, obs[k]);
    return out;
}

/// First exception thrown inside an OpenMP loop, rethrown after it.
class LoopErrors {
public:
    template <class F>
    void run(F&& f) {
        try {
            f();
        } catch (...) {
#pragma omp critical(thermshadow_loop_errors)
            if (!error_) error_ = std::current_exception();
        }
    }
    void rethrow() const {
        if (error_) std::rethrow_exception(error_);
    }

private:
    std::exception_ptr error_;
};

}  // namespace

std::vector<TpqSweepRow> run_tpq_degree_sweep(const TpqSweepParams& p) {
    if (p.seeds < 1) throw std::invalid_argument("tpq sweep needs at least one seed");
    if (p.betas.empty() || p.degrees.empty()) throw std::invalid_argument("tpq sweep needs betas and degrees");
    const PauliSum h = chain(p.model);
    const ThermalSpectrum spec(h);
    const SpectralWindow w = spectral_window(h, p.window);
    const auto obs = local_paulis_up_to_two(p.model.n);
    const int n = p.model.n;

    std::vector<StateVector> initial;
    for (std::size_t s = 0; s < p.seeds; ++s) {
        Rng rng(derive_key(p.seed, s));
        initial.push_back(stabilizer_state(sample_clifford(n, rng)));
    }

    std::vector<std::vector<double>> reference;
    std::vector<PolynomialPropagator> props;
    for (double beta : p.betas) {
        reference.push_back(gibbs_expectations(spec, beta, obs));
        const double tau = rescale(h, w, beta).tau;
        for (int d : p.degrees) props.emplace_back(h, beta, chebyshev_fit(tau, d), w);
    }

    const std::size_t nd = p.degrees.size();
    const std::size_t cells = p.betas.size() * nd * p.seeds;
    std::vector<std::vector<double>> expect(cells);
    LoopErrors errors;
#pragma omp parallel for schedule(dynamic)
    for (std::int64_t c = 0; c < static_cast<std::int64_t>(cells); ++c) {
        errors.run([&] {
            const auto cell = static_cast<std::size_t>(c);
            expect[cell] = state_expectations(props[cell / p.seeds].propagate(initial[cell % p.seeds]), obs);
        });
    }
    errors.rethrow();

    std::vector<TpqSweepRow> rows;
    for (std::size_t b = 0; b < p.betas.size(); ++b) {
        for (std::size_t d = 0; d < nd; ++d) {
            std::vector<double> avg(obs.size(), 0.0);
            for (std::size_t s = 0; s < p.seeds; ++s) {
                const auto& e = expect[(b * nd + d) * p.seeds + s];
                for (std::size_t k = 0; k < obs.size(); ++k) avg[k] += e[k];
            }
            for (double& v : avg) v /= static_cast<double>(p.seeds);
            rows.push_back({p.betas[b], p.degrees[d], max_abs_error(avg, reference[b]), p.seeds});
        }
    }
    return rows;
}

CsvTable tpq_sweep_table(std::span<const TpqSweepRow> rows) {
    CsvTable t{{"beta", "degree", "max_err", "seed_count"}, {}};
    for (const auto& r : rows)
        t.rows.push_back({format_double(r.beta), std::to_string(r.degree), format_double(r.max_err), std::to_string(r.seed_count)});
    return t;
}

std::string source_name(ShadowSource s) {
    switch (s) {
        case ShadowSource::Gibbs: return "gibbs";
        case ShadowSource::TpqExact: return "tpq-exact";
        case ShadowSource::TpqPoly: return "tpq-poly";
    }
    return "?";
}

ShadowSource parse_source_name(std::string_view name) {
    for (auto s : {ShadowSource::Gibbs, ShadowSource::TpqExact, ShadowSource::TpqPoly})
        if (source_name(s) == name) return s;
    throw std::invalid_argument("unknown shadow source '" + std::string(name) + "'");
}

RVector gibbs_mixture_weights(const ThermalSpectrum& spectrum, double beta) { return spectrum.weights(beta); }

std::vector<ShadowCompareRow> run_shadow_compare(const ShadowCompareParams& p) {
    if (p.shadow_counts.empty()) throw std::invalid_argument("shadow compare needs shadow counts");
    if (p.groups < 1) throw std::invalid_argument("groups must be positive");
    std::vector<std::size_t> counts = p.shadow_counts;
    std::sort(counts.begin(), counts.end());
    if (counts.front() < p.groups) throw std::invalid_argument("every shadow count must be at least the group count");
    const std::size_t total = counts.back();

    const int n = p.model.n;
    const PauliSum h = chain(p.model);
    const ThermalSpectrum spec(h);
    const auto obs = local_paulis_up_to_two(n);
    const auto reference = gibbs_expectations(spec, p.beta, obs);

    std::vector<ShadowCompareRow> rows;
    for (ShadowSource method : p.methods) {
        StatePreparer prep;
        std::optional<ExactPropagator> exact;
        std::optional<PolynomialPropagator> poly;
        std::vector<double> cumulative;
        switch (method) {
            case ShadowSource::Gibbs: {
                const RVector w = gibbs_mixture_weights(spec, p.beta);
                double acc = 0.0;
                for (Eigen::Index k = 0; k < w.size(); ++k) cumulative.push_back(acc += w[k]);
                prep = [&](std::size_t, Rng& rng) {
                    const double r = rng.uniform() * cumulative.back();
                    const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), r);
                    const auto k = std::min<std::ptrdiff_t>(it - cumulative.begin(), static_cast<std::ptrdiff_t>(cumulative.size()) - 1);
                    return StateVector::from_amplitudes(n, spec.eig().eigenvectors.col(k));
                };
                break;
            }
            case ShadowSource::TpqExact:
                exact.emplace(spec, p.beta);
                prep = [&](std::size_t, Rng& rng) { return exact->propagate(stabilizer_state(sample_clifford(n, rng))); };
                break;
            case ShadowSource::TpqPoly: {
                const SpectralWindow w = spectral_window(h, p.window);
                poly.emplace(h, p.beta, chebyshev_fit(rescale(h, w, p.beta).tau, p.degree), w);
                prep = [&](std::size_t, Rng& rng) { return poly->propagate(stabilizer_state(sample_clifford(n, rng))); };
                break;
            }
        }
        const auto recs = collect_shadows(p.kind, n, total, p.seed, prep);
        for (std::size_t c : p.shadow_counts) {
            const std::span<const ShadowRecord> prefix(recs.data(), c);
            const std::size_t N = c / p.groups;
            std::vector<double> est;
            if (p.kind == ShadowKind::Pauli) {
                est = median_of_means_pauli(prefix, obs, N, p.groups);
            } else {
                std::vector<double> vals(c);
                for (const auto& o : obs) {
                    for (std::size_t i = 0; i < c; ++i) vals[i] = estimate_clifford(prefix[i], o);
                    est.push_back(median_of_means(vals, N, p.groups));
                }
            }
            rows.push_back({method, c, max_abs_error(est, reference)});
        }
    }
    return rows;
}

CsvTable shadow_compare_table(std::span<const ShadowCompareRow> rows) {
    CsvTable t{{"method", "n_shadows", "max_err"}, {}};
    for (const auto& r : rows) t.rows.push_back({source_name(r.method), std::to_string(r.n_shadows), format_double(r.max_err)});
    return t;
}

std::vector<PurityScanRow> run_purity_scan(const PurityScanParams& p) {
    std::vector<PurityScanRow> rows;
    for (const auto& model : p.models) {
        std::map<int, ThermalSpectrum> spectra;
        for (int n : p.ns) {
            if (model == "xxz") spectra.emplace(n, ThermalSpectrum(build_xxz(n, p.J, p.Delta, p.boundary)));
            else if (model == "random") spectra.emplace(n, ThermalSpectrum(build_random_xyz(n, p.seed)));
            else throw std::invalid_argument("unknown purity-scan model '" + model + "'");
        }
        for (double beta : p.betas)
            for (int n : p.ns) rows.push_back({model, beta, n, purity_and_decay(spectra.at(n), beta).purity});
    }
    return rows;
}

CsvTable purity_scan_table(std::span<const PurityScanRow> rows) {
    CsvTable t{{"model", "beta", "n", "purity"}, {}};
    for (const auto& r : rows) t.rows.push_back({r.model, format_double(r.beta), std::to_string(r.n), format_double(r.purity)});
    return t;
}

std::vector<TpqEnsembleRow> run_tpq_ensemble(const TpqEnsembleParams& p) {
    if (p.ensemble_sizes.empty() || p.repetitions < 1) throw std::invalid_argument("tpq ensemble needs sizes and repetitions");
    const std::size_t largest = *std::max_element(p.ensemble_sizes.begin(), p.ensemble_sizes.end());
    if (largest < 1) throw std::invalid_argument("ensemble sizes must be positive");

    std::vector<TpqEnsembleRow> rows;
    for (int n : p.ns) {
        ChainModel m = p.model;
        m.n = n;
        const ThermalSpectrum spec(chain(m));
        const ExactPropagator prop(spec, p.beta);
        const auto obs = ensemble_observables(n);
        const auto reference = gibbs_expectations(spec, p.beta, obs);
        const std::uint64_t key_n = derive_key(p.seed, static_cast<std::uint64_t>(n));

        const std::size_t cells = p.repetitions * largest;
        std::vector<std::vector<double>> expect(cells);
        LoopErrors errors;
#pragma omp parallel for schedule(dynamic)
        for (std::int64_t c = 0; c < static_cast<std::int64_t>(cells); ++c) {
            errors.run([&] {
                const auto cell = static_cast<std::size_t>(c);
                Rng rng(derive_key(derive_key(key_n, cell / largest), cell % largest));
                expect[cell] = state_expectations(prop.prepare(sample_clifford(n, rng)).state, obs);
            });
        }
        errors.rethrow();

        for (std::size_t size : p.ensemble_sizes) {
            std::vector<double> per_rep;
            for (std::size_t r = 0; r < p.repetitions; ++r) {
                double err = 0.0;
                for (std::size_t k = 0; k < obs.size(); ++k) {
                    double avg = 0.0;
                    for (std::size_t j = 0; j < size; ++j) avg += expect[r * largest + j][k];
                    err += std::abs(avg / static_cast<double>(size) - reference[k]);
                }
                per_rep.push_back(err / static_cast<double>(obs.size()));
            }
            double mean = 0.0;
            for (double v : per_rep) mean += v;
            mean /= static_cast<double>(per_rep.size());
            double var = 0.0;
            for (double v : per_rep) var += (v - mean) * (v - mean);
            const double reps = static_cast<double>(per_rep.size());
            const double se = per_rep.size() > 1 ? std::sqrt(var / (reps - 1.0) / reps) : 0.0;
            rows.push_back({n, size, mean, se});
        }
    }
    return rows;
}

CsvTable tpq_ensemble_table(std::span<const TpqEnsembleRow> rows) {
    CsvTable t{{"n", "ensemble_size", "mean_err", "std_err"}, {}};
    for (const auto& r : rows)
        t.rows.push_back({std::to_string(r.n), std::to_string(r.ensemble_size), format_double(r.mean_err), format_double(r.std_err)});
    return t;
}

QbmTrainResult run_qbm_train(const QbmTrainParams& p) {
    const std::uint64_t seed = p.options.seed;
    QbmTrainResult out{[&] {
                           if (p.target == "gibbs") {
                               ChainModel m = p.model;
                               m.n = p.n;
                               return TargetState::from_gibbs(chain(m), p.target_beta);
                           }
                           return TargetState::from_pure(StateVector(1));
                       }(),
                       {},
                       {}};
    int n = p.n;
    if (p.target == "classical") {
        std::vector<std::uint64_t> samples;
        if (p.samples_path.empty()) {
            samples = sample_sparse_distribution(n, p.support, p.sample_count, derive_key(seed, 0xda7a));
        } else {
            samples = read_bitstring_samples(p.samples_path, n);
        }
        out.q = empirical_distribution(samples, n);
        out.target = encode_classical(out.q, n);
    } else if (p.target != "gibbs") {
        throw std::invalid_argument("unknown qbm target '" + p.target + "'");
    }

    const auto theta0 = initial_theta(n, seed, p.init_scale);
    for (GradientBackendKind kind : p.backends) {
        GradientBackend b = p.shadow_settings;
        b.kind = kind;
        QbmBackendResult r{kind, {}, {}, 0.0, {}};
        std::vector<TrainRecord> seen;
        try {
            r.state = train(out.target, theta0, b, p.options, [&](const TrainRecord& rec) { seen.push_back(rec); });
        } catch (const NumericalError& e) {
            r.error = e.what();
            r.state.history = seen;
            r.state.step = seen.empty() ? 0 : seen.back().step;
            r.state.theta = theta0;
        }
        if (p.target == "classical") {
            r.model_prob = model_distribution(n, r.state.theta);
            r.total_variation = total_variation(out.q, r.model_prob);
        }
        out.backends.push_back(std::move(r));
    }
    return out;
}

CsvTable qbm_log_table(const TrainState& state, bool log_wall_time) {
    CsvTable t{{"step", "S", "eps_max", "eps_mean", "wall_time"}, {}};
    for (const auto& r : state.history)
        t.rows.push_back({std::to_string(r.step), format_double(r.S), format_double(r.eps_max), format_double(r.eps_mean),
                          format_double(log_wall_time ? r.wall_time : 0.0)});
    return t;
}

CsvTable distribution_table(std::span<const double> q, std::span<const double> model_prob, int n) {
    CsvTable t{{"bitstring", "q", "model_prob"}, {}};
    for (std::size_t s = 0; s < q.size(); ++s)
        t.rows.push_back({format_bitstring(s, n), format_double(q[s]), format_double(model_prob[s])});
    return t;
}

namespace {

const std::vector<std::string> kKinds = {"tpq-sweep", "shadow-compare", "purity-scan", "tpq-ensemble", "qbm-train"};

std::vector<KeySpec> common_keys(std::string_view kind) {
    return {{"experiment", ValueType::String, std::string(kind), {std::string(kind)}},
            {"seed", ValueType::UInt, "0"},
            {"out_dir", ValueType::String, "."}};
}

std::vector<KeySpec> chain_keys(const char* n, const char* delta, const char* boundary) {
    return {{"n", ValueType::Int, n},
            {"j", ValueType::Double, "0.5"},
            {"delta", ValueType::Double, delta},
            {"boundary", ValueType::String, boundary, {"open", "closed"}}};
}

const KeySpec kWindowKey{"window", ValueType::String, "coefficient-bound", {"coefficient-bound", "exact"}};

std::vector<KeySpec> build_schema(std::string_view kind) {
    std::vector<KeySpec> s = common_keys(kind);
    auto add = [&](std::vector<KeySpec> more) { s.insert(s.end(), more.begin(), more.end()); };
    if (kind == "tpq-sweep") {
        add(chain_keys("10", "0.75", "open"));
        add({{"betas", ValueType::DoubleList, std::nullopt},
             {"degrees", ValueType::IntList, std::nullopt},
             {"seeds", ValueType::UInt, "10"},
             kWindowKey});
    } else if (kind == "shadow-compare") {
        add(chain_keys("10", "0.75", "open"));
        add({{"beta", ValueType::Double, "1"},
             {"degree", ValueType::Int, "32"},
             {"shadow_counts", ValueType::UIntList, std::nullopt},
             {"methods", ValueType::StringList, "gibbs,tpq-exact,tpq-poly", {"gibbs", "tpq-exact", "tpq-poly"}},
             {"shadow_kind", ValueType::String, "pauli", {"pauli", "clifford"}},
             {"groups", ValueType::UInt, "1"},
             kWindowKey});
    } else if (kind == "purity-scan") {
        add({{"models", ValueType::StringList, "xxz,random", {"xxz", "random"}},
             {"j", ValueType::Double, "0.5"},
             {"delta", ValueType::Double, "0.7"},
             {"boundary", ValueType::String, "closed", {"open", "closed"}},
             {"betas", ValueType::DoubleList, std::nullopt},
             {"ns", ValueType::IntList, std::nullopt}});
    } else if (kind == "tpq-ensemble") {
        add({{"j", ValueType::Double, "0.5"},
             {"delta", ValueType::Double, "0.7"},
             {"boundary", ValueType::String, "closed", {"open", "closed"}},
             {"beta", ValueType::Double, "1"},
             {"ns", ValueType::IntList, std::nullopt},
             {"ensemble_sizes", ValueType::UIntList, "1,5,10,100"},
             {"repetitions", ValueType::UInt, "20"}});
    } else if (kind == "qbm-train") {
        add(chain_keys("8", "0.75", "open"));
        add({{"target", ValueType::String, "gibbs", {"gibbs", "classical"}},
             {"target_beta", ValueType::Double, "1"},
             {"samples", ValueType::String, ""},
             {"support", ValueType::Int, "6"},
             {"sample_count", ValueType::UInt, "1000"},
             {"backends", ValueType::StringList, "exact", {"exact", "tpq", "shadows"}},
             {"lr", ValueType::Double, "0.1"},
             {"steps", ValueType::UInt, "100"},
             {"init_scale", ValueType::Double, "0.1"},
             {"tpq_states", ValueType::UInt, "1"},
             {"shadow_count", ValueType::UInt, "5000"},
             {"groups", ValueType::UInt, "10"},
             {"shadow_kind", ValueType::String, "pauli", {"pauli", "clifford"}},
             {"prep", ValueType::String, "polynomial", {"polynomial", "exact"}},
             {"degree", ValueType::Int, "32"},
             kWindowKey,
             {"divergence_tol", ValueType::Double, "0"},
             {"divergence_patience", ValueType::UInt, "10"},
             {"grad_tol", ValueType::Double, "0"},
             {"log_wall_time", ValueType::Bool, "false"}});
    }
    return s;
}

const std::map<std::string, std::vector<KeySpec>, std::less<>>& schemas() {
    static const auto table = [] {
        std::map<std::string, std::vector<KeySpec>, std::less<>> m;
        for (const auto& k : kKinds) m.emplace(k, build_schema(k));
        return m;
    }();
    return table;
}

Boundary boundary_of(const Config& c) { return c.get_string("boundary") == "closed" ? Boundary::Closed : Boundary::Open; }
WindowMode window_of(const Config& c) {
    return c.get_string("window") == "exact" ? WindowMode::Exact : WindowMode::CoefficientBound;
}
ShadowKind shadow_kind_of(const Config& c) {
    return c.get_string("shadow_kind") == "clifford" ? ShadowKind::Clifford : ShadowKind::Pauli;
}

int to_int(std::int64_t v, const char* what) {
    if (v < -1000000 || v > 1000000) throw std::invalid_argument(std::string(what) + " is out of range");
    return static_cast<int>(v);
}

ChainModel chain_of(const Config& c) {
    return {to_int(c.get_int("n"), "n"), c.get_double("j"), c.get_double("delta"), boundary_of(c)};
}

std::vector<int> ints_of(const Config& c, const std::string& key) {
    std::vector<int> out;
    for (auto v : c.get_ints(key)) out.push_back(to_int(v, key.c_str()));
    return out;
}

std::vector<std::size_t> sizes_of(const Config& c, const std::string& key) {
    std::vector<std::size_t> out;
    for (auto v : c.get_uints(key)) out.push_back(static_cast<std::size_t>(v));
    return out;
}

std::string utc_now() {
    const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    std::ostringstream os;
    os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
    return os.str();
}

void write_json(const std::filesystem::path& path, const nlohmann::json& j) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot write " + path.string());
    f << j.dump(2) << '\n';
}

}  // namespace

std::span<const KeySpec> experiment_schema(std::string_view kind) {
    const auto it = schemas().find(kind);
    if (it == schemas().end()) throw std::invalid_argument("unknown experiment kind '" + std::string(kind) + "'");
    return it->second;
}

bool is_experiment_kind(std::string_view kind) { return schemas().count(kind) != 0; }

std::vector<std::filesystem::path> run_experiment(std::string_view kind, Config cfg, const RunContext& ctx) {
    const auto schema = experiment_schema(kind);
    if (ctx.seed_override) cfg.set("seed", std::to_string(ctx.seed));
    cfg.validate(schema);
    if (ctx.threads > 0) omp_set_num_threads(ctx.threads);

    const std::uint64_t seed = cfg.get_uint("seed");
    const std::filesystem::path dir = ctx.out_dir.empty() ? std::filesystem::path(cfg.get_string("out_dir")) : ctx.out_dir;
    std::filesystem::create_directories(dir);

    const auto t0 = std::chrono::steady_clock::now();
    const std::string started = utc_now();
    std::vector<std::filesystem::path> written;
    nlohmann::json summary = nlohmann::json::object();
    std::string failure;

    auto emit = [&](const CsvTable& t, const std::string& name) {
        const auto path = dir / name;
        t.write(path);
        written.push_back(path);
    };

    if (kind == "tpq-sweep") {
        TpqSweepParams p{chain_of(cfg), cfg.get_doubles("betas"), ints_of(cfg, "degrees"), cfg.get_uint("seeds"), seed, window_of(cfg)};
        emit(tpq_sweep_table(run_tpq_degree_sweep(p)), "tpq_sweep.csv");
    } else if (kind == "shadow-compare") {
        ShadowCompareParams p;
        p.model = chain_of(cfg);
        p.beta = cfg.get_double("beta");
        p.degree = to_int(cfg.get_int("degree"), "degree");
        p.shadow_counts = sizes_of(cfg, "shadow_counts");
        p.methods.clear();
        for (const auto& m : cfg.get_strings("methods")) p.methods.push_back(parse_source_name(m));
        p.kind = shadow_kind_of(cfg);
        p.groups = cfg.get_uint("groups");
        p.seed = seed;
        p.window = window_of(cfg);
        emit(shadow_compare_table(run_shadow_compare(p)), "shadow_compare.csv");
    } else if (kind == "purity-scan") {
        PurityScanParams p{cfg.get_strings("models"), cfg.get_double("j"), cfg.get_double("delta"), boundary_of(cfg),
                           cfg.get_doubles("betas"), ints_of(cfg, "ns"), seed};
        emit(purity_scan_table(run_purity_scan(p)), "purity_scan.csv");
    } else if (kind == "tpq-ensemble") {
        TpqEnsembleParams p;
        p.model = {0, cfg.get_double("j"), cfg.get_double("delta"), boundary_of(cfg)};
        p.beta = cfg.get_double("beta");
        p.ns = ints_of(cfg, "ns");
        p.ensemble_sizes = sizes_of(cfg, "ensemble_sizes");
        p.repetitions = cfg.get_uint("repetitions");
        p.seed = seed;
        emit(tpq_ensemble_table(run_tpq_ensemble(p)), "tpq_ensemble.csv");
    } else {
        QbmTrainParams p;
        p.n = to_int(cfg.get_int("n"), "n");
        p.target = cfg.get_string("target");
        p.model = chain_of(cfg);
        p.target_beta = cfg.get_double("target_beta");
        p.samples_path = cfg.get_string("samples");
        p.support = to_int(cfg.get_int("support"), "support");
        p.sample_count = cfg.get_uint("sample_count");
        p.backends.clear();
        for (const auto& b : cfg.get_strings("backends")) p.backends.push_back(parse_backend_name(b));
        GradientBackend& g = p.shadow_settings;
        g.tpq_states = cfg.get_uint("tpq_states");
        g.shadow_count = cfg.get_uint("shadow_count");
        g.groups = cfg.get_uint("groups");
        g.shadow_kind = shadow_kind_of(cfg);
        g.prep = cfg.get_string("prep") == "exact" ? TpqBackend::Exact : TpqBackend::Polynomial;
        g.degree = to_int(cfg.get_int("degree"), "degree");
        g.window = window_of(cfg);
        p.options.lr = cfg.get_double("lr");
        p.options.steps = cfg.get_uint("steps");
        p.options.seed = seed;
        p.options.divergence_tol = cfg.get_double("divergence_tol");
        p.options.divergence_patience = cfg.get_uint("divergence_patience");
        p.options.grad_tol = cfg.get_double("grad_tol");
        p.init_scale = cfg.get_double("init_scale");
        p.log_wall_time = cfg.get_bool("log_wall_time");

        const QbmTrainResult res = run_qbm_train(p);
        const int n = res.target.num_qubits();
        nlohmann::json per = nlohmann::json::object();
        for (const auto& b : res.backends) {
            const std::string name = backend_name(b.backend);
            emit(qbm_log_table(b.state, p.log_wall_time), "qbm_" + name + ".csv");
            nlohmann::json j;
            const auto& last = b.state.history.back();
            j["steps"] = b.state.step;
            j["final_S"] = last.S;
            j["final_eps_max"] = last.eps_max;
            j["final_eps_mean"] = last.eps_mean;
            j["converged"] = b.state.converged;
            if (!res.q.empty()) {
                emit(distribution_table(res.q, b.model_prob, n), "distribution_" + name + ".csv");
                j["total_variation"] = b.total_variation;
            }
            if (!b.error.empty()) {
                j["error"] = b.error;
                if (failure.empty()) failure = name + ": " + b.error;
            }
            per[name] = j;
        }
        summary["target"] = res.target.provenance();
        summary["n"] = n;
        summary["backends"] = per;
    }

    nlohmann::json meta;
    meta["kind"] = std::string(kind);
    meta["version"] = kVersion;
    meta["seed"] = seed;
    meta["config"] = cfg.to_json();
    meta["config_text"] = cfg.to_text();
    meta["started_at"] = started;
    meta["wall_time_seconds"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    meta["threads"] = omp_get_max_threads();
    nlohmann::json outputs = nlohmann::json::array();
    for (const auto& w : written) outputs.push_back(w.filename().string());
    meta["outputs"] = outputs;
    if (!summary.empty()) meta["summary"] = summary;
    const auto meta_path = dir / (std::string(kind) + ".json");
    write_json(meta_path, meta);
    written.push_back(meta_path);

    if (!failure.empty()) throw NumericalError(failure);
    return written;
}

}  // namespace thermshadow

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

#include "thermshadow/qbm.hpp"

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <fstream>
#include <memory>
#include <optional>
#include <stdexcept>

namespace thermshadow {

namespace {

double neg_entropy_of(const RVector& eigenvalues) {
    double s = 0.0;
    for (Eigen::Index k = 0; k < eigenvalues.size(); ++k) {
        const double p = eigenvalues[k];
        if (p > 0.0) s += p * std::log(p);
    }
    return s;
}

}  // namespace

void TargetState::precompute(const std::function<double(const PauliString&)>& expect) {
    const int n = eta_.num_qubits;
    op_expect_.clear();
    local_expect_.clear();
    for (const auto& p : qbm_operators(n)) op_expect_.push_back(expect(p));
    for (const auto& p : local_paulis_up_to_two(n)) local_expect_.push_back(expect(p));
}

TargetState TargetState::from_density(DensityOperator eta, std::string provenance) {
    check_qubit_count(eta.num_qubits);
    if (eta.mat.rows() != (Eigen::Index{1} << eta.num_qubits)) throw std::invalid_argument("target dimension mismatch");
    if (std::abs(eta.trace() - 1.0) > 1e-10) throw std::invalid_argument("target trace differs from 1");
    const HermitianEig e = eig_hermitian(eta.mat);
    if (e.eigenvalues[0] < -1e-10) throw std::invalid_argument("target is not positive semidefinite");
    TargetState t;
    t.eta_ = std::move(eta);
    t.provenance_ = std::move(provenance);
    t.neg_entropy_ = neg_entropy_of(e.eigenvalues);
    const DensityOperator& rho = t.eta_;
    t.precompute([&](const PauliString& p) { return rho.expectation(p); });
    return t;
}

TargetState TargetState::from_pure(const StateVector& psi, std::string provenance) {
    if (std::abs(psi.norm() - 1.0) > 1e-10) throw std::invalid_argument("target state is not normalized");
    TargetState t;
    t.eta_ = DensityOperator::pure(psi);
    t.provenance_ = std::move(provenance);
    t.neg_entropy_ = 0.0;
    t.precompute([&](const PauliString& p) { return pauli_expectation(psi, p); });
    return t;
}

TargetState TargetState::from_gibbs(const PauliSum& h, double beta) {
    const ThermalSpectrum spec(h);
    TargetState t;
    t.eta_ = gibbs(spec, beta).rho;
    t.provenance_ = "gibbs";
    t.neg_entropy_ = neg_entropy_of(spec.weights(beta));
    const DensityOperator& rho = t.eta_;
    t.precompute([&](const PauliString& p) { return rho.expectation(p); });
    return t;
}

TargetState encode_classical(std::span<const double> q, int n, bool* renormalized) {
    check_qubit_count(n);
    const std::size_t d = std::size_t{1} << n;
    if (q.size() != d) throw std::invalid_argument("distribution length is not 2^n");
    double total = 0.0;
    for (double v : q) {
        if (!(v >= 0.0)) throw std::invalid_argument("distribution has a negative or NaN entry");
        total += v;
    }
    if (!(total > 0.0)) throw std::invalid_argument("distribution is identically zero");
    const bool renorm = std::abs(total - 1.0) > 1e-9;
    if (renormalized) *renormalized = renorm;
    const double scale = renorm ? total : 1.0;
    CVector amps(static_cast<Eigen::Index>(d));
    for (std::size_t s = 0; s < d; ++s) amps[static_cast<Eigen::Index>(s)] = std::sqrt(q[s] / scale);
    StateVector psi = StateVector::from_amplitudes(n, std::move(amps));
    if (!renorm) return TargetState::from_pure(psi, "classical");
    psi.normalize();
    return TargetState::from_pure(psi, "classical");
}

std::string format_bitstring(std::uint64_t s, int n) {
    std::string out(static_cast<std::size_t>(n), '0');
    for (int q = 0; q < n; ++q)
        if ((s >> q) & 1) out[static_cast<std::size_t>(q)] = '1';
    return out;
}

std::vector<std::uint64_t> read_bitstring_samples(const std::string& path, int& n) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::vector<std::uint64_t> samples;
    n = -1;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::string bits;
        for (char c : line) {
            if (c == '0' || c == '1') bits += c;
            else if (c != ',' && c != ' ' && c != '\t' && c != '\r') {
                throw std::invalid_argument(path + ":" + std::to_string(line_no) + ": expected 0/1 entries");
            }
        }
        if (bits.empty()) continue;
        if (n < 0) n = static_cast<int>(bits.size());
        if (static_cast<int>(bits.size()) != n) {
            throw std::invalid_argument(path + ":" + std::to_string(line_no) + ": inconsistent bit-string length");
        }
        if (n > kMaxQubits) throw std::invalid_argument(path + ": bit strings longer than the qubit cap");
        std::uint64_t s = 0;
        for (int q = 0; q < n; ++q)
            if (bits[static_cast<std::size_t>(q)] == '1') s |= std::uint64_t{1} << q;
        samples.push_back(s);
    }
    if (samples.empty()) throw std::invalid_argument(path + ": no samples");
    return samples;
}

std::vector<double> empirical_distribution(std::span<const std::uint64_t> samples, int n) {
    check_qubit_count(n);
    if (samples.empty()) throw std::invalid_argument("no samples");
    std::vector<double> q(std::size_t{1} << n, 0.0);
    for (std::uint64_t s : samples) {
        if (s >= q.size()) throw std::invalid_argument("sample outside the n-bit range");
        q[s] += 1.0;
    }
    for (double& v : q) v /= static_cast<double>(samples.size());
    return q;
}

std::vector<std::uint64_t> sample_sparse_distribution(int n, int support, std::size_t sample_count,
                                                      std::uint64_t seed) {
    check_qubit_count(n);
    if (support < 1) throw std::invalid_argument("support must be positive");
    Rng rng(derive_key(seed, 0));
    std::vector<std::uint64_t> strings;
    const std::uint64_t d = std::uint64_t{1} << n;
    int attempts = 0;
    while (static_cast<int>(strings.size()) < support) {
        if (++attempts > 100000) throw std::invalid_argument("cannot place that many well-separated strings");
        const std::uint64_t s = rng.below(d);
        const bool far = std::all_of(strings.begin(), strings.end(),
                                     [&](std::uint64_t t) { return std::popcount(s ^ t) >= 3; });
        if (far) strings.push_back(s);
    }
    std::vector<double> cum;
    double total = 0.0;
    for (int k = 0; k < support; ++k) {
        total += rng.uniform(0.5, 1.5);
        cum.push_back(total);
    }
    Rng draw(derive_key(seed, 1));
    std::vector<std::uint64_t> samples(sample_count);
    for (auto& s : samples) {
        const double r = draw.uniform() * total;
        const auto it = std::upper_bound(cum.begin(), cum.end(), r);
        s = strings[static_cast<std::size_t>(std::min<std::ptrdiff_t>(it - cum.begin(), support - 1))];
    }
    return samples;
}

namespace {

struct Model {
    PauliSum h;
    ThermalSpectrum spectrum;
    DensityOperator rho;

    Model(int n, std::span<const double> theta)
        : h(build_qbm(n, theta)), spectrum(h.empty() ? ThermalSpectrum(CMatrix::Zero(Eigen::Index{1} << n,
                                                                                     Eigen::Index{1} << n))
                                                     : ThermalSpectrum(h)),
          rho{n, spectrum.density(1.0)} {}

    double S(const TargetState& target, std::span<const double> theta) const {
        double energy = 0.0;
        const auto& ex = target.operator_expectations();
        for (std::size_t k = 0; k < theta.size(); ++k) energy += theta[k] * ex[k];
        return target.neg_entropy() + energy + spectrum.log_partition(1.0);
    }
};

void check_theta(const TargetState& target, std::span<const double> theta) {
    if (theta.size() != qbm_parameter_count(target.num_qubits())) {
        throw std::invalid_argument("parameter vector length does not match the target size");
    }
}

LocalErrors local_errors_of(const TargetState& target, const DensityOperator& rho) {
    const auto ops = local_paulis_up_to_two(target.num_qubits());
    const auto& ref = target.local_expectations();
    double mx = 0.0, sum = 0.0;
    for (std::size_t k = 0; k < ops.size(); ++k) {
        const double e = std::abs(rho.expectation(ops[k]) - ref[k]);
        mx = std::max(mx, e);
        sum += e;
    }
    return {mx, sum / static_cast<double>(ops.size())};
}

std::vector<double> model_side_exact(const Model& m, const std::vector<PauliString>& ops) {
    std::vector<double> out(ops.size());
    for (std::size_t k = 0; k < ops.size(); ++k) out[k] = m.rho.expectation(ops[k]);
    return out;
}

/// Prepares TPQ states for H(theta) at unit inverse temperature.
class TpqSource {
public:
    TpqSource(const Model& m, const GradientBackend& b) {
        if (m.h.empty()) return;
        if (b.prep == TpqBackend::Exact) {
            exact_.emplace(m.spectrum, 1.0);
        } else {
            const SpectralWindow w = spectral_window(m.h, b.window);
            const double tau = rescale(m.h, w, 1.0).tau;
            poly_.emplace(m.spectrum, m.h, 1.0, chebyshev_fit(tau, b.degree), w);
        }
    }

    StateVector prepare(int n, Rng& rng) const {
        const CliffordTableau u = sample_clifford(n, rng);
        const StateVector init = stabilizer_state(u);
        if (exact_) return exact_->propagate(init);
        if (poly_) return poly_->propagate(init);
        return init;
    }

private:
    std::optional<ExactPropagator> exact_;
    std::optional<PolynomialPropagator> poly_;
};

}  // namespace

double relative_entropy(const TargetState& target, std::span<const double> theta) {
    check_theta(target, theta);
    return Model(target.num_qubits(), theta).S(target, theta);
}

std::vector<double> initial_theta(int n, std::uint64_t seed, double scale) {
    Rng rng(derive_key(seed, 0x7e7a));
    std::vector<double> theta(qbm_parameter_count(n));
    for (double& t : theta) t = rng.uniform(-scale, scale);
    return theta;
}

std::string backend_name(GradientBackendKind kind) {
    switch (kind) {
        case GradientBackendKind::Exact: return "exact";
        case GradientBackendKind::Tpq: return "tpq";
        default: return "shadows";
    }
}

GradientBackendKind parse_backend_name(std::string_view name) {
    if (name == "exact") return GradientBackendKind::Exact;
    if (name == "tpq") return GradientBackendKind::Tpq;
    if (name == "shadows") return GradientBackendKind::Shadows;
    throw std::invalid_argument("unknown gradient backend '" + std::string(name) + "'");
}

namespace {

std::vector<double> gradient_with(const TargetState& target, const Model& m, const GradientBackend& backend,
                                  std::uint64_t seed) {
    const int n = target.num_qubits();
    const auto ops = qbm_operators(n);
    std::vector<double> model;
    switch (backend.kind) {
        case GradientBackendKind::Exact: model = model_side_exact(m, ops); break;
        case GradientBackendKind::Tpq: {
            if (backend.tpq_states < 1) throw std::invalid_argument("tpq backend needs at least one state");
            const TpqSource src(m, backend);
            const auto count = static_cast<std::int64_t>(backend.tpq_states);
            std::vector<std::vector<double>> per(backend.tpq_states);
#pragma omp parallel for schedule(dynamic)
            for (std::int64_t s = 0; s < count; ++s) {
                Rng rng(derive_key(seed, static_cast<std::uint64_t>(s)));
                const StateVector psi = src.prepare(n, rng);
                auto& v = per[static_cast<std::size_t>(s)];
                v.resize(ops.size());
                for (std::size_t k = 0; k < ops.size(); ++k) v[k] = pauli_expectation(psi, ops[k]);
            }
            model.assign(ops.size(), 0.0);
            for (const auto& v : per)
                for (std::size_t k = 0; k < ops.size(); ++k) model[k] += v[k];
            for (double& x : model) x /= static_cast<double>(count);
            break;
        }
        case GradientBackendKind::Shadows: {
            if (backend.shadow_count < 1 || backend.groups < 1 || backend.groups > backend.shadow_count) {
                throw std::invalid_argument("shadow backend needs 1 <= groups <= shadow_count");
            }
            const TpqSource src(m, backend);
            const auto recs = collect_shadows(backend.shadow_kind, n, backend.shadow_count, seed,
                                              [&](std::size_t, Rng& rng) { return src.prepare(n, rng); });
            const std::size_t N = backend.shadow_count / backend.groups;
            if (backend.shadow_kind == ShadowKind::Pauli) {
                model = median_of_means_pauli(recs, ops, N, backend.groups);
            } else {
                model.resize(ops.size());
                std::vector<double> vals(recs.size());
                for (std::size_t k = 0; k < ops.size(); ++k) {
                    for (std::size_t i = 0; i < recs.size(); ++i) vals[i] = estimate_clifford(recs[i], ops[k]);
                    model[k] = median_of_means(vals, N, backend.groups);
                }
            }
            break;
        }
    }
    std::vector<double> g(ops.size());
    const auto& ref = target.operator_expectations();
    for (std::size_t k = 0; k < ops.size(); ++k) g[k] = ref[k] - model[k];
    return g;
}

}  // namespace

std::vector<double> gradient(const TargetState& target, std::span<const double> theta, const GradientBackend& backend,
                             std::uint64_t seed) {
    check_theta(target, theta);
    return gradient_with(target, Model(target.num_qubits(), theta), backend, seed);
}

LocalErrors local_errors(const TargetState& target, std::span<const double> theta) {
    check_theta(target, theta);
    return local_errors_of(target, Model(target.num_qubits(), theta).rho);
}

std::vector<double> model_distribution(int n, std::span<const double> theta) {
    const Model m(n, theta);
    std::vector<double> p(static_cast<std::size_t>(m.rho.mat.rows()));
    for (std::size_t s = 0; s < p.size(); ++s) p[s] = m.rho.mat(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(s)).real();
    return p;
}

double total_variation(std::span<const double> p, std::span<const double> q) {
    if (p.size() != q.size()) throw std::invalid_argument("total_variation: length mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) s += std::abs(p[i] - q[i]);
    return 0.5 * s;
}

TrainState train(const TargetState& target, std::vector<double> theta0, const GradientBackend& backend,
                 const TrainOptions& options, const TrainObserver& observer) {
    check_theta(target, theta0);
    if (!(options.lr > 0.0)) throw std::invalid_argument("learning rate must be positive");
    const int n = target.num_qubits();
    const auto t0 = std::chrono::steady_clock::now();
    auto elapsed = [&] { return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count(); };

    TrainState st;
    st.theta = std::move(theta0);
    auto model = std::make_unique<Model>(n, st.theta);
    auto record = [&](std::size_t step) {
        const LocalErrors e = local_errors_of(target, model->rho);
        st.history.push_back({step, model->S(target, st.theta), e.eps_max, e.eps_mean, elapsed()});
        if (observer) observer(st.history.back());
    };
    record(0);

    std::size_t increases = 0;
    for (std::size_t step = 1; step <= options.steps; ++step) {
        const auto g = gradient_with(target, *model, backend, derive_key(options.seed, step));
        if (options.grad_tol > 0.0) {
            double gmax = 0.0;
            for (double v : g) gmax = std::max(gmax, std::abs(v));
            if (gmax < options.grad_tol) {
                st.converged = true;
                break;
            }
        }
        for (std::size_t k = 0; k < g.size(); ++k) st.theta[k] -= options.lr * g[k];
        model = std::make_unique<Model>(n, st.theta);
        const double prev = st.history.back().S;
        st.step = step;
        record(step);
        const double cur = st.history.back().S;
        if (!std::isfinite(cur)) throw NumericalError("relative entropy is not finite");
        if (backend.kind == GradientBackendKind::Exact) {
            increases = (cur > prev + options.divergence_tol * std::abs(prev)) ? increases + 1 : 0;
            if (increases >= options.divergence_patience) {
                throw DivergenceError("relative entropy increased for " + std::to_string(increases) +
                                      " consecutive steps");
            }
        }
    }
    return st;
}

}  // namespace thermshadow

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

#include "thermshadow/shadows.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <exception>
#include <mutex>
#include <sstream>
#include <stdexcept>

#include "thermshadow/kernels.hpp"
#include "thermshadow/linalg.hpp"

namespace thermshadow {

std::vector<Basis> ShadowRecord::bases() const {
    std::vector<Basis> out(static_cast<std::size_t>(n));
    for (int q = 0; q < n; ++q) {
        const bool xb = (basis_x >> q) & 1, zb = (basis_z >> q) & 1;
        out[static_cast<std::size_t>(q)] = xb ? (zb ? Basis::Y : Basis::X) : Basis::Z;
    }
    return out;
}

std::uint64_t sample_outcome(const StateVector& state, Rng& rng) {
    const auto amps = state.span();
    const double total = kernels::parallel::norm_squared(amps);
    if (std::abs(total - 1.0) > 1e-9) throw std::invalid_argument("sample_outcome: state is not normalized");
    const double r = rng.uniform() * total;
    double acc = 0.0;
    std::size_t last_nonzero = 0;
    for (std::size_t i = 0; i < amps.size(); ++i) {
        const double p = std::norm(amps[i]);
        if (p > 0.0) last_nonzero = i;
        acc += p;
        if (r < acc) return i;
    }
    return last_nonzero;
}

ShadowRecord collect_clifford(const StateVector& state, const CliffordTableau& v, Rng& rng) {
    if (v.num_qubits() != state.num_qubits()) throw std::invalid_argument("collect_clifford: qubit count mismatch");
    StateVector rotated = state;
    apply_gates(rotated, synthesize(v));
    ShadowRecord rec;
    rec.kind = ShadowKind::Clifford;
    rec.n = state.num_qubits();
    rec.outcome = sample_outcome(rotated, rng);
    rec.unitary = v;
    return rec;
}

ShadowRecord collect_pauli(const StateVector& state, std::span<const Basis> bases, Rng& rng) {
    const int n = state.num_qubits();
    if (bases.size() != static_cast<std::size_t>(n)) throw std::invalid_argument("collect_pauli: basis list length");
    StateVector rotated = state;
    ShadowRecord rec;
    rec.kind = ShadowKind::Pauli;
    rec.n = n;
    for (int q = 0; q < n; ++q) {
        const std::uint64_t bit = std::uint64_t{1} << q;
        switch (bases[static_cast<std::size_t>(q)]) {
            case Basis::X:
                kernels::parallel::apply_h(rotated.span(), q);
                rec.basis_x |= bit;
                break;
            case Basis::Y:
                kernels::parallel::apply_sdg(rotated.span(), q);
                kernels::parallel::apply_h(rotated.span(), q);
                rec.basis_x |= bit;
                rec.basis_z |= bit;
                break;
            case Basis::Z:
                rec.basis_z |= bit;
                break;
        }
    }
    rec.outcome = sample_outcome(rotated, rng);
    return rec;
}

ShadowRecord collect_pauli(const StateVector& state, Rng& rng) {
    const auto bases = sample_pauli_basis(state.num_qubits(), rng);
    return collect_pauli(state, bases, rng);
}

double estimate_clifford(const ShadowRecord& rec, const PauliString& p) {
    if (rec.kind != ShadowKind::Clifford || !rec.unitary) throw std::invalid_argument("not a Clifford shadow record");
    if (p.num_qubits() != rec.n) throw std::invalid_argument("estimate_clifford: qubit count mismatch");
    const double dim = std::ldexp(1.0, rec.n);
    if (p.is_identity()) return p.sign();
    const PauliString q = rec.unitary->conjugate(p);
    if (q.x_mask() != 0) return 0.0;
    const double diag = q.sign() * ((std::popcount(q.z_mask() & rec.outcome) & 1) ? -1.0 : 1.0);
    return (dim + 1.0) * diag;
}

double estimate_clifford(const ShadowRecord& rec, const PauliSum& o) {
    double s = 0.0;
    for (const auto& t : o.terms()) s += t.coeff * estimate_clifford(rec, t.pauli);
    return s;
}

double estimate_pauli(const ShadowRecord& rec, const PauliString& o) {
    if (rec.kind != ShadowKind::Pauli) throw std::invalid_argument("not a Pauli shadow record");
    if (o.num_qubits() != rec.n) throw std::invalid_argument("estimate_pauli: qubit count mismatch");
    const std::uint64_t supp = o.support();
    if (((o.x_mask() ^ rec.basis_x) | (o.z_mask() ^ rec.basis_z)) & supp) return 0.0;
    const double mag = std::pow(3.0, std::popcount(supp));
    const double sgn = (std::popcount(rec.outcome & supp) & 1) ? -1.0 : 1.0;
    return o.sign() * sgn * mag;
}

double estimate_pauli(const ShadowRecord& rec, const PauliSum& o) {
    double s = 0.0;
    for (const auto& t : o.terms()) s += t.coeff * estimate_pauli(rec, t.pauli);
    return s;
}

double estimate(const ShadowRecord& rec, const PauliSum& o) {
    return rec.kind == ShadowKind::Clifford ? estimate_clifford(rec, o) : estimate_pauli(rec, o);
}

std::vector<ShadowRecord> collect_shadows(ShadowKind kind, int n, std::size_t count, std::uint64_t seed,
                                          const StatePreparer& prepare, std::uint64_t first_index) {
    std::vector<ShadowRecord> out(count);
    std::exception_ptr error;
    std::mutex error_mutex;
    const auto total = static_cast<std::int64_t>(count);
#pragma omp parallel for schedule(dynamic, 16)
    for (std::int64_t i = 0; i < total; ++i) {
        try {
            const std::uint64_t index = first_index + static_cast<std::uint64_t>(i);
            const std::uint64_t key = derive_key(seed, index);
            Rng prep_rng(derive_key(key, 0));
            const std::uint64_t meas_key = derive_key(key, 1);
            Rng meas_rng(meas_key);
            Rng outcome_rng(derive_key(key, 2));
            const StateVector state = prepare(static_cast<std::size_t>(index), prep_rng);
            if (state.num_qubits() != n) throw std::invalid_argument("preparer returned the wrong qubit count");
            ShadowRecord rec;
            if (kind == ShadowKind::Clifford) {
                rec = collect_clifford(state, sample_clifford(n, meas_rng), outcome_rng);
                rec.unitary_key = meas_key;
            } else {
                const auto bases = sample_pauli_basis(n, meas_rng);
                rec = collect_pauli(state, bases, outcome_rng);
            }
            out[static_cast<std::size_t>(i)] = std::move(rec);
        } catch (...) {
            std::lock_guard<std::mutex> lock(error_mutex);
            if (!error) error = std::current_exception();
        }
    }
    if (error) std::rethrow_exception(error);
    return out;
}

namespace {

double median_sorted_copy(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t k = v.size();
    return (k % 2 == 1) ? v[k / 2] : 0.5 * (v[k / 2 - 1] + v[k / 2]);
}

void check_groups(std::size_t have, std::size_t N, std::size_t K) {
    if (N == 0 || K == 0) throw std::invalid_argument("median_of_means: N and K must be positive");
    if (have < N * K) {
        throw std::invalid_argument("median_of_means: need " + std::to_string(N * K) + " values, have " +
                                    std::to_string(have));
    }
}

}  // namespace

double median_of_means(std::span<const double> values, std::size_t N, std::size_t K) {
    check_groups(values.size(), N, K);
    std::vector<double> means(K);
    for (std::size_t g = 0; g < K; ++g) {
        double s = 0.0;
        for (std::size_t i = 0; i < N; ++i) s += values[g * N + i];
        means[g] = s / static_cast<double>(N);
    }
    return median_sorted_copy(std::move(means));
}

std::vector<double> median_of_means_pauli(std::span<const ShadowRecord> records,
                                          std::span<const PauliString> observables, std::size_t N, std::size_t K) {
    check_groups(records.size(), N, K);
    const std::size_t M = observables.size();
    std::vector<std::vector<double>> means(M, std::vector<double>(K));
    std::vector<double> sums(M);
    for (std::size_t g = 0; g < K; ++g) {
        std::fill(sums.begin(), sums.end(), 0.0);
        for (std::size_t i = 0; i < N; ++i) {
            const ShadowRecord& rec = records[g * N + i];
            for (std::size_t m = 0; m < M; ++m) sums[m] += estimate_pauli(rec, observables[m]);
        }
        for (std::size_t m = 0; m < M; ++m) means[m][g] = sums[m] / static_cast<double>(N);
    }
    std::vector<double> out(M);
    for (std::size_t m = 0; m < M; ++m) out[m] = median_sorted_copy(std::move(means[m]));
    return out;
}

EstimatorPlan plan_shadows(double epsilon, double delta, std::size_t M, double sigma_sq_max) {
    if (!(epsilon > 0.0 && epsilon <= 1.0)) throw std::invalid_argument("epsilon must lie in (0, 1]");
    if (!(delta > 0.0 && delta <= 1.0)) throw std::invalid_argument("delta must lie in (0, 1]");
    if (M < 1) throw std::invalid_argument("M must be at least 1");
    if (!(sigma_sq_max >= 0.0)) throw std::invalid_argument("sigma^2 must be nonnegative");
    // The guard keeps results that are integers in exact arithmetic from
    // rounding up after a one-ulp excess.
    constexpr double kGuard = 1.0 - 1e-12;
    const double n_real = 6.0 * sigma_sq_max / (epsilon * epsilon);
    const double k_real = 4.5 * std::log(static_cast<double>(M) / delta);
    EstimatorPlan p;
    p.N = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(n_real * kGuard)));
    p.K = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(k_real * kGuard)));
    p.epsilon = epsilon;
    p.delta = delta;
    p.M = M;
    p.sigma_sq_max = sigma_sq_max;
    return p;
}

MseBound mse_bound(const PauliSum& o, const GibbsSnapshot& gibbs, ShadowKind kind) {
    const int n = o.num_qubits();
    if (gibbs.rho.num_qubits != n) throw std::invalid_argument("mse_bound: dimension mismatch");
    const auto d = static_cast<std::size_t>(gibbs.rho.mat.rows());
    const std::span<const cplx> rho{gibbs.rho.mat.data(), d * d};

    std::vector<PauliTermEntry> traceless;
    for (const auto& t : o.terms())
        if (!t.pauli.is_identity()) traceless.push_back(t);

    double mean0 = 0.0;
    for (const auto& t : traceless) mean0 += t.coeff * kernels::parallel::pauli_trace(rho, d, t.pauli.term()).real();

    if (kind == ShadowKind::Clifford) {
        double tr_sq = 0.0;
        for (const auto& t : traceless) tr_sq += t.coeff * t.coeff;
        tr_sq *= static_cast<double>(d);
        double rho_sq = 0.0;
        for (const auto& a : traceless) {
            for (const auto& b : traceless) {
                const PauliString prod = a.pauli * b.pauli;
                rho_sq += a.coeff * b.coeff * kernels::parallel::pauli_trace(rho, d, prod.term()).real();
            }
        }
        return {tr_sq + 2.0 * rho_sq - mean0 * mean0, false};
    }

    if (o.size() == 1) {
        const auto& t = o.terms()[0];
        const double mean = t.coeff * gibbs.rho.expectation(t.pauli);
        return {t.coeff * t.coeff * std::pow(3.0, t.pauli.weight()) - mean * mean, false};
    }
    PauliSum o0(n);
    for (const auto& t : traceless) o0.add(t.coeff, t.pauli);
    const double norm = o0.empty() ? 0.0 : spectral_norm_hermitian(o0.to_dense());
    return {std::pow(4.0, o.locality()) * norm * norm, true};
}

namespace {

std::string bits_string(std::uint64_t bits, int n) {
    std::string s(static_cast<std::size_t>(n), '0');
    for (int q = 0; q < n; ++q)
        if ((bits >> q) & 1) s[static_cast<std::size_t>(q)] = '1';
    return s;
}

std::uint64_t parse_bits(std::string_view s) {
    if (s.empty() || s.size() > 64) throw std::invalid_argument("bad outcome bit string");
    std::uint64_t v = 0;
    for (std::size_t q = 0; q < s.size(); ++q) {
        if (s[q] == '1') v |= std::uint64_t{1} << q;
        else if (s[q] != '0') throw std::invalid_argument("bad outcome bit string");
    }
    return v;
}

}  // namespace

std::string format_shadow_record(const ShadowRecord& rec) {
    if (rec.kind == ShadowKind::Pauli) {
        std::string basis(static_cast<std::size_t>(rec.n), 'Z');
        const auto bs = rec.bases();
        for (int q = 0; q < rec.n; ++q) basis[static_cast<std::size_t>(q)] = basis_letter(bs[static_cast<std::size_t>(q)]);
        return "P " + basis + " " + bits_string(rec.outcome, rec.n);
    }
    std::string line = "C " + bits_string(rec.outcome, rec.n) + " ";
    if (rec.unitary_key) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "key=%016llx", static_cast<unsigned long long>(*rec.unitary_key));
        return line + buf;
    }
    if (!rec.unitary) throw std::invalid_argument("Clifford record without a unitary");
    return line + "tableau=" + rec.unitary->serialize();
}

ShadowRecord parse_shadow_record(std::string_view line) {
    std::istringstream in{std::string(line)};
    std::string kind, a, b, extra;
    if (!(in >> kind >> a >> b) || (in >> extra)) throw std::invalid_argument("malformed shadow log line");
    ShadowRecord rec;
    if (kind == "P") {
        rec.kind = ShadowKind::Pauli;
        rec.n = static_cast<int>(a.size());
        if (b.size() != a.size()) throw std::invalid_argument("basis and outcome lengths differ");
        for (int q = 0; q < rec.n; ++q) {
            const std::uint64_t bit = std::uint64_t{1} << q;
            switch (a[static_cast<std::size_t>(q)]) {
                case 'X': rec.basis_x |= bit; break;
                case 'Y': rec.basis_x |= bit; rec.basis_z |= bit; break;
                case 'Z': rec.basis_z |= bit; break;
                default: throw std::invalid_argument("bad basis letter in shadow log");
            }
        }
        rec.outcome = parse_bits(b);
        return rec;
    }
    if (kind != "C") throw std::invalid_argument("unknown shadow record kind '" + kind + "'");
    rec.kind = ShadowKind::Clifford;
    rec.n = static_cast<int>(a.size());
    rec.outcome = parse_bits(a);
    if (b.rfind("key=", 0) == 0) {
        const std::string hex = b.substr(4);
        if (hex.size() != 16) throw std::invalid_argument("Clifford key must have 16 hex digits");
        std::size_t used = 0;
        const std::uint64_t key = std::stoull(hex, &used, 16);
        if (used != hex.size()) throw std::invalid_argument("bad Clifford key");
        Rng rng(key);
        rec.unitary = sample_clifford(rec.n, rng);
        rec.unitary_key = key;
    } else if (b.rfind("tableau=", 0) == 0) {
        rec.unitary = CliffordTableau::deserialize(std::string_view(b).substr(8));
        if (rec.unitary->num_qubits() != rec.n) throw std::invalid_argument("tableau size differs from outcome length");
    } else {
        throw std::invalid_argument("Clifford record needs key= or tableau=");
    }
    return rec;
}

ShadowLogWriter::ShadowLogWriter(const std::string& path) : out_(path, std::ios::app) {
    if (!out_) throw std::runtime_error("cannot open shadow log " + path);
}

void ShadowLogWriter::append(const ShadowRecord& rec) { out_ << format_shadow_record(rec) << '\n'; }

void ShadowLogWriter::append(std::span<const ShadowRecord> recs) {
    for (const auto& r : recs) append(r);
}

std::vector<ShadowRecord> read_shadow_log(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open shadow log " + path);
    std::vector<ShadowRecord> out;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        out.push_back(parse_shadow_record(line));
    }
    return out;
}

}  // namespace thermshadow

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
#include <fstream>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "thermshadow/clifford.hpp"
#include "thermshadow/gibbs.hpp"
#include "thermshadow/pauli.hpp"
#include "thermshadow/rng.hpp"

namespace thermshadow {

enum class ShadowKind { Clifford, Pauli };

/// One randomized-measurement snapshot. Only the measurement descriptor and
/// the outcome are kept; the 2^n x 2^n snapshot matrix is never formed.
struct ShadowRecord {
    ShadowKind kind = ShadowKind::Pauli;
    int n = 0;
    std::uint64_t outcome = 0;  // bit q = outcome on qubit q

    // Pauli: measured basis per qubit, letter-form masks (X=x, Y=x|z, Z=z).
    std::uint64_t basis_x = 0;
    std::uint64_t basis_z = 0;

    // Clifford: the measurement unitary V, and the stream key it was sampled
    // from when it came out of collect_shadows.
    std::optional<CliffordTableau> unitary;
    std::optional<std::uint64_t> unitary_key;

    std::vector<Basis> bases() const;
};

/// Born-rule sample of a computational-basis outcome. Throws std::invalid_argument
/// if the state norm is off by more than 1e-9.
std::uint64_t sample_outcome(const StateVector& state, Rng& rng);

ShadowRecord collect_clifford(const StateVector& state, const CliffordTableau& v, Rng& rng);
ShadowRecord collect_pauli(const StateVector& state, std::span<const Basis> bases, Rng& rng);
/// Samples the basis from rng, then the outcome.
ShadowRecord collect_pauli(const StateVector& state, Rng& rng);

/// Tr(eta O) = sum_k a_k [(2^n + 1) <b|V P_k V^dag|b> - Tr P_k].
double estimate_clifford(const ShadowRecord& rec, const PauliSum& o);
double estimate_clifford(const ShadowRecord& rec, const PauliString& p);
/// Product snapshot: 3^|supp| (+-1) if every letter matches the basis, else 0.
double estimate_pauli(const ShadowRecord& rec, const PauliString& o);
double estimate_pauli(const ShadowRecord& rec, const PauliSum& o);
double estimate(const ShadowRecord& rec, const PauliSum& o);

/// Prepares the state measured by shadow `index`; must be safe to call concurrently.
using StatePreparer = std::function<StateVector(std::size_t index, Rng& rng)>;

/// Shadow i draws from sub-streams of derive_key(seed, first_index + i): 0 for
/// state preparation, 1 for the measurement unitary or basis, 2 for the outcome.
/// Output is identical for any thread count and any collection order.
std::vector<ShadowRecord> collect_shadows(ShadowKind kind, int n, std::size_t count, std::uint64_t seed,
                                          const StatePreparer& prepare, std::uint64_t first_index = 0);

/// Median of K contiguous group means of N values each; the average of the two
/// central means when K is even. Throws std::invalid_argument on short input.
double median_of_means(std::span<const double> values, std::size_t N, std::size_t K);

/// Median-of-means for many Pauli observables over one shared snapshot set,
/// accumulated group by group without materializing per-shadow estimates.
std::vector<double> median_of_means_pauli(std::span<const ShadowRecord> records,
                                          std::span<const PauliString> observables, std::size_t N, std::size_t K);

struct EstimatorPlan {
    std::size_t N = 1;
    std::size_t K = 1;
    double epsilon = 0.0;
    double delta = 0.0;
    std::size_t M = 1;
    double sigma_sq_max = 0.0;

    std::size_t total() const { return N * K; }
};

/// N = ceil(6 sigma^2 / eps^2), K = ceil(4.5 ln(M / delta)), both floored at 1.
EstimatorPlan plan_shadows(double epsilon, double delta, std::size_t M, double sigma_sq_max);

struct MseBound {
    double value;
    bool is_bound;  // true when only the 4^k |O_0|^2 upper bound applies
};

/// Clifford: Tr O_0^2 + 2 Tr rho O_0^2 - (Tr rho O_0)^2.
/// Pauli, single Pauli string: 3^k - (Tr rho O)^2; general sums fall back to the bound.
MseBound mse_bound(const PauliSum& o, const GibbsSnapshot& gibbs, ShadowKind kind);

/// Shadow log lines:
///   P <basis word> <outcome bits>
///   C <outcome bits> key=<16 hex digits>        (V resampled from the key)
///   C <outcome bits> tableau=<serialized tableau>
/// Outcome character q is qubit q.
std::string format_shadow_record(const ShadowRecord& rec);
ShadowRecord parse_shadow_record(std::string_view line);

/// Append-only writer.
class ShadowLogWriter {
public:
    explicit ShadowLogWriter(const std::string& path);
    void append(const ShadowRecord& rec);
    void append(std::span<const ShadowRecord> recs);
    void flush() { out_.flush(); }

private:
    std::ofstream out_;
};

std::vector<ShadowRecord> read_shadow_log(const std::string& path);

}  // namespace thermshadow

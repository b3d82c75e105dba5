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
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "thermshadow/gibbs.hpp"
#include "thermshadow/models.hpp"
#include "thermshadow/shadows.hpp"
#include "thermshadow/tpq.hpp"

namespace thermshadow {

/// Training target eta. Expectations of the QBM operators and of the one- and
/// two-qubit Pauli set are computed once at construction.
class TargetState {
public:
    static TargetState from_density(DensityOperator eta, std::string provenance = "explicit");
    /// Rank-1 target; expectations come from the statevector directly.
    static TargetState from_pure(const StateVector& psi, std::string provenance = "pure");
    static TargetState from_gibbs(const PauliSum& h, double beta);

    int num_qubits() const noexcept { return eta_.num_qubits; }
    const DensityOperator& eta() const noexcept { return eta_; }
    const std::string& provenance() const noexcept { return provenance_; }
    /// Tr(eta log eta), with 0 log 0 = 0.
    double neg_entropy() const noexcept { return neg_entropy_; }
    /// <P_k>_eta in qbm_operators order.
    const std::vector<double>& operator_expectations() const noexcept { return op_expect_; }
    /// <P>_eta over local_paulis_up_to_two order.
    const std::vector<double>& local_expectations() const noexcept { return local_expect_; }

private:
    void precompute(const std::function<double(const PauliString&)>& expect);

    DensityOperator eta_;
    std::string provenance_;
    double neg_entropy_ = 0.0;
    std::vector<double> op_expect_;
    std::vector<double> local_expect_;
};

/// |psi> = sum_s sqrt(q(s)) |s>. q is renormalized when its sum is off by more
/// than 1e-9; `renormalized` reports that. Throws std::invalid_argument on
/// negative entries, wrong length or an all-zero vector.
TargetState encode_classical(std::span<const double> q, int n, bool* renormalized = nullptr);

/// Bit-string samples, one per line, as 0/1 characters optionally separated by
/// commas. Character k is qubit k. Returns the samples and sets n.
std::vector<std::uint64_t> read_bitstring_samples(const std::string& path, int& n);
std::vector<double> empirical_distribution(std::span<const std::uint64_t> samples, int n);
std::string format_bitstring(std::uint64_t s, int n);

/// Draws `sample_count` samples from a random distribution supported on
/// `support` strings whose pairwise Hamming distance is at least 3.
std::vector<std::uint64_t> sample_sparse_distribution(int n, int support, std::size_t sample_count,
                                                      std::uint64_t seed);

/// S = Tr(eta log eta) + Tr(eta H(theta)) + log Z(theta).
double relative_entropy(const TargetState& target, std::span<const double> theta);

/// theta_k uniform in [-scale, scale].
std::vector<double> initial_theta(int n, std::uint64_t seed, double scale = 0.1);

enum class GradientBackendKind { Exact, Tpq, Shadows };

struct GradientBackend {
    GradientBackendKind kind = GradientBackendKind::Exact;
    std::size_t tpq_states = 1;       // Tpq: states averaged per step
    std::size_t shadow_count = 5000;  // Shadows: snapshots per step
    std::size_t groups = 10;          // Shadows: median-of-means groups
    ShadowKind shadow_kind = ShadowKind::Pauli;
    TpqBackend prep = TpqBackend::Polynomial;
    int degree = 32;
    WindowMode window = WindowMode::CoefficientBound;
};

std::string backend_name(GradientBackendKind kind);
GradientBackendKind parse_backend_name(std::string_view name);

/// dS/dtheta_k = <P_k>_eta - <P_k>_rho(theta). The model side comes from the
/// backend; stochastic backends draw from streams derived from `seed`.
std::vector<double> gradient(const TargetState& target, std::span<const double> theta, const GradientBackend& backend,
                             std::uint64_t seed = 0);

struct LocalErrors {
    double eps_max;
    double eps_mean;
};

/// Max and mean of |<P>_rho(theta) - <P>_eta| over the one- and two-qubit Paulis.
LocalErrors local_errors(const TargetState& target, std::span<const double> theta);

/// diag(rho(theta)).
std::vector<double> model_distribution(int n, std::span<const double> theta);
double total_variation(std::span<const double> p, std::span<const double> q);

struct TrainRecord {
    std::size_t step;
    double S;
    double eps_max;
    double eps_mean;
    double wall_time;  // seconds since training started
};

struct TrainOptions {
    double lr = 0.1;
    std::size_t steps = 100;
    std::uint64_t seed = 0;
    /// A step counts as an increase when S_new > S_old + divergence_tol * |S_old|.
    double divergence_tol = 0.0;
    std::size_t divergence_patience = 10;
    /// Stop early once the max-norm of the gradient falls below this (0 disables).
    double grad_tol = 0.0;
};

struct TrainState {
    std::vector<double> theta;
    std::size_t step = 0;
    std::vector<TrainRecord> history;  // entry 0 is the initial point
    bool converged = false;
};

class DivergenceError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

using TrainObserver = std::function<void(const TrainRecord&)>;

/// Vanilla gradient descent. S is always evaluated exactly. Throws
/// DivergenceError after `divergence_patience` consecutive increases with the
/// exact backend.
TrainState train(const TargetState& target, std::vector<double> theta0, const GradientBackend& backend,
                 const TrainOptions& options, const TrainObserver& observer = {});

}  // namespace thermshadow

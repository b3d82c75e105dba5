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

#include "thermshadow/gibbs.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace thermshadow {

namespace {

void check_beta(double beta) {
    if (!(beta >= 0.0) || !std::isfinite(beta)) throw std::invalid_argument("beta must be finite and nonnegative");
}

/// exp(-beta (lambda - lambda_min)), largest entry 1.
RVector shifted_boltzmann(const RVector& lambda, double beta) {
    const double lmin = lambda[0];
    RVector u(lambda.size());
    for (Eigen::Index k = 0; k < lambda.size(); ++k) u[k] = std::exp(-beta * (lambda[k] - lmin));
    return u;
}

}  // namespace

ThermalSpectrum::ThermalSpectrum(const PauliSum& h) : n_(h.num_qubits()), eig_(eig_hermitian(h.to_dense())) {}

ThermalSpectrum::ThermalSpectrum(const CMatrix& h_dense) : n_(0), eig_(eig_hermitian(h_dense)) {
    const auto d = static_cast<std::uint64_t>(h_dense.rows());
    if (d == 0 || (d & (d - 1)) != 0) throw std::invalid_argument("dimension is not a power of two");
    n_ = std::countr_zero(d);
}

RVector ThermalSpectrum::weights(double beta) const {
    check_beta(beta);
    RVector u = shifted_boltzmann(eig_.eigenvalues, beta);
    return u / u.sum();
}

double ThermalSpectrum::log_partition(double beta) const {
    check_beta(beta);
    const RVector u = shifted_boltzmann(eig_.eigenvalues, beta);
    return -beta * lambda_min() + std::log(u.sum());
}

CMatrix ThermalSpectrum::density(double beta) const {
    const RVector w = weights(beta);
    return eig_.eigenvectors * w.asDiagonal() * eig_.eigenvectors.adjoint();
}

double ThermalSpectrum::sandwiched_ratio(double beta, const CMatrix& o) const {
    const RVector u = shifted_boltzmann(eig_.eigenvalues, beta);
    const CMatrix op = eig_.eigenvectors.adjoint() * o * eig_.eigenvectors;
    const double num = (u.transpose() * op.cwiseAbs2() * u)(0, 0);
    return num / u.squaredNorm();
}

double GibbsSnapshot::Z() const { return std::exp(log_Z); }

GibbsSnapshot gibbs(const ThermalSpectrum& spectrum, double beta) {
    check_beta(beta);
    GibbsSnapshot g;
    g.beta = beta;
    g.log_Z = spectrum.log_partition(beta);
    if (!std::isfinite(g.log_Z)) throw NumericalError("log partition function is not finite");
    g.rho = {spectrum.num_qubits(), spectrum.density(beta)};
    g.free_energy = beta > 0.0 ? -g.log_Z / beta : -std::numeric_limits<double>::infinity();
    return g;
}

GibbsSnapshot gibbs(const PauliSum& h, double beta) {
    check_beta(beta);
    return gibbs(ThermalSpectrum(h), beta);
}

PurityDecay purity_and_decay(const ThermalSpectrum& spectrum, double beta) {
    check_beta(beta);
    const int n = spectrum.num_qubits();
    if (beta == 0.0) return {std::ldexp(1.0, -n), n * std::log(2.0)};
    const RVector w = spectrum.weights(beta);
    const double decay = -spectrum.log_partition(2.0 * beta) + 2.0 * spectrum.log_partition(beta);
    return {w.squaredNorm(), decay};
}

PurityDecay purity_and_decay(const PauliSum& h, double beta) { return purity_and_decay(ThermalSpectrum(h), beta); }

TpqMoments tpq_moments(const ThermalSpectrum& spectrum, double beta, const PauliSum& o) {
    check_beta(beta);
    const auto& eig = spectrum.eig();
    const CMatrix od = o.to_dense();
    const CMatrix op = eig.eigenvectors.adjoint() * od * eig.eigenvectors;
    const RVector w1 = spectrum.weights(beta);
    const RVector w2 = spectrum.weights(2.0 * beta);
    const RVector diag = op.diagonal().real();
    const double a = w1.dot(diag);
    const double b = w2.dot(diag);
    const double purity = w1.squaredNorm();
    const RVector u = w1 / w1.maxCoeff();
    const double ratio = (u.transpose() * op.cwiseAbs2() * u)(0, 0) / u.squaredNorm();
    return {a + purity * (a - b), purity * (ratio - 2.0 * a * b + a * a)};
}

TpqMoments tpq_moments(const PauliSum& h, double beta, const PauliSum& o) {
    return tpq_moments(ThermalSpectrum(h), beta, o);
}

double tpq_failure_bound(double o_norm, double epsilon, double purity) {
    if (!(epsilon > 0.0)) throw std::invalid_argument("epsilon must be positive");
    return std::min(1.0, 4.0 * o_norm * o_norm * purity / (epsilon * epsilon));
}

double tpq_failure_bound(double o_norm, double epsilon, const PauliSum& h, double beta) {
    return tpq_failure_bound(o_norm, epsilon, purity_and_decay(h, beta).purity);
}

}  // namespace thermshadow

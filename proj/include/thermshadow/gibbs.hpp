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

#include "thermshadow/linalg.hpp"
#include "thermshadow/pauli.hpp"

namespace thermshadow {

/// Eigendecomposition of H kept around so thermal quantities at many inverse
/// temperatures cost no further diagonalizations. Exponentials are always
/// taken as exp(-beta (lambda - lambda_min)); the largest factor is 1.
class ThermalSpectrum {
public:
    explicit ThermalSpectrum(const PauliSum& h);
    explicit ThermalSpectrum(const CMatrix& h_dense);

    int num_qubits() const noexcept { return n_; }
    const HermitianEig& eig() const noexcept { return eig_; }
    double lambda_min() const { return eig_.eigenvalues[0]; }
    double lambda_max() const { return eig_.eigenvalues[eig_.eigenvalues.size() - 1]; }

    /// Normalized Boltzmann weights exp(-beta lambda) / Z in eigenvalue order.
    RVector weights(double beta) const;
    double log_partition(double beta) const;
    CMatrix density(double beta) const;
    /// Tr(exp(-beta H) O exp(-beta H) O) / Tr exp(-2 beta H).
    double sandwiched_ratio(double beta, const CMatrix& o) const;

private:
    int n_;
    HermitianEig eig_;
};

struct GibbsSnapshot {
    double beta = 0.0;
    DensityOperator rho;
    double log_Z = 0.0;
    double free_energy = 0.0;  // -log Z / beta; -infinity at beta = 0

    double Z() const;
    double expectation(const PauliString& p) const { return rho.expectation(p); }
    double expectation(const PauliSum& o) const { return o.expectation(rho.mat); }
};

/// Throws NumericalError if log Z is not finite.
GibbsSnapshot gibbs(const PauliSum& h, double beta);
GibbsSnapshot gibbs(const ThermalSpectrum& spectrum, double beta);

struct PurityDecay {
    double purity;          // Tr rho_beta^2 from the weights
    double decay_exponent;  // 2 beta (F_2beta - F_beta) from partition functions
};

/// beta = 0 returns 2^-n and n log 2.
PurityDecay purity_and_decay(const ThermalSpectrum& spectrum, double beta);
PurityDecay purity_and_decay(const PauliSum& h, double beta);

struct TpqMoments {
    double mean_prediction;
    double var_prediction;
};

/// Leading-order Clifford-average mean and variance of <psi_beta|O|psi_beta>.
TpqMoments tpq_moments(const ThermalSpectrum& spectrum, double beta, const PauliSum& o);
TpqMoments tpq_moments(const PauliSum& h, double beta, const PauliSum& o);

/// min(1, 4 |O|^2 purity / eps^2).
double tpq_failure_bound(double o_norm, double epsilon, double purity);
double tpq_failure_bound(double o_norm, double epsilon, const PauliSum& h, double beta);

}  // namespace thermshadow

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
#include <span>
#include <vector>

#include "thermshadow/pauli.hpp"

namespace thermshadow {

enum class Boundary { Open, Closed };

/// sum_i J (X_i X_{i+1} + Y_i Y_{i+1}) + Delta Z_i Z_{i+1}. Closed boundary
/// adds the (n-1, 0) bond for n > 2.
PauliSum build_xxz(int n, double J, double Delta, Boundary boundary = Boundary::Open);

/// Number of QBM parameters: 3 C(n,2) pair couplings plus 3n fields.
std::size_t qbm_parameter_count(int n);

/// QBM operator basis in parameter order: XX pairs (i<j, lexicographic), YY
/// pairs, ZZ pairs, then X fields, Y fields, Z fields.
std::vector<PauliString> qbm_operators(int n);

/// H(theta) = sum_k theta_k * qbm_operators(n)[k], zero terms pruned.
PauliSum build_qbm(int n, std::span<const double> theta);

/// All-to-all XX/YY/ZZ couplings and X/Y/Z fields with coefficients uniform
/// in [-1, 1], drawn in qbm_operators order from the given seed.
PauliSum build_random_xyz(int n, std::uint64_t seed);

enum class WindowMode { Exact, CoefficientBound };

struct SpectralWindow {
    double lambda_min = 0.0;
    double lambda_max = 0.0;
    bool exact = false;

    double span() const { return lambda_max - lambda_min; }
};

/// Exact mode diagonalizes; coefficient-bound returns +-sum |a_k|.
SpectralWindow spectral_window(const PauliSum& h, WindowMode mode = WindowMode::CoefficientBound);

struct RescaledHamiltonian {
    PauliSum h_tilde;  // (H - lambda_min) / (lambda_max - lambda_min), identity term included
    double tau = 0.0;  // beta (lambda_max - lambda_min) / 2
    SpectralWindow window;
    double beta = 0.0;
};

/// Maps H onto a spectrum inside [0, 1] so that exp(-tau h_tilde) equals
/// exp(beta lambda_min / 2) exp(-beta H / 2).
RescaledHamiltonian rescale(const PauliSum& h, const SpectralWindow& w, double beta);

}  // namespace thermshadow

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

#include <functional>

#include "thermshadow/state.hpp"

namespace thermshadow {

/// Eigendecomposition of a Hermitian matrix with ascending eigenvalues.
struct HermitianEig {
    RVector eigenvalues;
    CMatrix eigenvectors;  // unitary; column k belongs to eigenvalues[k]

    /// V f(Lambda) V^dagger. Throws std::domain_error if f is not finite on the spectrum.
    CMatrix apply(const std::function<double(double)>& f) const;
    CMatrix reconstruct() const;
};

/// Largest elementwise deviation from Hermiticity.
double hermiticity_error(const CMatrix& m);

/// Throws std::invalid_argument unless the input is Hermitian within 1e-10.
HermitianEig eig_hermitian(const CMatrix& m);

/// f(M) through the eigendecomposition, the single route for matrix functions.
CMatrix mat_func(const CMatrix& m, const std::function<double(double)>& f);

double max_abs_diff(const CMatrix& a, const CMatrix& b);

/// Spectral norm of a Hermitian matrix.
double spectral_norm_hermitian(const CMatrix& m);

}  // namespace thermshadow

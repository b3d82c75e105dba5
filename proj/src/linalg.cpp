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

#include "thermshadow/linalg.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include <Eigen/Eigenvalues>

namespace thermshadow {

CMatrix HermitianEig::apply(const std::function<double(double)>& f) const {
    const Eigen::Index d = eigenvalues.size();
    RVector fl(d);
    for (Eigen::Index k = 0; k < d; ++k) {
        fl[k] = f(eigenvalues[k]);
        if (!std::isfinite(fl[k])) {
            throw std::domain_error("matrix function undefined at eigenvalue " + std::to_string(eigenvalues[k]));
        }
    }
    return eigenvectors * fl.asDiagonal() * eigenvectors.adjoint();
}

CMatrix HermitianEig::reconstruct() const {
    return eigenvectors * eigenvalues.asDiagonal() * eigenvectors.adjoint();
}

double hermiticity_error(const CMatrix& m) {
    if (m.rows() != m.cols()) return INFINITY;
    if (m.size() == 0) return 0.0;
    return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

HermitianEig eig_hermitian(const CMatrix& m) {
    const double err = hermiticity_error(m);
    if (!(err <= 1e-10)) throw std::invalid_argument("matrix is not Hermitian (deviation " + std::to_string(err) + ")");
    Eigen::SelfAdjointEigenSolver<CMatrix> solver(m);
    if (solver.info() != Eigen::Success) throw NumericalError("Hermitian eigensolver did not converge");
    return {solver.eigenvalues(), solver.eigenvectors()};
}

CMatrix mat_func(const CMatrix& m, const std::function<double(double)>& f) { return eig_hermitian(m).apply(f); }

double max_abs_diff(const CMatrix& a, const CMatrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) throw std::invalid_argument("max_abs_diff: shape mismatch");
    if (a.size() == 0) return 0.0;
    return (a - b).cwiseAbs().maxCoeff();
}

double spectral_norm_hermitian(const CMatrix& m) {
    const HermitianEig e = eig_hermitian(m);
    return std::max(std::abs(e.eigenvalues[0]), std::abs(e.eigenvalues[e.eigenvalues.size() - 1]));
}

}  // namespace thermshadow

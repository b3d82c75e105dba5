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

#include <optional>
#include <string>
#include <vector>

#include "thermshadow/clifford.hpp"
#include "thermshadow/gibbs.hpp"
#include "thermshadow/models.hpp"

namespace thermshadow {

enum class TpqBackend { Exact, Polynomial };

/// Normalized exp(-beta H / 2) U |0> (or its polynomial approximation).
struct TpqState {
    StateVector state;
    double beta = 0.0;
    TpqBackend backend = TpqBackend::Exact;
    int degree = 0;  // polynomial backend only
    CliffordTableau unitary;
    /// Exact: <0|U^dag exp(-beta H) U|0>. Polynomial: |p(h_tilde) U|0>|^2.
    double norm_sq = 0.0;
};

/// U|0...0> by replaying the synthesized circuit.
StateVector stabilizer_state(const CliffordTableau& u);

/// Degree-d Chebyshev approximation of y -> exp(-tau y) on y in [0, 1].
/// Internally x = 2y - 1 and the target is exp(-tau (x + 1) / 2).
struct ChebyshevPoly {
    int degree = 0;
    std::vector<double> coeffs;  // length degree + 1, Chebyshev basis in x
    double tau = 0.0;
    double sup_error = 0.0;  // measured on a uniform 10^4-point grid of [0, 1]

    /// Value at y in [0, 1] (Clenshaw).
    double operator()(double y) const;
};

inline constexpr int kSupErrorGrid = 10000;

/// Coefficients by Chebyshev-Gauss quadrature; the sup error is measured and stored.
ChebyshevPoly chebyshev_fit(double tau, int degree);
ChebyshevPoly chebyshev_from_coefficients(double tau, std::vector<double> coeffs);
double measure_sup_error(const ChebyshevPoly& p, int grid_points = kSupErrorGrid);

/// Polynomial cache: header "thermshadow-chebyshev v1", then one record per
/// line `tau degree sup_error c_0 ... c_d` in shortest round-trip notation.
std::string format_poly_cache(const std::vector<ChebyshevPoly>& polys);
std::vector<ChebyshevPoly> parse_poly_cache(std::string_view text);
void write_poly_cache(const std::string& path, const std::vector<ChebyshevPoly>& polys);
std::vector<ChebyshevPoly> read_poly_cache(const std::string& path);

/// Dense exp(-beta (H - lambda_min) / 2) built once, applied to many initial states.
class ExactPropagator {
public:
    ExactPropagator(const ThermalSpectrum& spectrum, double beta);

    double beta() const noexcept { return beta_; }
    TpqState prepare(const CliffordTableau& u) const;
    /// Normalized propagated state; writes the unshifted <v|exp(-beta H)|v>.
    StateVector propagate(const StateVector& initial, double* norm_sq = nullptr) const;

private:
    double beta_;
    double lambda_min_;
    CMatrix op_;
};

TpqState prepare_exact(const PauliSum& h, double beta, const CliffordTableau& u);

/// Applies p(h_tilde) for a Chebyshev polynomial. The recurrence strategy uses
/// only Pauli-sum matrix-vector products with h_tilde; the dense strategy
/// precomputes V p(h_tilde(Lambda)) V^dag from a spectrum and is equivalent.
class PolynomialPropagator {
public:
    /// Throws std::invalid_argument if poly.tau does not match beta and the window.
    PolynomialPropagator(const PauliSum& h, double beta, ChebyshevPoly poly, const SpectralWindow& window);
    PolynomialPropagator(const ThermalSpectrum& spectrum, const PauliSum& h, double beta, ChebyshevPoly poly,
                         const SpectralWindow& window);

    const ChebyshevPoly& poly() const noexcept { return poly_; }
    const RescaledHamiltonian& rescaled() const noexcept { return rescaled_; }
    bool is_dense() const noexcept { return dense_.has_value(); }

    TpqState prepare(const CliffordTableau& u) const;
    /// Unnormalized p(h_tilde) v.
    CVector apply(const CVector& v) const;
    StateVector propagate(const StateVector& initial, double* norm_sq = nullptr) const;

private:
    double beta_;
    ChebyshevPoly poly_;
    RescaledHamiltonian rescaled_;
    std::vector<kernels::PauliTerm> terms_;
    std::optional<CMatrix> dense_;
};

TpqState prepare_poly(const PauliSum& h, double beta, const CliffordTableau& u, const ChebyshevPoly& poly,
                      const SpectralWindow& window);

/// LCU block encoding W = A^dag B A with the ancilla register as the high
/// index bits: full index = ancilla * 2^n + system.
struct BlockEncoding {
    int n = 0;
    int m = 0;       // ancilla qubits, ceil(log2 K)
    double a = 0.0;  // sum |a_k|
    CMatrix W;

    CMatrix top_left_block() const;
};

/// Throws std::invalid_argument if n + m exceeds the dense cap.
BlockEncoding build_lcu(const PauliSum& h);

/// W restricted to span{|0^m>|lambda>, (W - lambda)|0^m>|lambda> / sqrt(1 - lambda^2)}
/// for an eigenvector of H/a with eigenvalue lambda, |lambda| < 1.
Eigen::Matrix2cd qubitized_block(const BlockEncoding& be, const CVector& eigenvector, double lambda);

/// Clifford-averaged probability of the all-zero ancilla outcome,
/// exp(beta lambda_min) Tr exp(-beta H) / 2^n, with lambda_min from the window.
double success_probability(const ThermalSpectrum& spectrum, double beta, const SpectralWindow& window);
double success_probability(const PauliSum& h, double beta, const SpectralWindow& window);
/// Per-U value norm_sq * exp(beta lambda_min) for an exact TPQ preparation.
double empirical_success(double norm_sq, double beta, const SpectralWindow& window);

}  // namespace thermshadow

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

#include <complex>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

namespace thermshadow {

using cplx = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RVector = Eigen::VectorXd;

/// Dense storage cap. Density operators at this size are 4096 x 4096.
inline constexpr int kMaxQubits = 12;

class PauliString;

/// Thrown when a numerical routine cannot produce a finite answer.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

void check_qubit_count(int n);

/// Normalized amplitudes over 2^n basis states. Basis index bit q is qubit q.
class StateVector {
public:
    /// |0...0>.
    explicit StateVector(int n);

    static StateVector basis(int n, std::uint64_t index);
    static StateVector from_amplitudes(int n, CVector amps);

    int num_qubits() const noexcept { return n_; }
    std::size_t dim() const noexcept { return static_cast<std::size_t>(amps_.size()); }

    const CVector& amplitudes() const noexcept { return amps_; }
    CVector& amplitudes() noexcept { return amps_; }
    cplx operator[](std::size_t i) const { return amps_[static_cast<Eigen::Index>(i)]; }

    std::span<cplx> span() noexcept { return {amps_.data(), dim()}; }
    std::span<const cplx> span() const noexcept { return {amps_.data(), dim()}; }

    double norm() const;
    /// Rescales to unit norm; throws NumericalError on a zero vector.
    void normalize();

    /// |<this|other>|^2.
    double fidelity(const StateVector& other) const;

private:
    int n_;
    CVector amps_;
};

/// Density matrix on n qubits; shadow snapshots share the type but may be non-positive.
struct DensityOperator {
    int num_qubits = 0;
    CMatrix mat;

    static DensityOperator maximally_mixed(int n);
    static DensityOperator pure(const StateVector& psi);

    cplx trace() const { return mat.trace(); }
    double expectation(const PauliString& p) const;
};

/// Apply a 1- or 2-qubit unitary in place. For two targets (q0, q1) the gate's
/// local basis index is bit(q0) + 2 * bit(q1).
void apply_gate_inplace(StateVector& state, const CMatrix& gate, std::span<const int> targets);

StateVector apply_gate(StateVector state, const CMatrix& gate, std::span<const int> targets);

double pauli_expectation(const StateVector& state, const PauliString& p);

namespace gates {
CMatrix h();
CMatrix s();
CMatrix sdg();
CMatrix x();
CMatrix y();
CMatrix z();
/// Control is the first target, i.e. local bit 0.
CMatrix cx();
}  // namespace gates

}  // namespace thermshadow

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

#include "thermshadow/state.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "thermshadow/kernels.hpp"
#include "thermshadow/pauli.hpp"

namespace thermshadow {

void check_qubit_count(int n) {
    if (n < 1 || n > kMaxQubits) {
        throw std::invalid_argument("qubit count " + std::to_string(n) + " outside [1, " +
                                    std::to_string(kMaxQubits) + "]");
    }
}

StateVector::StateVector(int n) : n_(n) {
    check_qubit_count(n);
    amps_ = CVector::Zero(Eigen::Index{1} << n);
    amps_[0] = 1.0;
}

StateVector StateVector::basis(int n, std::uint64_t index) {
    StateVector s(n);
    if (index >= s.dim()) throw std::invalid_argument("basis index out of range");
    s.amps_[0] = 0.0;
    s.amps_[static_cast<Eigen::Index>(index)] = 1.0;
    return s;
}

StateVector StateVector::from_amplitudes(int n, CVector amps) {
    StateVector s(n);
    if (static_cast<std::size_t>(amps.size()) != s.dim()) {
        throw std::invalid_argument("amplitude vector length is not 2^n");
    }
    s.amps_ = std::move(amps);
    return s;
}

double StateVector::norm() const { return std::sqrt(kernels::parallel::norm_squared(span())); }

void StateVector::normalize() {
    const double nrm = norm();
    if (!(nrm > 0.0) || !std::isfinite(nrm)) throw NumericalError("cannot normalize a zero or non-finite state");
    amps_ /= nrm;
}

double StateVector::fidelity(const StateVector& other) const {
    if (other.n_ != n_) throw std::invalid_argument("fidelity: qubit count mismatch");
    return std::norm(amps_.dot(other.amps_));
}

DensityOperator DensityOperator::maximally_mixed(int n) {
    check_qubit_count(n);
    const Eigen::Index d = Eigen::Index{1} << n;
    return {n, CMatrix::Identity(d, d) / static_cast<double>(d)};
}

DensityOperator DensityOperator::pure(const StateVector& psi) {
    return {psi.num_qubits(), psi.amplitudes() * psi.amplitudes().adjoint()};
}

double DensityOperator::expectation(const PauliString& p) const {
    if (p.num_qubits() != num_qubits) throw std::invalid_argument("expectation: qubit count mismatch");
    const auto d = static_cast<std::size_t>(mat.rows());
    const cplx v = kernels::parallel::pauli_trace({mat.data(), d * d}, d, p.term());
    return v.real();
}

namespace {

void check_unitary(const CMatrix& g) {
    const Eigen::Index d = g.rows();
    if (g.cols() != d) throw std::invalid_argument("gate is not square");
    const double err = (g.adjoint() * g - CMatrix::Identity(d, d)).cwiseAbs().maxCoeff();
    if (err > 1e-12) throw std::invalid_argument("gate is not unitary (deviation " + std::to_string(err) + ")");
}

}  // namespace

void apply_gate_inplace(StateVector& state, const CMatrix& gate, std::span<const int> targets) {
    const int n = state.num_qubits();
    for (int t : targets) {
        if (t < 0 || t >= n) throw std::invalid_argument("gate target out of range");
    }
    check_unitary(gate);
    if (targets.size() == 1) {
        if (gate.rows() != 2) throw std::invalid_argument("one target needs a 2x2 gate");
        kernels::Mat2 m;
        for (int r = 0; r < 2; ++r)
            for (int c = 0; c < 2; ++c) m[static_cast<std::size_t>(2 * r + c)] = gate(r, c);
        kernels::parallel::apply_1q(state.span(), targets[0], m);
    } else if (targets.size() == 2) {
        if (gate.rows() != 4) throw std::invalid_argument("two targets need a 4x4 gate");
        if (targets[0] == targets[1]) throw std::invalid_argument("gate targets must be distinct");
        kernels::Mat4 m;
        for (int r = 0; r < 4; ++r)
            for (int c = 0; c < 4; ++c) m[static_cast<std::size_t>(4 * r + c)] = gate(r, c);
        kernels::parallel::apply_2q(state.span(), targets[0], targets[1], m);
    } else {
        throw std::invalid_argument("gates act on one or two qubits");
    }
}

StateVector apply_gate(StateVector state, const CMatrix& gate, std::span<const int> targets) {
    apply_gate_inplace(state, gate, targets);
    return state;
}

double pauli_expectation(const StateVector& state, const PauliString& p) {
    if (p.num_qubits() != state.num_qubits()) throw std::invalid_argument("pauli_expectation: qubit count mismatch");
    const cplx v = kernels::parallel::pauli_expectation(state.span(), p.term());
    if (std::abs(v.imag()) > 1e-12 * std::max(1.0, std::abs(v.real())) && p.is_hermitian()) {
        throw NumericalError("Hermitian Pauli expectation has an imaginary part");
    }
    return v.real();
}

namespace gates {

CMatrix h() {
    CMatrix m(2, 2);
    const double r = 1.0 / std::sqrt(2.0);
    m << r, r, r, -r;
    return m;
}

CMatrix s() {
    CMatrix m(2, 2);
    m << 1.0, 0.0, 0.0, cplx(0.0, 1.0);
    return m;
}

CMatrix sdg() {
    CMatrix m(2, 2);
    m << 1.0, 0.0, 0.0, cplx(0.0, -1.0);
    return m;
}

CMatrix x() {
    CMatrix m(2, 2);
    m << 0.0, 1.0, 1.0, 0.0;
    return m;
}

CMatrix y() {
    CMatrix m(2, 2);
    m << 0.0, cplx(0.0, -1.0), cplx(0.0, 1.0), 0.0;
    return m;
}

CMatrix z() {
    CMatrix m(2, 2);
    m << 1.0, 0.0, 0.0, -1.0;
    return m;
}

CMatrix cx() {
    // local index = bit(control) + 2 bit(target); flips the target when control is set
    CMatrix m = CMatrix::Zero(4, 4);
    m(0, 0) = 1.0;
    m(2, 2) = 1.0;
    m(3, 1) = 1.0;
    m(1, 3) = 1.0;
    return m;
}

}  // namespace gates

}  // namespace thermshadow

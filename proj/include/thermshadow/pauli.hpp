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
#include <string>
#include <string_view>
#include <vector>

#include "thermshadow/kernels.hpp"
#include "thermshadow/state.hpp"

namespace thermshadow {

/// Signed n-qubit Pauli operator i^phase * P_0 (x) P_1 (x) ... with letters
/// encoded by paired masks: X = (x), Z = (z), Y = (x and z). Y is the
/// Hermitian Pauli Y, so a Hermitian string has phase 0 or 2.
class PauliString {
public:
    static constexpr int kMaxQubits = 64;

    PauliString() = default;
    /// Identity on n qubits.
    explicit PauliString(int n);
    PauliString(int n, std::uint64_t x, std::uint64_t z, int phase = 0);

    /// Parses "XIZY", optionally prefixed with '+', '-', "i" or "-i". Character k acts on qubit k.
    static PauliString from_word(std::string_view word);
    /// Single-letter operator on qubit q (letter in "IXYZ").
    static PauliString single(int n, int q, char letter);

    int num_qubits() const noexcept { return n_; }
    std::uint64_t x_mask() const noexcept { return x_; }
    std::uint64_t z_mask() const noexcept { return z_; }
    int phase() const noexcept { return phase_; }
    /// +1 or -1 for Hermitian strings.
    int sign() const;

    char letter(int q) const;
    int weight() const noexcept;
    std::uint64_t support() const noexcept { return x_ | z_; }
    bool is_identity() const noexcept { return x_ == 0 && z_ == 0; }
    bool is_hermitian() const noexcept { return (phase_ & 1) == 0; }

    /// Letters only, no sign ("XIZ").
    std::string word() const;
    /// Sign prefix plus letters ("+XIZ", "-iY").
    std::string str() const;

    bool commutes(const PauliString& other) const;

    PauliString with_phase(int phase) const { return {n_, x_, z_, phase}; }
    PauliString negated() const { return with_phase(phase_ + 2); }

    friend PauliString operator*(const PauliString& a, const PauliString& b);
    friend bool operator==(const PauliString& a, const PauliString& b) = default;

    CMatrix to_dense() const;
    kernels::PauliTerm term(double coeff = 1.0) const { return {coeff, x_, z_, phase_}; }

private:
    int n_ = 0;
    std::uint64_t x_ = 0;
    std::uint64_t z_ = 0;
    int phase_ = 0;
};

/// Exponent of i produced when multiplying letter-form strings a*b (mod 4),
/// not counting the strings' own phases.
int pauli_product_phase(std::uint64_t x1, std::uint64_t z1, std::uint64_t x2, std::uint64_t z2);

struct PauliTermEntry {
    double coeff;
    PauliString pauli;  // always phase 0
};

/// Hermitian operator sum_k a_k P_k with real coefficients.
class PauliSum {
public:
    static constexpr double kPruneTolerance = 1e-14;

    PauliSum() = default;
    explicit PauliSum(int n) : n_(n) {}

    int num_qubits() const noexcept { return n_; }
    const std::vector<PauliTermEntry>& terms() const noexcept { return terms_; }
    std::size_t size() const noexcept { return terms_.size(); }
    bool empty() const noexcept { return terms_.empty(); }

    /// Appends without merging; call canonicalize() afterwards. A sign on the
    /// string is folded into the coefficient; non-Hermitian strings are rejected.
    void add(double coeff, const PauliString& p);
    /// Merges duplicates, prunes |a| < 1e-14, keeps first-appearance order.
    void canonicalize();

    double one_norm() const;
    /// Maximum weight over terms (the locality k).
    int locality() const;

    CMatrix to_dense() const;
    std::vector<kernels::PauliTerm> kernel_terms() const;

    /// Expectation in a pure state.
    double expectation(const StateVector& psi) const;
    /// Tr(rho O) for a dense density matrix.
    double expectation(const CMatrix& rho) const;

    PauliSum scaled(double factor) const;
    friend bool operator==(const PauliSum& a, const PauliSum& b);

private:
    int n_ = 0;
    std::vector<PauliTermEntry> terms_;
};

/// out = h * in through the parallel Pauli-sum kernel.
void apply_pauli_sum(const PauliSum& h, const CVector& in, CVector& out);

/// Hamiltonian text format: one `coefficient word` pair per line; blank
/// lines and lines starting with '#' are skipped. Coefficients are emitted in
/// shortest round-trip form, so format(parse(format(h))) == format(h).
std::string format_hamiltonian(const PauliSum& h);
PauliSum parse_hamiltonian(std::string_view text);
PauliSum read_hamiltonian_file(const std::string& path);
void write_hamiltonian_file(const std::string& path, const PauliSum& h);

/// All 3n weight-1 and 9 C(n,2) weight-2 Pauli strings, in a fixed order.
std::vector<PauliString> local_paulis_up_to_two(int n);
/// Weight-1 Paulis plus XX, YY, ZZ on every pair.
std::vector<PauliString> ensemble_observables(int n);

}  // namespace thermshadow

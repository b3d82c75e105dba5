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
#include <vector>

#include "thermshadow/pauli.hpp"
#include "thermshadow/rng.hpp"
#include "thermshadow/state.hpp"

namespace thermshadow {

/// n-qubit Clifford unitary V stored by its conjugation action: the signed
/// images V X_q V^dagger and V Z_q V^dagger of the 2n generators. Global phase
/// is not represented.
class CliffordTableau {
public:
    CliffordTableau() = default;
    static CliffordTableau identity(int n);
    /// Validates the symplectic condition; throws std::invalid_argument otherwise.
    static CliffordTableau from_images(std::vector<PauliString> x_images, std::vector<PauliString> z_images);

    int num_qubits() const noexcept { return n_; }
    const PauliString& x_image(int q) const { return images_[static_cast<std::size_t>(q)]; }
    const PauliString& z_image(int q) const { return images_[static_cast<std::size_t>(n_ + q)]; }

    /// Images are Hermitian and satisfy the Pauli commutation relations.
    bool is_valid() const;

    /// V <- G V for the named gate G.
    void prepend_h(int q);
    void prepend_s(int q);
    void prepend_cx(int control, int target);

    /// V p V^dagger.
    PauliString conjugate(const PauliString& p) const;

    /// Tableau of outer * inner (inner applied first).
    friend CliffordTableau compose(const CliffordTableau& outer, const CliffordTableau& inner);
    friend bool operator==(const CliffordTableau& a, const CliffordTableau& b) = default;

    /// Canonical text: 2n signed words separated by ',' (X images then Z images).
    std::string serialize() const;
    static CliffordTableau deserialize(std::string_view text);

    /// Packed bits, unique per tableau; usable as a hash-set key.
    std::vector<std::uint64_t> key() const;

private:
    int n_ = 0;
    std::vector<PauliString> images_;
};

/// Binary symplectic inner product of two letter-form Paulis (0 = commute).
int symplectic_product(std::uint64_t x1, std::uint64_t z1, std::uint64_t x2, std::uint64_t z2);

/// Uniform sample from the n-qubit Clifford group modulo phase.
CliffordTableau sample_clifford(int n, Rng& rng);

/// |Cl(2^n)| / phases = 2^(n^2 + 2n) prod_j (4^j - 1).
std::uint64_t clifford_group_order(int n);

enum class GateKind : std::uint8_t { H, S, Sdg, CX };

struct Gate {
    GateKind kind;
    int q0;
    int q1 = -1;  // target of CX
    friend bool operator==(const Gate&, const Gate&) = default;
};

using GateList = std::vector<Gate>;

/// Circuit over {H, S, Sdg, CX} whose unitary has the tableau's action up to
/// global phase. O(n^2) gates.
GateList synthesize(const CliffordTableau& t);

void apply_gates(StateVector& state, const GateList& gates);
/// Dense 2^n x 2^n unitary of a gate list.
CMatrix gates_to_dense(const GateList& gates, int n);
/// Tableau of a gate list (applied in list order).
CliffordTableau gates_to_tableau(const GateList& gates, int n);

/// Dense unitary (up to global phase) for a tableau.
CMatrix tableau_to_dense(const CliffordTableau& t);

enum class Basis : std::uint8_t { X, Y, Z };

char basis_letter(Basis b);
/// Each qubit independently X, Y or Z with probability 1/3.
std::vector<Basis> sample_pauli_basis(int n, Rng& rng);

/// Every element of the Clifford group modulo phase, found by breadth-first
/// closure from the identity under {H_q, S_q, CX_ab}. Order is deterministic.
std::vector<CliffordTableau> enumerate_clifford_group(int n);

/// Enumeration cache: first line "thermshadow-clifford-enum v1 n=<n> count=<N>",
/// then one serialized tableau per line.
void write_enumeration_cache(const std::string& path, int n, const std::vector<CliffordTableau>& group);
std::vector<CliffordTableau> read_enumeration_cache(const std::string& path, int n);
/// Reads the cache when present and valid, otherwise enumerates and writes it.
std::vector<CliffordTableau> load_or_enumerate(const std::string& path, int n);

}  // namespace thermshadow

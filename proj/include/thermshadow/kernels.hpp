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

// Statevector kernels. Every kernel exists twice with identical signatures:
// `serial` is the reference implementation kept for testing, `parallel`
// distributes the amplitude loop with OpenMP. Reductions in `parallel` use a
// fixed chunking that does not depend on the thread count, so results are
// bit-identical for any number of workers.

#include <array>
#include <complex>
#include <cstdint>
#include <span>

namespace thermshadow::kernels {

using cplx = std::complex<double>;

/// One signed Pauli term a * i^phase * (letter-form Pauli with masks x, z).
/// Letter form: qubit q carries X if only x bit set, Z if only z bit set, Y if both.
struct PauliTerm {
    double coeff;
    std::uint64_t x;
    std::uint64_t z;
    int phase;  // exponent of i, 0..3
};

/// Row-major 2x2 unitary acting on one qubit.
using Mat2 = std::array<cplx, 4>;
/// Row-major 4x4 unitary; local index = bit(q0) + 2 * bit(q1).
using Mat4 = std::array<cplx, 16>;

inline constexpr std::size_t kReduceChunk = 1024;

#define THERMSHADOW_KERNEL_DECLS                                                                  \
    void apply_1q(std::span<cplx> amps, int q, const Mat2& m);                                    \
    void apply_2q(std::span<cplx> amps, int q0, int q1, const Mat4& m);                           \
    void apply_h(std::span<cplx> amps, int q);                                                    \
    void apply_s(std::span<cplx> amps, int q);                                                    \
    void apply_sdg(std::span<cplx> amps, int q);                                                  \
    void apply_cx(std::span<cplx> amps, int control, int target);                                 \
    /* out = (sum of terms) * in; out must not alias in. */                                       \
    void apply_pauli_sum(std::span<const PauliTerm> terms, std::span<const cplx> in,              \
                         std::span<cplx> out);                                                    \
    /* <v| P |v> for a single term (coefficient included). */                                     \
    cplx pauli_expectation(std::span<const cplx> v, const PauliTerm& term);                       \
    /* Tr(rho P) for a dense column-major 2^n x 2^n matrix (coefficient included). */             \
    cplx pauli_trace(std::span<const cplx> rho_colmajor, std::size_t dim, const PauliTerm& term); \
    double norm_squared(std::span<const cplx> v);

namespace serial {
THERMSHADOW_KERNEL_DECLS
}

namespace parallel {
THERMSHADOW_KERNEL_DECLS
}

#undef THERMSHADOW_KERNEL_DECLS

/// i^k for k mod 4.
constexpr cplx i_pow(int k) noexcept {
    switch (k & 3) {
        case 0: return {1.0, 0.0};
        case 1: return {0.0, 1.0};
        case 2: return {-1.0, 0.0};
        default: return {0.0, -1.0};
    }
}

}  // namespace thermshadow::kernels

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

#include "thermshadow/kernels.hpp"

#include <bit>
#include <cmath>

namespace thermshadow::kernels::serial {

namespace {

inline std::size_t insert_zero(std::size_t i, int q) {
    const std::size_t low = i & ((std::size_t{1} << q) - 1);
    return ((i >> q) << (q + 1)) | low;
}

inline double parity_sign(std::uint64_t v) { return (std::popcount(v) & 1) ? -1.0 : 1.0; }

}  // namespace

void apply_1q(std::span<cplx> amps, int q, const Mat2& m) {
    const std::size_t half = amps.size() / 2;
    const std::size_t bit = std::size_t{1} << q;
    for (std::size_t k = 0; k < half; ++k) {
        const std::size_t i0 = insert_zero(k, q);
        const std::size_t i1 = i0 | bit;
        const cplx a0 = amps[i0];
        const cplx a1 = amps[i1];
        amps[i0] = m[0] * a0 + m[1] * a1;
        amps[i1] = m[2] * a0 + m[3] * a1;
    }
}

void apply_2q(std::span<cplx> amps, int q0, int q1, const Mat4& m) {
    const int lo = q0 < q1 ? q0 : q1;
    const int hi = q0 < q1 ? q1 : q0;
    const std::size_t b0 = std::size_t{1} << q0;
    const std::size_t b1 = std::size_t{1} << q1;
    const std::size_t quarter = amps.size() / 4;
    for (std::size_t k = 0; k < quarter; ++k) {
        const std::size_t base = insert_zero(insert_zero(k, lo), hi);
        const std::size_t idx[4] = {base, base | b0, base | b1, base | b0 | b1};
        cplx a[4];
        for (int r = 0; r < 4; ++r) a[r] = amps[idx[r]];
        for (int r = 0; r < 4; ++r) {
            amps[idx[r]] = m[4 * r] * a[0] + m[4 * r + 1] * a[1] + m[4 * r + 2] * a[2] + m[4 * r + 3] * a[3];
        }
    }
}

void apply_h(std::span<cplx> amps, int q) {
    const double r = 1.0 / std::sqrt(2.0);
    const std::size_t half = amps.size() / 2;
    const std::size_t bit = std::size_t{1} << q;
    for (std::size_t k = 0; k < half; ++k) {
        const std::size_t i0 = insert_zero(k, q);
        const std::size_t i1 = i0 | bit;
        const cplx a0 = amps[i0];
        const cplx a1 = amps[i1];
        amps[i0] = r * (a0 + a1);
        amps[i1] = r * (a0 - a1);
    }
}

void apply_s(std::span<cplx> amps, int q) {
    const std::size_t half = amps.size() / 2;
    const std::size_t bit = std::size_t{1} << q;
    for (std::size_t k = 0; k < half; ++k) {
        const std::size_t i1 = insert_zero(k, q) | bit;
        amps[i1] = cplx(-amps[i1].imag(), amps[i1].real());
    }
}

void apply_sdg(std::span<cplx> amps, int q) {
    const std::size_t half = amps.size() / 2;
    const std::size_t bit = std::size_t{1} << q;
    for (std::size_t k = 0; k < half; ++k) {
        const std::size_t i1 = insert_zero(k, q) | bit;
        amps[i1] = cplx(amps[i1].imag(), -amps[i1].real());
    }
}

void apply_cx(std::span<cplx> amps, int control, int target) {
    const int lo = control < target ? control : target;
    const int hi = control < target ? target : control;
    const std::size_t bc = std::size_t{1} << control;
    const std::size_t bt = std::size_t{1} << target;
    const std::size_t quarter = amps.size() / 4;
    for (std::size_t k = 0; k < quarter; ++k) {
        const std::size_t base = insert_zero(insert_zero(k, lo), hi) | bc;
        std::swap(amps[base], amps[base | bt]);
    }
}

void apply_pauli_sum(std::span<const PauliTerm> terms, std::span<const cplx> in, std::span<cplx> out) {
    const std::size_t dim = in.size();
    for (std::size_t j = 0; j < dim; ++j) out[j] = 0.0;
    for (const PauliTerm& t : terms) {
        const cplx c = t.coeff * i_pow(t.phase + std::popcount(t.x & t.z));
        for (std::size_t j = 0; j < dim; ++j) {
            const std::size_t src = j ^ t.x;
            out[j] += c * parity_sign(t.z & src) * in[src];
        }
    }
}

cplx pauli_expectation(std::span<const cplx> v, const PauliTerm& t) {
    const cplx c = t.coeff * i_pow(t.phase + std::popcount(t.x & t.z));
    cplx acc = 0.0;
    for (std::size_t j = 0; j < v.size(); ++j) {
        const std::size_t src = j ^ t.x;
        acc += std::conj(v[j]) * parity_sign(t.z & src) * v[src];
    }
    return c * acc;
}

cplx pauli_trace(std::span<const cplx> rho, std::size_t dim, const PauliTerm& t) {
    const cplx c = t.coeff * i_pow(t.phase + std::popcount(t.x & t.z));
    cplx acc = 0.0;
    for (std::size_t j = 0; j < dim; ++j) {
        // rho[j][j ^ x] in column-major storage.
        acc += rho[(j ^ t.x) * dim + j] * parity_sign(t.z & j);
    }
    return c * acc;
}

double norm_squared(std::span<const cplx> v) {
    double acc = 0.0;
    for (const cplx& a : v) acc += std::norm(a);
    return acc;
}

}  // namespace thermshadow::kernels::serial

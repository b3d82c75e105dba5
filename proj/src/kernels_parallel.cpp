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

#include <algorithm>
#include <bit>
#include <cmath>
#include <vector>

namespace thermshadow::kernels::parallel {

namespace {

// Below this many amplitudes the fork/join cost dominates.
constexpr std::size_t kParallelMin = std::size_t{1} << 11;

inline std::size_t insert_zero(std::size_t i, int q) {
    const std::size_t low = i & ((std::size_t{1} << q) - 1);
    return ((i >> q) << (q + 1)) | low;
}

inline double parity_sign(std::uint64_t v) { return (std::popcount(v) & 1) ? -1.0 : 1.0; }

// Sums f(j) over [0, n) in fixed chunks, then folds the chunk sums in order.
template <typename T, typename F>
T chunked_sum(std::size_t n, F&& f) {
    const std::size_t chunks = (n + kReduceChunk - 1) / kReduceChunk;
    std::vector<T> partial(chunks, T{});
    const auto signed_chunks = static_cast<std::ptrdiff_t>(chunks);
#pragma omp parallel for schedule(static) if (n >= kParallelMin)
    for (std::ptrdiff_t c = 0; c < signed_chunks; ++c) {
        const std::size_t begin = static_cast<std::size_t>(c) * kReduceChunk;
        const std::size_t end = std::min(n, begin + kReduceChunk);
        T acc{};
        for (std::size_t j = begin; j < end; ++j) acc += f(j);
        partial[static_cast<std::size_t>(c)] = acc;
    }
    T total{};
    for (const T& p : partial) total += p;
    return total;
}

}  // namespace

void apply_1q(std::span<cplx> amps, int q, const Mat2& m) {
    const auto half = static_cast<std::ptrdiff_t>(amps.size() / 2);
    const std::size_t bit = std::size_t{1} << q;
#pragma omp parallel for schedule(static) if (amps.size() >= kParallelMin)
    for (std::ptrdiff_t k = 0; k < half; ++k) {
        const std::size_t i0 = insert_zero(static_cast<std::size_t>(k), q);
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
    const auto quarter = static_cast<std::ptrdiff_t>(amps.size() / 4);
#pragma omp parallel for schedule(static) if (amps.size() >= kParallelMin)
    for (std::ptrdiff_t k = 0; k < quarter; ++k) {
        const std::size_t base = insert_zero(insert_zero(static_cast<std::size_t>(k), lo), hi);
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
    const auto half = static_cast<std::ptrdiff_t>(amps.size() / 2);
    const std::size_t bit = std::size_t{1} << q;
#pragma omp parallel for schedule(static) if (amps.size() >= kParallelMin)
    for (std::ptrdiff_t k = 0; k < half; ++k) {
        const std::size_t i0 = insert_zero(static_cast<std::size_t>(k), q);
        const std::size_t i1 = i0 | bit;
        const cplx a0 = amps[i0];
        const cplx a1 = amps[i1];
        amps[i0] = r * (a0 + a1);
        amps[i1] = r * (a0 - a1);
    }
}

void apply_s(std::span<cplx> amps, int q) {
    const auto half = static_cast<std::ptrdiff_t>(amps.size() / 2);
    const std::size_t bit = std::size_t{1} << q;
#pragma omp parallel for schedule(static) if (amps.size() >= kParallelMin)
    for (std::ptrdiff_t k = 0; k < half; ++k) {
        const std::size_t i1 = insert_zero(static_cast<std::size_t>(k), q) | bit;
        amps[i1] = cplx(-amps[i1].imag(), amps[i1].real());
    }
}

void apply_sdg(std::span<cplx> amps, int q) {
    const auto half = static_cast<std::ptrdiff_t>(amps.size() / 2);
    const std::size_t bit = std::size_t{1} << q;
#pragma omp parallel for schedule(static) if (amps.size() >= kParallelMin)
    for (std::ptrdiff_t k = 0; k < half; ++k) {
        const std::size_t i1 = insert_zero(static_cast<std::size_t>(k), q) | bit;
        amps[i1] = cplx(amps[i1].imag(), -amps[i1].real());
    }
}

void apply_cx(std::span<cplx> amps, int control, int target) {
    const int lo = control < target ? control : target;
    const int hi = control < target ? target : control;
    const std::size_t bc = std::size_t{1} << control;
    const std::size_t bt = std::size_t{1} << target;
    const auto quarter = static_cast<std::ptrdiff_t>(amps.size() / 4);
#pragma omp parallel for schedule(static) if (amps.size() >= kParallelMin)
    for (std::ptrdiff_t k = 0; k < quarter; ++k) {
        const std::size_t base = insert_zero(insert_zero(static_cast<std::size_t>(k), lo), hi) | bc;
        std::swap(amps[base], amps[base | bt]);
    }
}

void apply_pauli_sum(std::span<const PauliTerm> terms, std::span<const cplx> in, std::span<cplx> out) {
    const auto dim = static_cast<std::ptrdiff_t>(in.size());
    std::vector<cplx> coeffs(terms.size());
    for (std::size_t k = 0; k < terms.size(); ++k) {
        coeffs[k] = terms[k].coeff * i_pow(terms[k].phase + std::popcount(terms[k].x & terms[k].z));
    }
    // Loop over output rows so every write is owned by one thread.
#pragma omp parallel for schedule(static) if (in.size() >= kParallelMin)
    for (std::ptrdiff_t sj = 0; sj < dim; ++sj) {
        const auto j = static_cast<std::size_t>(sj);
        cplx acc = 0.0;
        for (std::size_t k = 0; k < terms.size(); ++k) {
            const std::size_t src = j ^ terms[k].x;
            acc += coeffs[k] * parity_sign(terms[k].z & src) * in[src];
        }
        out[j] = acc;
    }
}

cplx pauli_expectation(std::span<const cplx> v, const PauliTerm& t) {
    const cplx c = t.coeff * i_pow(t.phase + std::popcount(t.x & t.z));
    const cplx acc = chunked_sum<cplx>(v.size(), [&](std::size_t j) {
        const std::size_t src = j ^ t.x;
        return std::conj(v[j]) * parity_sign(t.z & src) * v[src];
    });
    return c * acc;
}

cplx pauli_trace(std::span<const cplx> rho, std::size_t dim, const PauliTerm& t) {
    const cplx c = t.coeff * i_pow(t.phase + std::popcount(t.x & t.z));
    const cplx acc = chunked_sum<cplx>(dim, [&](std::size_t j) { return rho[(j ^ t.x) * dim + j] * parity_sign(t.z & j); });
    return c * acc;
}

double norm_squared(std::span<const cplx> v) {
    return chunked_sum<double>(v.size(), [&](std::size_t j) { return std::norm(v[j]); });
}

}  // namespace thermshadow::kernels::parallel

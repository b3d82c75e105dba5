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

#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "thermshadow/kernels.hpp"

namespace ks = thermshadow::kernels;
using ks::cplx;

namespace {

std::vector<cplx> random_amps(int n, std::uint64_t seed) {
    std::mt19937_64 gen(seed);
    std::normal_distribution<double> nd;
    std::vector<cplx> v(std::size_t{1} << n);
    for (auto& a : v) a = {nd(gen), nd(gen)};
    return v;
}

// n = 12 puts every parallel loop above its size threshold.
constexpr int kN = 12;

}  // namespace

TEST(Kernels, GateKernelsMatchSerialBitForBit) {
    const auto base = random_amps(kN, 1);
    ks::Mat2 m2 = {cplx(0.6, 0.0), cplx(0.0, 0.8), cplx(0.0, 0.8), cplx(0.6, 0.0)};
    ks::Mat4 m4{};
    for (int i = 0; i < 16; ++i) m4[static_cast<std::size_t>(i)] = cplx(0.1 * i, -0.05 * i);
    auto a = base, b = base;
    for (int q = 0; q < kN; ++q) {
        ks::serial::apply_1q(a, q, m2);
        ks::parallel::apply_1q(b, q, m2);
        ks::serial::apply_h(a, q);
        ks::parallel::apply_h(b, q);
        ks::serial::apply_s(a, q);
        ks::parallel::apply_s(b, q);
        ks::serial::apply_sdg(a, (q + 3) % kN);
        ks::parallel::apply_sdg(b, (q + 3) % kN);
        ks::serial::apply_cx(a, q, (q + 5) % kN);
        ks::parallel::apply_cx(b, q, (q + 5) % kN);
        ks::serial::apply_2q(a, (q + 7) % kN, q, m4);
        ks::parallel::apply_2q(b, (q + 7) % kN, q, m4);
    }
    EXPECT_EQ(a, b);
}

TEST(Kernels, PauliSumMatchesSerial) {
    const auto in = random_amps(kN, 2);
    std::vector<ks::PauliTerm> terms = {{0.5, 0b11, 0, 0}, {-1.25, 0b101, 0b101, 0}, {0.75, 0, 0b110000, 0},
                                        {2.0, 0b100000000001, 0b1, 2}};
    std::vector<cplx> a(in.size()), b(in.size());
    ks::serial::apply_pauli_sum(terms, in, a);
    ks::parallel::apply_pauli_sum(terms, in, b);
    for (std::size_t j = 0; j < a.size(); ++j) EXPECT_NEAR(std::abs(a[j] - b[j]), 0.0, 1e-12);
}

TEST(Kernels, ReductionsAgreeWithSerial) {
    const auto v = random_amps(kN, 3);
    EXPECT_NEAR(ks::serial::norm_squared(v), ks::parallel::norm_squared(v), 1e-9);
    const ks::PauliTerm t{1.0, 0b1010, 0b0110, 0};
    EXPECT_NEAR(std::abs(ks::serial::pauli_expectation(v, t) - ks::parallel::pauli_expectation(v, t)), 0.0, 1e-9);
    const std::size_t d = 64;
    const auto rho = random_amps(12, 4);
    EXPECT_NEAR(std::abs(ks::serial::pauli_trace(rho, d, t) - ks::parallel::pauli_trace(rho, d, t)), 0.0, 1e-12);
}

TEST(Kernels, ParallelReductionIsReproducible) {
    const auto v = random_amps(kN, 5);
    const double first = ks::parallel::norm_squared(v);
    for (int r = 0; r < 5; ++r) EXPECT_EQ(first, ks::parallel::norm_squared(v));
}

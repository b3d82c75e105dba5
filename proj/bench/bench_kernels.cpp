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

// Serial reference vs OpenMP kernels on random statevectors.

#include <random>
#include <vector>

#include <benchmark/benchmark.h>

#include "thermshadow/kernels.hpp"

namespace k = thermshadow::kernels;

namespace {

std::vector<k::cplx> random_amps(int n) {
    std::mt19937_64 gen(11);
    std::normal_distribution<double> g;
    std::vector<k::cplx> v(std::size_t{1} << n);
    for (auto& a : v) a = {g(gen), g(gen)};
    return v;
}

// XXZ-like chain: XX, YY, ZZ on neighbours plus a field.
std::vector<k::PauliTerm> chain_terms(int n) {
    std::vector<k::PauliTerm> t;
    for (int q = 0; q + 1 < n; ++q) {
        const std::uint64_t m = (std::uint64_t{3} << q);
        t.push_back({0.5, m, 0, 0});
        t.push_back({0.5, m, m, 0});
        t.push_back({0.75, 0, m, 0});
    }
    for (int q = 0; q < n; ++q) t.push_back({0.1, 0, std::uint64_t{1} << q, 0});
    return t;
}

template <bool Parallel>
void BM_PauliSum(benchmark::State& st) {
    const int n = static_cast<int>(st.range(0));
    const auto in = random_amps(n);
    std::vector<k::cplx> out(in.size());
    const auto terms = chain_terms(n);
    for (auto _ : st) {
        if constexpr (Parallel)
            k::parallel::apply_pauli_sum(terms, in, out);
        else
            k::serial::apply_pauli_sum(terms, in, out);
        benchmark::DoNotOptimize(out.data());
    }
    st.SetItemsProcessed(st.iterations() * static_cast<std::int64_t>(in.size() * terms.size()));
}

template <bool Parallel>
void BM_Apply2q(benchmark::State& st) {
    const int n = static_cast<int>(st.range(0));
    auto amps = random_amps(n);
    k::Mat4 m{};
    for (int i = 0; i < 4; ++i) m[static_cast<std::size_t>(5 * i)] = 1.0;
    std::swap(m[10], m[11]);
    std::swap(m[14], m[15]);
    for (auto _ : st) {
        for (int q = 0; q + 1 < n; ++q) {
            if constexpr (Parallel)
                k::parallel::apply_2q(amps, q, q + 1, m);
            else
                k::serial::apply_2q(amps, q, q + 1, m);
        }
        benchmark::DoNotOptimize(amps.data());
    }
}

template <bool Parallel>
void BM_Expectation(benchmark::State& st) {
    const int n = static_cast<int>(st.range(0));
    const auto v = random_amps(n);
    const k::PauliTerm t{1.0, 0b11, 0b11, 0};
    for (auto _ : st) {
        k::cplx e = Parallel ? k::parallel::pauli_expectation(v, t) : k::serial::pauli_expectation(v, t);
        benchmark::DoNotOptimize(e);
    }
}

template <bool Parallel>
void BM_NormSquared(benchmark::State& st) {
    const auto v = random_amps(static_cast<int>(st.range(0)));
    for (auto _ : st) {
        double r = Parallel ? k::parallel::norm_squared(v) : k::serial::norm_squared(v);
        benchmark::DoNotOptimize(r);
    }
}

}  // namespace

BENCHMARK(BM_PauliSum<false>)->Name("pauli_sum/serial")->DenseRange(10, 18, 4);
BENCHMARK(BM_PauliSum<true>)->Name("pauli_sum/parallel")->DenseRange(10, 18, 4);
BENCHMARK(BM_Apply2q<false>)->Name("apply_2q_layer/serial")->DenseRange(10, 18, 4);
BENCHMARK(BM_Apply2q<true>)->Name("apply_2q_layer/parallel")->DenseRange(10, 18, 4);
BENCHMARK(BM_Expectation<false>)->Name("pauli_expectation/serial")->DenseRange(10, 18, 4);
BENCHMARK(BM_Expectation<true>)->Name("pauli_expectation/parallel")->DenseRange(10, 18, 4);
BENCHMARK(BM_NormSquared<false>)->Name("norm_squared/serial")->DenseRange(10, 18, 4);
BENCHMARK(BM_NormSquared<true>)->Name("norm_squared/parallel")->DenseRange(10, 18, 4);

BENCHMARK_MAIN();

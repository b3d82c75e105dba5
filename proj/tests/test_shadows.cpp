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

#include <cmath>
#include <filesystem>
#include <random>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "thermshadow/gibbs.hpp"
#include "thermshadow/models.hpp"
#include "thermshadow/shadows.hpp"

using namespace thermshadow;

namespace {

PauliString P(const char* w) { return PauliString::from_word(w); }

PauliSum sum_of(const char* w, double c = 1.0) {
    PauliSum o(static_cast<int>(PauliString::from_word(w).num_qubits()));
    o.add(c, P(w));
    return o;
}

ShadowRecord pauli_record(const char* bases, std::uint64_t outcome) {
    ShadowRecord rec;
    rec.kind = ShadowKind::Pauli;
    rec.n = static_cast<int>(std::string(bases).size());
    for (int q = 0; q < rec.n; ++q) {
        const char b = bases[q];
        if (b != 'Z') rec.basis_x |= std::uint64_t{1} << q;
        if (b != 'X') rec.basis_z |= std::uint64_t{1} << q;
    }
    rec.outcome = outcome;
    return rec;
}

}  // namespace

TEST(SampleOutcome, DeterministicBranch) {
    Rng rng(1);
    const CliffordTableau v = sample_clifford(3, rng);
    // V^dag |5>: prepare by undoing V on a basis state with the dense unitary.
    const CVector psi = tableau_to_dense(v).adjoint() * StateVector::basis(3, 5).amplitudes();
    const StateVector state = StateVector::from_amplitudes(3, psi);
    for (int i = 0; i < 20; ++i) EXPECT_EQ(collect_clifford(state, v, rng).outcome, 5u);
}

TEST(SampleOutcome, HadamardFrequencies) {
    CliffordTableau h = CliffordTableau::identity(1);
    h.prepend_h(0);
    Rng rng(2);
    int ones = 0;
    const int draws = 10000;
    for (int i = 0; i < draws; ++i) ones += static_cast<int>(collect_clifford(StateVector(1), h, rng).outcome);
    EXPECT_LT(std::abs(ones - draws / 2.0), 3.0 * std::sqrt(draws * 0.25));
    Rng a(3), b(3);
    EXPECT_EQ(collect_clifford(StateVector(1), h, a).outcome, collect_clifford(StateVector(1), h, b).outcome);
    EXPECT_THROW(sample_outcome(StateVector::from_amplitudes(1, CVector::Ones(2)), rng), std::invalid_argument);
}

TEST(EstimateClifford, Examples) {
    ShadowRecord rec;
    rec.kind = ShadowKind::Clifford;
    rec.n = 1;
    rec.outcome = 0;
    rec.unitary = CliffordTableau::identity(1);
    EXPECT_EQ(estimate_clifford(rec, P("Z")), 3.0);
    EXPECT_EQ(estimate_clifford(rec, P("I")), 1.0);
    EXPECT_EQ(estimate_clifford(rec, P("X")), 0.0);
    rec.n = 3;
    rec.outcome = 6;
    Rng rng(4);
    rec.unitary = sample_clifford(3, rng);
    EXPECT_EQ(estimate_clifford(rec, P("III")), 1.0);
}

TEST(EstimateClifford, ExactChannelInversionOverEnumeratedGroup) {
    std::mt19937_64 gen(5);
    const CVector psi = oracle::random_state(4, gen);
    const CMatrix rho = psi * psi.adjoint();
    const StateVector state = StateVector::from_amplitudes(2, psi);
    const auto group = enumerate_clifford_group(2);

    CMatrix avg = CMatrix::Zero(4, 4);
    std::vector<double> pauli_avg(16, 0.0);
    for (const auto& v : group) {
        const CMatrix u = tableau_to_dense(v);
        const CVector rotated = u * psi;
        for (std::uint64_t b = 0; b < 4; ++b) {
            const double w = std::norm(rotated[static_cast<Eigen::Index>(b)]);
            const CVector back = u.adjoint().col(static_cast<Eigen::Index>(b));
            avg += w * (5.0 * back * back.adjoint() - CMatrix::Identity(4, 4));
            ShadowRecord rec;
            rec.kind = ShadowKind::Clifford;
            rec.n = 2;
            rec.outcome = b;
            rec.unitary = v;
            for (int k = 0; k < 16; ++k) pauli_avg[static_cast<std::size_t>(k)] += w * estimate_clifford(rec, PauliString(2, k & 3, k >> 2));
        }
    }
    avg /= static_cast<double>(group.size());
    EXPECT_LE(max_abs_diff(avg, rho), 1e-10);
    for (int k = 0; k < 16; ++k) {
        const PauliString p(2, k & 3, k >> 2);
        EXPECT_NEAR(pauli_avg[static_cast<std::size_t>(k)] / static_cast<double>(group.size()), pauli_expectation(state, p), 1e-10);
    }
}

TEST(EstimatePauli, Examples) {
    EXPECT_EQ(estimate_pauli(pauli_record("Z", 0), P("Z")), 3.0);
    EXPECT_EQ(estimate_pauli(pauli_record("Z", 1), P("Z")), -3.0);
    EXPECT_EQ(estimate_pauli(pauli_record("X", 0), P("Z")), 0.0);
    EXPECT_EQ(estimate_pauli(pauli_record("X", 1), P("I")), 1.0);
    EXPECT_EQ(estimate_pauli(pauli_record("XYZ", 0b011), P("XIZ")), -9.0);
    EXPECT_EQ(estimate_pauli(pauli_record("XYZ", 0b011), P("YIZ")), 0.0);
}

TEST(EstimatePauli, ExactAverageOverBasesAndOutcomes) {
    std::mt19937_64 gen(6);
    const CVector psi = oracle::random_state(8, gen);
    const StateVector state = StateVector::from_amplitudes(3, psi);
    const char letters[3] = {'X', 'Y', 'Z'};
    for (const char* w : {"XIZ", "YYI", "ZXY", "IIX"}) {
        double avg = 0.0;
        for (int code = 0; code < 27; ++code) {
            std::vector<Basis> bases;
            for (int q = 0, c = code; q < 3; ++q, c /= 3) bases.push_back(static_cast<Basis>(c % 3));
            std::string bw;
            for (auto b : bases) bw += letters[static_cast<int>(b)];
            // Outcome distribution after rotating each qubit into its basis.
            StateVector rotated = state;
            for (int q = 0; q < 3; ++q) {
                const int t[1] = {q};
                if (bases[static_cast<std::size_t>(q)] == Basis::X) apply_gate_inplace(rotated, gates::h(), t);
                if (bases[static_cast<std::size_t>(q)] == Basis::Y) {
                    apply_gate_inplace(rotated, gates::sdg(), t);
                    apply_gate_inplace(rotated, gates::h(), t);
                }
            }
            for (std::uint64_t b = 0; b < 8; ++b)
                avg += std::norm(rotated[b]) * estimate_pauli(pauli_record(bw.c_str(), b), P(w)) / 27.0;
        }
        EXPECT_NEAR(avg, pauli_expectation(state, P(w)), 1e-12) << w;
    }
}

TEST(CollectShadows, IndependentOfThreadCountAndOrder) {
    const StatePreparer prep = [](std::size_t, Rng&) { return StateVector(4); };
    const auto all = collect_shadows(ShadowKind::Clifford, 4, 40, 77, prep);
    const auto tail = collect_shadows(ShadowKind::Clifford, 4, 20, 77, prep, 20);
    for (std::size_t i = 0; i < 20; ++i) {
        EXPECT_EQ(all[20 + i].outcome, tail[i].outcome);
        EXPECT_EQ(all[20 + i].unitary, tail[i].unitary);
        EXPECT_EQ(all[20 + i].unitary_key, tail[i].unitary_key);
    }
    const auto p1 = collect_shadows(ShadowKind::Pauli, 4, 40, 77, prep);
    const auto p2 = collect_shadows(ShadowKind::Pauli, 4, 40, 77, prep);
    for (std::size_t i = 0; i < 40; ++i) EXPECT_EQ(format_shadow_record(p1[i]), format_shadow_record(p2[i]));
}

TEST(MedianOfMeans, Examples) {
    const std::vector<double> v = {1, 1, 1, 100, 1};
    EXPECT_EQ(median_of_means(v, 1, 5), 1.0);
    EXPECT_DOUBLE_EQ(median_of_means(v, 5, 1), 104.0 / 5.0);
    EXPECT_DOUBLE_EQ(median_of_means(std::vector<double>{1, 2, 3, 4, 5, 6}, 3, 1), 2.0);
    const std::vector<double> c(30, 0.375);
    EXPECT_EQ(median_of_means(c, 5, 6), 0.375);
    EXPECT_DOUBLE_EQ(median_of_means(std::vector<double>{1, 3, 10, 20}, 1, 4), 6.5);
    EXPECT_THROW(median_of_means(v, 3, 2), std::invalid_argument);
    EXPECT_THROW(median_of_means(v, 0, 2), std::invalid_argument);
}

TEST(MedianOfMeans, PauliBatchMatchesScalarPath) {
    std::mt19937_64 gen(8);
    const CVector psi = oracle::random_state(16, gen);
    const StatePreparer prep = [&](std::size_t, Rng&) { return StateVector::from_amplitudes(4, psi); };
    const auto recs = collect_shadows(ShadowKind::Pauli, 4, 60, 9, prep);
    const auto obs = local_paulis_up_to_two(4);
    const auto batch = median_of_means_pauli(recs, obs, 12, 5);
    for (std::size_t k = 0; k < obs.size(); ++k) {
        std::vector<double> vals;
        for (const auto& r : recs) vals.push_back(estimate_pauli(r, obs[k]));
        EXPECT_NEAR(batch[k], median_of_means(vals, 12, 5), 1e-12);
    }
}

TEST(PlanShadows, Examples) {
    const EstimatorPlan a = plan_shadows(1.0, 1.0, 1, 1.0);
    EXPECT_EQ(a.N, 6u);
    EXPECT_EQ(a.K, 1u);
    const EstimatorPlan b = plan_shadows(0.1, 0.01, 435, 3.0);
    EXPECT_EQ(b.N, 1800u);
    EXPECT_EQ(b.K, 49u);
    EXPECT_EQ(b.total(), 88200u);
    std::size_t previous = 0;
    for (std::size_t m = 1; m <= 4096; m *= 2) {
        const std::size_t k = plan_shadows(0.1, 0.01, m, 1.0).K;
        EXPECT_GE(k, previous);
        if (previous) EXPECT_LE(k - previous, 4u);
        previous = k;
    }
    EXPECT_THROW(plan_shadows(0.0, 0.1, 1, 1.0), std::invalid_argument);
}

TEST(MseBound, Examples) {
    const GibbsSnapshot mixed = gibbs(build_xxz(3, 0.0, 1.0), 0.0);
    const MseBound p1 = mse_bound(sum_of("ZII"), mixed, ShadowKind::Pauli);
    EXPECT_NEAR(p1.value, 3.0, 1e-12);
    EXPECT_FALSE(p1.is_bound);
    const MseBound c1 = mse_bound(sum_of("ZII"), mixed, ShadowKind::Clifford);
    EXPECT_NEAR(c1.value, 8.0 + 2.0, 1e-12);

    const GibbsSnapshot g = gibbs(build_xxz(4, 0.5, 0.75), 1.0);
    for (const auto& p : local_paulis_up_to_two(4)) {
        if (p.weight() != 2) continue;
        PauliSum o(4);
        o.add(1.0, p);
        EXPECT_LE(mse_bound(o, g, ShadowKind::Pauli).value, 9.0);
    }
    PauliSum two(4);
    two.add(0.5, P("ZZII"));
    two.add(0.5, P("XIII"));
    EXPECT_TRUE(mse_bound(two, g, ShadowKind::Pauli).is_bound);
}

TEST(ShadowLog, RoundTrip) {
    const StatePreparer prep = [](std::size_t, Rng&) { return StateVector(3); };
    auto recs = collect_shadows(ShadowKind::Clifford, 3, 5, 1, prep);
    const auto paulis = collect_shadows(ShadowKind::Pauli, 3, 5, 1, prep);
    recs.insert(recs.end(), paulis.begin(), paulis.end());
    ShadowRecord explicit_v = recs[0];
    explicit_v.unitary_key.reset();
    recs.push_back(explicit_v);

    const auto path = (std::filesystem::temp_directory_path() / "thermshadow_shadow_log.txt").string();
    std::filesystem::remove(path);
    {
        ShadowLogWriter w(path);
        w.append(std::span<const ShadowRecord>(recs.data(), 4));
    }
    {
        ShadowLogWriter w(path);
        w.append(std::span<const ShadowRecord>(recs.data() + 4, recs.size() - 4));
    }
    const auto back = read_shadow_log(path);
    ASSERT_EQ(back.size(), recs.size());
    for (std::size_t i = 0; i < recs.size(); ++i) {
        EXPECT_EQ(back[i].kind, recs[i].kind);
        EXPECT_EQ(back[i].outcome, recs[i].outcome);
        EXPECT_EQ(back[i].basis_x, recs[i].basis_x);
        EXPECT_EQ(back[i].basis_z, recs[i].basis_z);
        EXPECT_EQ(back[i].unitary, recs[i].unitary);
        EXPECT_EQ(format_shadow_record(back[i]), format_shadow_record(recs[i]));
    }
    std::filesystem::remove(path);
    EXPECT_THROW(parse_shadow_record("Q 010"), std::invalid_argument);
}

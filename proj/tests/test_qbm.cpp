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

#include <bit>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "thermshadow/models.hpp"
#include "thermshadow/qbm.hpp"

using namespace thermshadow;

namespace {

std::vector<double> random_theta(int n, std::mt19937_64& gen, double scale) {
    std::uniform_real_distribution<double> u(-scale, scale);
    std::vector<double> t(qbm_parameter_count(n));
    for (auto& v : t) v = u(gen);
    return t;
}

DensityOperator random_density(int n, std::mt19937_64& gen) {
    const Eigen::Index d = Eigen::Index{1} << n;
    std::normal_distribution<double> g;
    CMatrix a(d, d);
    for (Eigen::Index i = 0; i < d; ++i)
        for (Eigen::Index j = 0; j < d; ++j) a(i, j) = cplx(g(gen), g(gen));
    CMatrix rho = a * a.adjoint();
    rho /= rho.trace().real();
    return {n, rho};
}

}  // namespace

TEST(RelativeEntropy, VanishesAtTheModel) {
    std::mt19937_64 gen(1);
    const auto theta = random_theta(3, gen, 0.5);
    const TargetState t = TargetState::from_gibbs(build_qbm(3, theta), 1.0);
    EXPECT_NEAR(relative_entropy(t, theta), 0.0, 1e-10);
}

TEST(RelativeEntropy, TwoLevelClosedForm) {
    const double gamma = 0.7;
    const TargetState t = TargetState::from_pure(StateVector(1));
    const std::vector<double> theta = {0.0, 0.0, gamma};
    const double expect = -std::log(std::exp(-gamma) / (std::exp(gamma) + std::exp(-gamma)));
    EXPECT_NEAR(relative_entropy(t, theta), expect, 1e-10);

    // Dense log oracle: S = -<0| log rho |0>.
    const CMatrix h = gamma * PauliString::from_word("Z").to_dense();
    CMatrix rho = oracle::expm_series(-h);
    rho /= rho.trace().real();
    const CMatrix log_rho = mat_func(rho, [](double x) { return std::log(x); });
    EXPECT_NEAR(relative_entropy(t, theta), -log_rho(0, 0).real(), 1e-10);
}

TEST(RelativeEntropy, NonNegative) {
    std::mt19937_64 gen(2);
    for (int trial = 0; trial < 100; ++trial) {
        const int n = 1 + trial % 4;
        const TargetState t = TargetState::from_density(random_density(n, gen));
        EXPECT_GE(relative_entropy(t, random_theta(n, gen, 1.0)), -1e-12);
    }
}

TEST(Gradient, VanishesAtTheModel) {
    std::mt19937_64 gen(3);
    const auto theta = random_theta(3, gen, 0.5);
    const TargetState t = TargetState::from_gibbs(build_qbm(3, theta), 1.0);
    for (double g : gradient(t, theta, {})) EXPECT_NEAR(g, 0.0, 1e-10);
}

TEST(Gradient, ExactMatchesCentralDifferences) {
    std::mt19937_64 gen(4);
    for (int n = 2; n <= 4; ++n) {
        const TargetState t = TargetState::from_density(random_density(n, gen));
        const auto theta = random_theta(n, gen, 0.3);
        const auto g = gradient(t, theta, {});
        const auto s = [&](const std::vector<double>& x) { return relative_entropy(t, x); };
        double gap = 0.0;
        for (std::size_t k = 0; k < theta.size(); ++k) gap = std::max(gap, std::abs(g[k] - oracle::central_difference(s, theta, k, 1e-5)));
        EXPECT_LE(gap, 1e-6) << n;
    }
}

TEST(Gradient, StochasticBackendsTrackExact) {
    std::mt19937_64 gen(5);
    const TargetState t = TargetState::from_gibbs(build_xxz(3, 0.5, 0.75), 1.0);
    const auto theta = random_theta(3, gen, 0.3);
    const auto exact = gradient(t, theta, {});

    GradientBackend shadows;
    shadows.kind = GradientBackendKind::Shadows;
    shadows.shadow_count = 5000;
    const auto gs = gradient(t, theta, shadows, 11);
    EXPECT_EQ(gs, gradient(t, theta, shadows, 11));

    GradientBackend tpq;
    tpq.kind = GradientBackendKind::Tpq;
    tpq.tpq_states = 400;
    tpq.prep = TpqBackend::Exact;
    const auto gt = gradient(t, theta, tpq, 12);
    for (std::size_t k = 0; k < exact.size(); ++k) {
        EXPECT_NEAR(gs[k], exact[k], 0.5) << k;
        EXPECT_NEAR(gt[k], exact[k], 0.2) << k;
    }
}

TEST(Gradient, RejectsBadBackendSettings) {
    const TargetState t = TargetState::from_pure(StateVector(2));
    const std::vector<double> theta(qbm_parameter_count(2), 0.0);
    GradientBackend b;
    b.kind = GradientBackendKind::Shadows;
    b.shadow_count = 0;
    EXPECT_THROW(gradient(t, theta, b), std::invalid_argument);
    b.kind = GradientBackendKind::Tpq;
    b.tpq_states = 0;
    EXPECT_THROW(gradient(t, theta, b), std::invalid_argument);
    EXPECT_THROW(gradient(t, std::vector<double>(3), {}), std::invalid_argument);
}

TEST(EncodeClassical, UniformAndDelta) {
    const std::vector<double> uniform(8, 1.0 / 8.0);
    const TargetState u = encode_classical(uniform, 3);
    const CVector plus = CVector::Constant(8, 1.0 / std::sqrt(8.0));
    EXPECT_LE(max_abs_diff(u.eta().mat, plus * plus.adjoint()), 1e-14);
    EXPECT_NEAR(u.neg_entropy(), 0.0, 1e-12);

    std::vector<double> delta(8, 0.0);
    delta[5] = 1.0;
    const TargetState d = encode_classical(delta, 3);
    EXPECT_NEAR(d.eta().mat(5, 5).real(), 1.0, 1e-15);
    EXPECT_NEAR(d.eta().mat.cwiseAbs().sum(), 1.0, 1e-15);
}

TEST(EncodeClassical, ZMomentsAndRenormalization) {
    std::mt19937_64 gen(6);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<double> q(16);
    for (auto& v : q) v = u(gen);
    bool renorm = false;
    const TargetState t = encode_classical(q, 4, &renorm);
    EXPECT_TRUE(renorm);
    double total = 0.0;
    for (double v : q) total += v;
    const auto ops = qbm_operators(4);
    const auto& expect = t.operator_expectations();
    for (int i = 0; i < 4; ++i) {
        double m = 0.0;
        for (std::uint64_t s = 0; s < 16; ++s) m += q[s] / total * (((s >> i) & 1) ? -1.0 : 1.0);
        // Z fields sit at the end of the operator list.
        EXPECT_NEAR(expect[ops.size() - 4 + static_cast<std::size_t>(i)], m, 1e-12);
    }
    EXPECT_THROW(encode_classical(std::vector<double>(16, 0.0), 4), std::invalid_argument);
    EXPECT_THROW(encode_classical(std::vector<double>(15, 0.1), 4), std::invalid_argument);
    q[3] = -0.1;
    EXPECT_THROW(encode_classical(q, 4), std::invalid_argument);
}

TEST(EncodeClassical, SampleFileDiagonalMatchesFrequencies) {
    const auto samples = sample_sparse_distribution(6, 5, 1000, 42);
    const auto path = (std::filesystem::temp_directory_path() / "thermshadow_samples.csv").string();
    {
        std::ofstream f(path);
        for (std::size_t i = 0; i < samples.size(); ++i) {
            std::string s = format_bitstring(samples[i], 6);
            if (i % 2) {
                std::string commas;
                for (char c : s) commas += std::string(commas.empty() ? "" : ",") + c;
                s = commas;
            }
            f << s << "\n";
        }
    }
    int n = 0;
    const auto back = read_bitstring_samples(path, n);
    std::filesystem::remove(path);
    EXPECT_EQ(n, 6);
    EXPECT_EQ(back, samples);
    const auto q = empirical_distribution(back, n);
    const TargetState t = encode_classical(q, n);
    for (std::size_t s = 0; s < q.size(); ++s) EXPECT_NEAR(t.eta().mat(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(s)).real(), q[s], 1e-12);
}

TEST(SparseDistribution, SupportIsWellSeparated) {
    const auto samples = sample_sparse_distribution(8, 6, 2000, 7);
    EXPECT_EQ(samples, sample_sparse_distribution(8, 6, 2000, 7));
    const auto q = empirical_distribution(samples, 8);
    std::vector<std::uint64_t> support;
    for (std::size_t s = 0; s < q.size(); ++s)
        if (q[s] > 0) support.push_back(s);
    EXPECT_LE(support.size(), 6u);
    EXPECT_GE(support.size(), 5u);
    for (std::size_t i = 0; i < support.size(); ++i)
        for (std::size_t j = i + 1; j < support.size(); ++j) EXPECT_GE(std::popcount(support[i] ^ support[j]), 3);
}

TEST(Metrics, ModelDistributionAndTotalVariation) {
    std::mt19937_64 gen(8);
    const auto theta = random_theta(3, gen, 0.5);
    const auto p = model_distribution(3, theta);
    double total = 0.0;
    for (double v : p) total += v;
    EXPECT_NEAR(total, 1.0, 1e-12);
    const CMatrix rho = gibbs(build_qbm(3, theta), 1.0).rho.mat;
    for (std::size_t s = 0; s < 8; ++s) EXPECT_NEAR(p[s], rho(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(s)).real(), 1e-12);

    EXPECT_EQ(total_variation(std::vector<double>{0.5, 0.5}, std::vector<double>{1.0, 0.0}), 0.5);
    EXPECT_EQ(total_variation(p, p), 0.0);

    const TargetState t = TargetState::from_gibbs(build_qbm(3, theta), 1.0);
    const LocalErrors e = local_errors(t, theta);
    EXPECT_LE(e.eps_max, 1e-10);
    EXPECT_EQ(t.local_expectations().size(), local_paulis_up_to_two(3).size());
}

TEST(InitialTheta, RangeAndDeterminism) {
    const auto a = initial_theta(4, 9);
    EXPECT_EQ(a, initial_theta(4, 9));
    EXPECT_NE(a, initial_theta(4, 10));
    EXPECT_EQ(a.size(), qbm_parameter_count(4));
    for (double v : a) EXPECT_LE(std::abs(v), 0.1);
}

TEST(BackendNames, RoundTrip) {
    for (auto k : {GradientBackendKind::Exact, GradientBackendKind::Tpq, GradientBackendKind::Shadows})
        EXPECT_EQ(parse_backend_name(backend_name(k)), k);
    EXPECT_THROW(parse_backend_name("adam"), std::invalid_argument);
}

TEST(Train, ExactBackendDecreasesMonotonically) {
    const TargetState t = TargetState::from_gibbs(build_xxz(4, 0.5, 0.75), 1.0);
    TrainOptions opt;
    opt.steps = 60;
    opt.lr = 0.1;
    std::size_t observed = 0;
    const TrainState s = train(t, initial_theta(4, 1), {}, opt, [&](const TrainRecord&) { ++observed; });
    ASSERT_EQ(s.history.size(), 61u);
    EXPECT_EQ(observed, 61u);
    EXPECT_EQ(s.step, 60u);
    for (std::size_t i = 1; i < s.history.size(); ++i) {
        EXPECT_LT(s.history[i].S, s.history[i - 1].S);
        EXPECT_EQ(s.history[i].step, i);
    }
    EXPECT_LT(s.history.back().eps_max, s.history.front().eps_max);
}

TEST(Train, GradientToleranceStopsEarly) {
    std::mt19937_64 gen(10);
    const auto theta = random_theta(2, gen, 0.4);
    const TargetState t = TargetState::from_gibbs(build_qbm(2, theta), 1.0);
    TrainOptions opt;
    opt.steps = 5000;
    opt.lr = 0.5;
    opt.grad_tol = 1e-6;
    const TrainState s = train(t, initial_theta(2, 3), {}, opt);
    EXPECT_TRUE(s.converged);
    EXPECT_LT(s.step, 5000u);
    double gmax = 0.0;
    for (double g : gradient(t, s.theta, {})) gmax = std::max(gmax, std::abs(g));
    EXPECT_LE(gmax, 10.0 * opt.lr * opt.grad_tol);
}

TEST(Train, DivergenceGuardAborts) {
    const TargetState t = TargetState::from_gibbs(build_xxz(3, 0.5, 0.75), 1.0);
    TrainOptions opt;
    opt.steps = 50;
    opt.lr = 40.0;
    opt.divergence_patience = 2;
    EXPECT_THROW(train(t, initial_theta(3, 2), {}, opt), DivergenceError);
    opt.lr = 0.0;
    EXPECT_THROW(train(t, initial_theta(3, 2), {}, opt), std::invalid_argument);
}

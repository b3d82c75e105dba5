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

#include "thermshadow/models.hpp"

#include <stdexcept>
#include <string>

#include "thermshadow/linalg.hpp"
#include "thermshadow/rng.hpp"

namespace thermshadow {

PauliSum build_xxz(int n, double J, double Delta, Boundary boundary) {
    if (n < 2) throw std::invalid_argument("XXZ chain needs n >= 2");
    if (n > PauliString::kMaxQubits) throw std::invalid_argument("XXZ chain too long");
    PauliSum h(n);
    const int bonds = (boundary == Boundary::Closed && n > 2) ? n : n - 1;
    for (int b = 0; b < bonds; ++b) {
        const int i = b;
        const int j = (b + 1) % n;
        h.add(J, PauliString::single(n, i, 'X') * PauliString::single(n, j, 'X'));
        h.add(J, PauliString::single(n, i, 'Y') * PauliString::single(n, j, 'Y'));
        h.add(Delta, PauliString::single(n, i, 'Z') * PauliString::single(n, j, 'Z'));
    }
    h.canonicalize();
    return h;
}

std::size_t qbm_parameter_count(int n) {
    const auto un = static_cast<std::size_t>(n);
    return 3 * (un * (un - 1) / 2) + 3 * un;
}

std::vector<PauliString> qbm_operators(int n) {
    if (n < 1) throw std::invalid_argument("QBM needs n >= 1");
    std::vector<PauliString> ops;
    ops.reserve(qbm_parameter_count(n));
    for (char a : {'X', 'Y', 'Z'})
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) ops.push_back(PauliString::single(n, i, a) * PauliString::single(n, j, a));
    for (char a : {'X', 'Y', 'Z'})
        for (int i = 0; i < n; ++i) ops.push_back(PauliString::single(n, i, a));
    return ops;
}

PauliSum build_qbm(int n, std::span<const double> theta) {
    if (theta.size() != qbm_parameter_count(n)) {
        throw std::invalid_argument("QBM parameter vector has length " + std::to_string(theta.size()) + ", expected " +
                                    std::to_string(qbm_parameter_count(n)));
    }
    const auto ops = qbm_operators(n);
    PauliSum h(n);
    for (std::size_t k = 0; k < ops.size(); ++k) h.add(theta[k], ops[k]);
    h.canonicalize();
    return h;
}

PauliSum build_random_xyz(int n, std::uint64_t seed) {
    if (n < 2) throw std::invalid_argument("random XYZ model needs n >= 2");
    Rng rng(derive_key(seed, static_cast<std::uint64_t>(n)));
    std::vector<double> theta(qbm_parameter_count(n));
    for (double& t : theta) t = rng.uniform(-1.0, 1.0);
    return build_qbm(n, theta);
}

SpectralWindow spectral_window(const PauliSum& h, WindowMode mode) {
    if (h.empty()) throw std::invalid_argument("spectral window of an empty Hamiltonian");
    if (mode == WindowMode::Exact) {
        const HermitianEig e = eig_hermitian(h.to_dense());
        return {e.eigenvalues[0], e.eigenvalues[e.eigenvalues.size() - 1], true};
    }
    const double a = h.one_norm();
    return {-a, a, false};
}

RescaledHamiltonian rescale(const PauliSum& h, const SpectralWindow& w, double beta) {
    if (!(w.lambda_max > w.lambda_min)) throw std::invalid_argument("degenerate spectral window");
    if (!(beta >= 0.0)) throw std::invalid_argument("beta must be nonnegative");
    const double span = w.span();
    PauliSum ht(h.num_qubits());
    ht.add(-w.lambda_min / span, PauliString(h.num_qubits()));
    for (const auto& t : h.terms()) ht.add(t.coeff / span, t.pauli);
    ht.canonicalize();
    return {std::move(ht), beta * span / 2.0, w, beta};
}

}  // namespace thermshadow

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

#include "thermshadow/clifford.hpp"

#include <bit>
#include <deque>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <unordered_set>

#include "thermshadow/kernels.hpp"

namespace thermshadow {

namespace {

struct KeyHash {
    std::size_t operator()(const std::vector<std::uint64_t>& k) const noexcept {
        std::uint64_t h = 0x84222325cbf29ce4ULL;
        for (std::uint64_t v : k) h = splitmix64(h ^ v);
        return static_cast<std::size_t>(h);
    }
};

bool images_valid(int n, const std::vector<PauliString>& images) {
    if (images.size() != static_cast<std::size_t>(2 * n)) return false;
    for (const auto& p : images) {
        if (p.num_qubits() != n || !p.is_hermitian() || p.is_identity()) return false;
    }
    for (int a = 0; a < 2 * n; ++a) {
        for (int b = a + 1; b < 2 * n; ++b) {
            const bool should_anticommute = (b == a + n);
            const auto& pa = images[static_cast<std::size_t>(a)];
            const auto& pb = images[static_cast<std::size_t>(b)];
            if (pa.commutes(pb) == should_anticommute) return false;
        }
    }
    return true;
}

}  // namespace

CliffordTableau CliffordTableau::identity(int n) {
    if (n < 1 || n > PauliString::kMaxQubits) throw std::invalid_argument("tableau size out of range");
    CliffordTableau t;
    t.n_ = n;
    t.images_.reserve(static_cast<std::size_t>(2 * n));
    for (int q = 0; q < n; ++q) t.images_.push_back(PauliString::single(n, q, 'X'));
    for (int q = 0; q < n; ++q) t.images_.push_back(PauliString::single(n, q, 'Z'));
    return t;
}

CliffordTableau CliffordTableau::from_images(std::vector<PauliString> x_images, std::vector<PauliString> z_images) {
    if (x_images.size() != z_images.size() || x_images.empty()) {
        throw std::invalid_argument("tableau needs n X images and n Z images");
    }
    CliffordTableau t;
    t.n_ = static_cast<int>(x_images.size());
    t.images_ = std::move(x_images);
    t.images_.insert(t.images_.end(), z_images.begin(), z_images.end());
    if (!t.is_valid()) throw std::invalid_argument("images violate the symplectic condition");
    return t;
}

bool CliffordTableau::is_valid() const { return n_ >= 1 && images_valid(n_, images_); }

void CliffordTableau::prepend_h(int q) {
    const std::uint64_t bit = std::uint64_t{1} << q;
    for (auto& p : images_) {
        std::uint64_t x = p.x_mask(), z = p.z_mask();
        int ph = p.phase();
        if ((x & z & bit) != 0) ph += 2;
        const bool xb = (x & bit) != 0, zb = (z & bit) != 0;
        x = (x & ~bit) | (zb ? bit : 0);
        z = (z & ~bit) | (xb ? bit : 0);
        p = PauliString(n_, x, z, ph);
    }
}

void CliffordTableau::prepend_s(int q) {
    const std::uint64_t bit = std::uint64_t{1} << q;
    for (auto& p : images_) {
        const std::uint64_t x = p.x_mask();
        std::uint64_t z = p.z_mask();
        int ph = p.phase();
        if ((x & z & bit) != 0) ph += 2;
        z ^= (x & bit);
        p = PauliString(n_, x, z, ph);
    }
}

void CliffordTableau::prepend_cx(int control, int target) {
    if (control == target) throw std::invalid_argument("CX control equals target");
    const std::uint64_t cb = std::uint64_t{1} << control;
    const std::uint64_t tb = std::uint64_t{1} << target;
    for (auto& p : images_) {
        std::uint64_t x = p.x_mask(), z = p.z_mask();
        const bool xc = x & cb, zc = z & cb, xt = x & tb, zt = z & tb;
        int ph = p.phase();
        if (xc && zt && (xt == zc)) ph += 2;
        if (xc) x ^= tb;
        if (zt) z ^= cb;
        p = PauliString(n_, x, z, ph);
    }
}

PauliString CliffordTableau::conjugate(const PauliString& p) const {
    if (p.num_qubits() != n_) throw std::invalid_argument("conjugate: qubit count mismatch");
    const std::uint64_t x = p.x_mask(), z = p.z_mask();
    PauliString out(n_, 0, 0, p.phase() + std::popcount(x & z));
    for (int q = 0; q < n_; ++q)
        if ((x >> q) & 1) out = out * x_image(q);
    for (int q = 0; q < n_; ++q)
        if ((z >> q) & 1) out = out * z_image(q);
    return out;
}

CliffordTableau compose(const CliffordTableau& outer, const CliffordTableau& inner) {
    if (outer.n_ != inner.n_) throw std::invalid_argument("compose: qubit count mismatch");
    CliffordTableau t;
    t.n_ = inner.n_;
    t.images_.reserve(inner.images_.size());
    for (const auto& img : inner.images_) t.images_.push_back(outer.conjugate(img));
    return t;
}

std::string CliffordTableau::serialize() const {
    std::string out;
    for (std::size_t k = 0; k < images_.size(); ++k) {
        if (k) out += ',';
        out += images_[k].sign() > 0 ? '+' : '-';
        out += images_[k].word();
    }
    return out;
}

CliffordTableau CliffordTableau::deserialize(std::string_view text) {
    std::vector<PauliString> images;
    while (!text.empty()) {
        const std::size_t comma = text.find(',');
        images.push_back(PauliString::from_word(text.substr(0, comma)));
        text = comma == std::string_view::npos ? std::string_view{} : text.substr(comma + 1);
    }
    if (images.empty() || images.size() % 2 != 0) throw std::invalid_argument("tableau text needs 2n words");
    const auto n = images.size() / 2;
    std::vector<PauliString> xs(images.begin(), images.begin() + static_cast<std::ptrdiff_t>(n));
    std::vector<PauliString> zs(images.begin() + static_cast<std::ptrdiff_t>(n), images.end());
    return from_images(std::move(xs), std::move(zs));
}

std::vector<std::uint64_t> CliffordTableau::key() const {
    std::vector<std::uint64_t> k;
    k.reserve(2 * images_.size() + 1);
    std::uint64_t signs = 0;
    for (std::size_t i = 0; i < images_.size(); ++i) {
        k.push_back(images_[i].x_mask());
        k.push_back(images_[i].z_mask());
        if (images_[i].phase() == 2) signs |= std::uint64_t{1} << (i % 64);
        if (i % 64 == 63) {
            k.push_back(signs);
            signs = 0;
        }
    }
    k.push_back(signs);
    return k;
}

int symplectic_product(std::uint64_t x1, std::uint64_t z1, std::uint64_t x2, std::uint64_t z2) {
    return (std::popcount(x1 & z2) + std::popcount(z1 & x2)) & 1;
}

namespace {

struct SymVec {
    std::uint64_t x = 0, z = 0;
    bool zero() const { return x == 0 && z == 0; }
    SymVec operator^(const SymVec& o) const { return {x ^ o.x, z ^ o.z}; }
};

int sym(const SymVec& a, const SymVec& b) { return symplectic_product(a.x, a.z, b.x, b.z); }

SymVec combine(const std::vector<SymVec>& basis, std::uint64_t coeffs) {
    SymVec v;
    for (std::size_t j = 0; j < basis.size(); ++j)
        if ((coeffs >> j) & 1) v = v ^ basis[j];
    return v;
}

/// Symplectic basis (a_0, b_0, a_1, b_1, ...) of the span of `vecs`, which must
/// be a nondegenerate subspace.
std::vector<SymVec> symplectic_gram_schmidt(std::vector<SymVec> vecs) {
    std::vector<SymVec> out;
    while (true) {
        std::erase_if(vecs, [](const SymVec& v) { return v.zero(); });
        if (vecs.empty()) break;
        const SymVec a = vecs.front();
        std::size_t partner = 0;
        for (std::size_t j = 1; j < vecs.size(); ++j) {
            if (sym(a, vecs[j])) {
                partner = j;
                break;
            }
        }
        if (partner == 0) throw std::logic_error("degenerate subspace in symplectic Gram-Schmidt");
        const SymVec b = vecs[partner];
        out.push_back(a);
        out.push_back(b);
        vecs.erase(vecs.begin() + static_cast<std::ptrdiff_t>(partner));
        vecs.erase(vecs.begin());
        for (auto& u : vecs) {
            SymVec r = u;
            if (sym(u, b)) r = r ^ a;
            if (sym(u, a)) r = r ^ b;
            u = r;
        }
    }
    return out;
}

}  // namespace

CliffordTableau sample_clifford(int n, Rng& rng) {
    if (n < 1 || n > 31) throw std::invalid_argument("sample_clifford: n out of range");
    std::vector<SymVec> basis;
    for (int q = 0; q < n; ++q) {
        basis.push_back({std::uint64_t{1} << q, 0});
        basis.push_back({0, std::uint64_t{1} << q});
    }
    std::vector<PauliString> xs, zs;
    for (int k = 0; k < n; ++k) {
        const int dim = static_cast<int>(basis.size());
        SymVec v;
        do {
            v = combine(basis, rng.bits(dim));
        } while (v.zero());
        SymVec w;
        do {
            w = combine(basis, rng.bits(dim));
        } while (!sym(v, w));
        xs.emplace_back(n, v.x, v.z);
        zs.emplace_back(n, w.x, w.z);
        for (auto& u : basis) {
            SymVec r = u;
            if (sym(u, w)) r = r ^ v;
            if (sym(u, v)) r = r ^ w;
            u = r;
        }
        basis = symplectic_gram_schmidt(std::move(basis));
    }
    const std::uint64_t signs = rng.bits(2 * n);
    for (int q = 0; q < n; ++q) {
        if ((signs >> q) & 1) xs[static_cast<std::size_t>(q)] = xs[static_cast<std::size_t>(q)].negated();
        if ((signs >> (n + q)) & 1) zs[static_cast<std::size_t>(q)] = zs[static_cast<std::size_t>(q)].negated();
    }
    return CliffordTableau::from_images(std::move(xs), std::move(zs));
}

std::uint64_t clifford_group_order(int n) {
    if (n < 1 || n > 5) throw std::invalid_argument("clifford_group_order: n must be in [1, 5]");
    std::uint64_t order = std::uint64_t{1} << (n * n + 2 * n);
    for (int j = 1; j <= n; ++j) order *= (std::uint64_t{1} << (2 * j)) - 1;
    return order;
}

GateList synthesize(const CliffordTableau& t) {
    if (!t.is_valid()) throw std::invalid_argument("synthesize: invalid tableau");
    const int n = t.num_qubits();
    CliffordTableau work = t;
    GateList reduce;
    auto h = [&](int q) {
        work.prepend_h(q);
        reduce.push_back({GateKind::H, q});
    };
    auto s = [&](int q) {
        work.prepend_s(q);
        reduce.push_back({GateKind::S, q});
    };
    auto cx = [&](int c, int tq) {
        work.prepend_cx(c, tq);
        reduce.push_back({GateKind::CX, c, tq});
    };

    for (int i = 0; i < n; ++i) {
        // img(X_i) -> X on its support, then collapse onto qubit i.
        {
            const PauliString& px = work.x_image(i);
            for (int k = i; k < n; ++k) {
                const char l = px.letter(k);
                if (l == 'Z') h(k);
                else if (l == 'Y') s(k);
            }
        }
        {
            const std::uint64_t sup = work.x_image(i).x_mask();
            const int pivot = std::countr_zero(sup);
            for (int k = pivot + 1; k < n; ++k)
                if ((sup >> k) & 1) cx(pivot, k);
            if (pivot != i) {
                cx(i, pivot);
                cx(pivot, i);
                cx(i, pivot);
            }
        }
        // img(Z_i): clear every qubit other than i.
        h(i);
        {
            const PauliString& pz = work.z_image(i);
            for (int k = i + 1; k < n; ++k) {
                const char l = pz.letter(k);
                if (l == 'Z') h(k);
                else if (l == 'Y') s(k);
            }
        }
        {
            const std::uint64_t sup = work.z_image(i).x_mask();
            for (int k = i + 1; k < n; ++k)
                if ((sup >> k) & 1) cx(i, k);
        }
        if (work.z_image(i).letter(i) == 'Y') s(i);
        h(i);
        if (work.x_image(i).sign() < 0) {
            s(i);
            s(i);
        }
        if (work.z_image(i).sign() < 0) {
            h(i);
            s(i);
            s(i);
            h(i);
        }
    }
    if (!(work == CliffordTableau::identity(n))) throw std::logic_error("synthesis did not reach the identity");

    GateList out;
    out.reserve(reduce.size());
    for (auto it = reduce.rbegin(); it != reduce.rend(); ++it) {
        Gate g = *it;
        if (g.kind == GateKind::S) g.kind = GateKind::Sdg;
        out.push_back(g);
    }
    return out;
}

void apply_gates(StateVector& state, const GateList& gates) {
    const auto amps = state.span();
    for (const Gate& g : gates) {
        switch (g.kind) {
            case GateKind::H: kernels::parallel::apply_h(amps, g.q0); break;
            case GateKind::S: kernels::parallel::apply_s(amps, g.q0); break;
            case GateKind::Sdg: kernels::parallel::apply_sdg(amps, g.q0); break;
            case GateKind::CX: kernels::parallel::apply_cx(amps, g.q0, g.q1); break;
        }
    }
}

CMatrix gates_to_dense(const GateList& gates, int n) {
    check_qubit_count(n);
    const Eigen::Index d = Eigen::Index{1} << n;
    CMatrix u(d, d);
    for (Eigen::Index j = 0; j < d; ++j) {
        StateVector col = StateVector::basis(n, static_cast<std::uint64_t>(j));
        apply_gates(col, gates);
        u.col(j) = col.amplitudes();
    }
    return u;
}

CliffordTableau gates_to_tableau(const GateList& gates, int n) {
    CliffordTableau t = CliffordTableau::identity(n);
    for (const Gate& g : gates) {
        switch (g.kind) {
            case GateKind::H: t.prepend_h(g.q0); break;
            case GateKind::S: t.prepend_s(g.q0); break;
            case GateKind::Sdg:
                for (int r = 0; r < 3; ++r) t.prepend_s(g.q0);
                break;
            case GateKind::CX: t.prepend_cx(g.q0, g.q1); break;
        }
    }
    return t;
}

CMatrix tableau_to_dense(const CliffordTableau& t) { return gates_to_dense(synthesize(t), t.num_qubits()); }

char basis_letter(Basis b) {
    switch (b) {
        case Basis::X: return 'X';
        case Basis::Y: return 'Y';
        default: return 'Z';
    }
}

std::vector<Basis> sample_pauli_basis(int n, Rng& rng) {
    if (n < 1) throw std::invalid_argument("sample_pauli_basis: n must be positive");
    std::vector<Basis> out(static_cast<std::size_t>(n));
    for (auto& b : out) b = static_cast<Basis>(rng.below(3));
    return out;
}

std::vector<CliffordTableau> enumerate_clifford_group(int n) {
    if (n < 1 || n > 2) throw std::invalid_argument("enumeration is limited to n <= 2");
    std::vector<CliffordTableau> group;
    std::unordered_set<std::vector<std::uint64_t>, KeyHash> seen;
    std::deque<std::size_t> frontier;
    group.push_back(CliffordTableau::identity(n));
    seen.insert(group.back().key());
    frontier.push_back(0);
    auto visit = [&](CliffordTableau t) {
        if (seen.insert(t.key()).second) {
            group.push_back(std::move(t));
            frontier.push_back(group.size() - 1);
        }
    };
    while (!frontier.empty()) {
        const std::size_t idx = frontier.front();
        frontier.pop_front();
        for (int q = 0; q < n; ++q) {
            CliffordTableau th = group[idx];
            th.prepend_h(q);
            visit(std::move(th));
            CliffordTableau ts = group[idx];
            ts.prepend_s(q);
            visit(std::move(ts));
        }
        for (int a = 0; a < n; ++a) {
            for (int b = 0; b < n; ++b) {
                if (a == b) continue;
                CliffordTableau tc = group[idx];
                tc.prepend_cx(a, b);
                visit(std::move(tc));
            }
        }
    }
    return group;
}

namespace {

std::string cache_header(int n, std::size_t count) {
    return "thermshadow-clifford-enum v1 n=" + std::to_string(n) + " count=" + std::to_string(count);
}

}  // namespace

void write_enumeration_cache(const std::string& path, int n, const std::vector<CliffordTableau>& group) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << cache_header(n, group.size()) << '\n';
    for (const auto& t : group) out << t.serialize() << '\n';
    if (!out) throw std::runtime_error("write failed for " + path);
}

std::vector<CliffordTableau> read_enumeration_cache(const std::string& path, int n) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::string line;
    std::getline(in, line);
    const std::uint64_t expected = clifford_group_order(n);
    if (line != cache_header(n, expected)) throw std::runtime_error("enumeration cache header mismatch in " + path);
    std::vector<CliffordTableau> group;
    group.reserve(expected);
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        group.push_back(CliffordTableau::deserialize(line));
        if (group.back().num_qubits() != n) throw std::runtime_error("enumeration cache entry has wrong size");
    }
    if (group.size() != expected) throw std::runtime_error("enumeration cache is truncated");
    return group;
}

std::vector<CliffordTableau> load_or_enumerate(const std::string& path, int n) {
    try {
        return read_enumeration_cache(path, n);
    } catch (const std::exception&) {
    }
    auto group = enumerate_clifford_group(n);
    try {
        write_enumeration_cache(path, n, group);
    } catch (const std::exception&) {
        // the cache is an optimization; an unwritable location is not an error
    }
    return group;
}

}  // namespace thermshadow

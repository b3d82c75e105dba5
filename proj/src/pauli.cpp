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

#include "thermshadow/pauli.hpp"

#include <bit>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

namespace thermshadow {

namespace {

std::uint64_t low_mask(int n) { return n >= 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << n) - 1; }

}  // namespace

PauliString::PauliString(int n) : PauliString(n, 0, 0, 0) {}

PauliString::PauliString(int n, std::uint64_t x, std::uint64_t z, int phase) : n_(n), x_(x), z_(z), phase_(phase & 3) {
    if (n < 0 || n > kMaxQubits) throw std::invalid_argument("Pauli string length out of range");
    if (((x | z) & ~low_mask(n)) != 0) throw std::invalid_argument("Pauli masks exceed the qubit count");
}

PauliString PauliString::from_word(std::string_view word) {
    int phase = 0;
    if (!word.empty() && (word[0] == '+' || word[0] == '-')) {
        if (word[0] == '-') phase = 2;
        word.remove_prefix(1);
    }
    if (!word.empty() && word[0] == 'i') {
        phase += 1;
        word.remove_prefix(1);
    }
    if (word.empty()) throw std::invalid_argument("empty Pauli word");
    if (word.size() > static_cast<std::size_t>(kMaxQubits)) throw std::invalid_argument("Pauli word too long");
    std::uint64_t x = 0, z = 0;
    for (std::size_t q = 0; q < word.size(); ++q) {
        const std::uint64_t bit = std::uint64_t{1} << q;
        switch (word[q]) {
            case 'I': break;
            case 'X': x |= bit; break;
            case 'Y': x |= bit; z |= bit; break;
            case 'Z': z |= bit; break;
            default: throw std::invalid_argument("bad Pauli letter '" + std::string(1, word[q]) + "'");
        }
    }
    return {static_cast<int>(word.size()), x, z, phase};
}

PauliString PauliString::single(int n, int q, char letter) {
    if (q < 0 || q >= n) throw std::invalid_argument("qubit index out of range");
    const std::uint64_t bit = std::uint64_t{1} << q;
    switch (letter) {
        case 'I': return PauliString(n);
        case 'X': return {n, bit, 0};
        case 'Y': return {n, bit, bit};
        case 'Z': return {n, 0, bit};
        default: throw std::invalid_argument("bad Pauli letter");
    }
}

int PauliString::sign() const {
    if (!is_hermitian()) throw std::logic_error("sign() of a non-Hermitian Pauli string");
    return phase_ == 0 ? 1 : -1;
}

char PauliString::letter(int q) const {
    const bool xb = (x_ >> q) & 1;
    const bool zb = (z_ >> q) & 1;
    return xb ? (zb ? 'Y' : 'X') : (zb ? 'Z' : 'I');
}

int PauliString::weight() const noexcept { return std::popcount(x_ | z_); }

std::string PauliString::word() const {
    std::string w(static_cast<std::size_t>(n_), 'I');
    for (int q = 0; q < n_; ++q) w[static_cast<std::size_t>(q)] = letter(q);
    return w;
}

std::string PauliString::str() const {
    static const char* prefix[4] = {"+", "+i", "-", "-i"};
    return prefix[phase_] + word();
}

bool PauliString::commutes(const PauliString& other) const {
    return ((std::popcount(x_ & other.z_) + std::popcount(z_ & other.x_)) & 1) == 0;
}

int pauli_product_phase(std::uint64_t x1, std::uint64_t z1, std::uint64_t x2, std::uint64_t z2) {
    // Per qubit, letter products XY = iZ, YZ = iX, ZX = iY and the reverses give -i.
    const std::uint64_t pos = (x1 & ~z1 & x2 & z2) | (x1 & z1 & ~x2 & z2) | (~x1 & z1 & x2 & ~z2);
    const std::uint64_t neg = (x1 & z1 & x2 & ~z2) | (x1 & ~z1 & ~x2 & z2) | (~x1 & z1 & x2 & z2);
    return (std::popcount(pos) - std::popcount(neg)) & 3;
}

PauliString operator*(const PauliString& a, const PauliString& b) {
    if (a.n_ != b.n_) throw std::invalid_argument("Pauli product: qubit count mismatch");
    const int ph = a.phase_ + b.phase_ + pauli_product_phase(a.x_, a.z_, b.x_, b.z_);
    return {a.n_, a.x_ ^ b.x_, a.z_ ^ b.z_, ph};
}

CMatrix PauliString::to_dense() const {
    if (n_ > thermshadow::kMaxQubits) throw std::invalid_argument("dense Pauli beyond the qubit cap");
    const std::size_t d = std::size_t{1} << n_;
    CMatrix m = CMatrix::Zero(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
    const cplx c = kernels::i_pow(phase_ + std::popcount(x_ & z_));
    for (std::size_t j = 0; j < d; ++j) {
        const double s = (std::popcount(z_ & j) & 1) ? -1.0 : 1.0;
        m(static_cast<Eigen::Index>(j ^ x_), static_cast<Eigen::Index>(j)) = c * s;
    }
    return m;
}

void PauliSum::add(double coeff, const PauliString& p) {
    if (!p.is_hermitian()) throw std::invalid_argument("PauliSum terms must be Hermitian");
    if (terms_.empty() && n_ == 0) n_ = p.num_qubits();
    if (p.num_qubits() != n_) throw std::invalid_argument("PauliSum: qubit count mismatch");
    terms_.push_back({coeff * p.sign(), p.with_phase(0)});
}

void PauliSum::canonicalize() {
    struct KeyHash {
        std::size_t operator()(const std::pair<std::uint64_t, std::uint64_t>& k) const noexcept {
            return std::hash<std::uint64_t>{}(k.first * 0x9e3779b97f4a7c15ULL ^ k.second);
        }
    };
    std::unordered_map<std::pair<std::uint64_t, std::uint64_t>, std::size_t, KeyHash> index;
    std::vector<PauliTermEntry> merged;
    for (const auto& t : terms_) {
        const auto key = std::make_pair(t.pauli.x_mask(), t.pauli.z_mask());
        auto it = index.find(key);
        if (it == index.end()) {
            index.emplace(key, merged.size());
            merged.push_back(t);
        } else {
            merged[it->second].coeff += t.coeff;
        }
    }
    terms_.clear();
    for (const auto& t : merged) {
        if (std::abs(t.coeff) >= kPruneTolerance) terms_.push_back(t);
    }
}

double PauliSum::one_norm() const {
    double s = 0.0;
    for (const auto& t : terms_) s += std::abs(t.coeff);
    return s;
}

int PauliSum::locality() const {
    int k = 0;
    for (const auto& t : terms_) k = std::max(k, t.pauli.weight());
    return k;
}

CMatrix PauliSum::to_dense() const {
    check_qubit_count(n_);
    const Eigen::Index d = Eigen::Index{1} << n_;
    CMatrix m = CMatrix::Zero(d, d);
    for (const auto& t : terms_) {
        const cplx c = kernels::i_pow(std::popcount(t.pauli.x_mask() & t.pauli.z_mask()));
        const std::uint64_t x = t.pauli.x_mask(), z = t.pauli.z_mask();
        for (Eigen::Index j = 0; j < d; ++j) {
            const auto uj = static_cast<std::uint64_t>(j);
            const double s = (std::popcount(z & uj) & 1) ? -1.0 : 1.0;
            m(static_cast<Eigen::Index>(uj ^ x), j) += t.coeff * s * c;
        }
    }
    return m;
}

std::vector<kernels::PauliTerm> PauliSum::kernel_terms() const {
    std::vector<kernels::PauliTerm> out;
    out.reserve(terms_.size());
    for (const auto& t : terms_) out.push_back(t.pauli.term(t.coeff));
    return out;
}

double PauliSum::expectation(const StateVector& psi) const {
    if (psi.num_qubits() != n_) throw std::invalid_argument("expectation: qubit count mismatch");
    double s = 0.0;
    for (const auto& t : terms_) s += t.coeff * kernels::parallel::pauli_expectation(psi.span(), t.pauli.term()).real();
    return s;
}

double PauliSum::expectation(const CMatrix& rho) const {
    const auto d = static_cast<std::size_t>(rho.rows());
    if (d != (std::size_t{1} << n_)) throw std::invalid_argument("expectation: dimension mismatch");
    double s = 0.0;
    for (const auto& t : terms_) {
        s += t.coeff * kernels::parallel::pauli_trace({rho.data(), d * d}, d, t.pauli.term()).real();
    }
    return s;
}

PauliSum PauliSum::scaled(double factor) const {
    PauliSum out(n_);
    for (const auto& t : terms_) out.add(t.coeff * factor, t.pauli);
    out.canonicalize();
    return out;
}

bool operator==(const PauliSum& a, const PauliSum& b) {
    if (a.n_ != b.n_ || a.terms_.size() != b.terms_.size()) return false;
    for (std::size_t k = 0; k < a.terms_.size(); ++k) {
        if (a.terms_[k].coeff != b.terms_[k].coeff || !(a.terms_[k].pauli == b.terms_[k].pauli)) return false;
    }
    return true;
}

void apply_pauli_sum(const PauliSum& h, const CVector& in, CVector& out) {
    const auto terms = h.kernel_terms();
    out.resize(in.size());
    kernels::parallel::apply_pauli_sum(terms, {in.data(), static_cast<std::size_t>(in.size())},
                                       {out.data(), static_cast<std::size_t>(out.size())});
}

namespace {

std::string shortest(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

}  // namespace

std::string format_hamiltonian(const PauliSum& h) {
    std::string out = "# qubits " + std::to_string(h.num_qubits()) + "\n";
    for (const auto& t : h.terms()) out += shortest(t.coeff) + " " + t.pauli.word() + "\n";
    return out;
}

PauliSum parse_hamiltonian(std::string_view text) {
    PauliSum h;
    int n = -1;
    int line_no = 0;
    auto fail = [&](const std::string& msg) {
        throw std::invalid_argument("hamiltonian line " + std::to_string(line_no) + ": " + msg);
    };
    while (!text.empty()) {
        ++line_no;
        const std::size_t nl = text.find('\n');
        std::string_view line = trim(text.substr(0, nl));
        text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
        if (line.empty()) continue;
        if (line[0] == '#') {
            std::string_view rest = trim(line.substr(1));
            if (rest.rfind("qubits", 0) == 0) {
                rest = trim(rest.substr(6));
                int q = 0;
                const auto r = std::from_chars(rest.data(), rest.data() + rest.size(), q);
                if (r.ec != std::errc{} || r.ptr != rest.data() + rest.size()) fail("bad qubit count");
                if (n >= 0 && n != q) fail("qubit count mismatch");
                n = q;
            }
            continue;
        }
        const std::size_t sp = line.find_first_of(" \t");
        if (sp == std::string_view::npos) fail("expected `coefficient word`");
        const std::string_view coeff_text = line.substr(0, sp);
        const std::string_view word = trim(line.substr(sp));
        double c = 0.0;
        const auto r = std::from_chars(coeff_text.data(), coeff_text.data() + coeff_text.size(), c);
        if (r.ec != std::errc{} || r.ptr != coeff_text.data() + coeff_text.size()) fail("bad coefficient");
        PauliString p;
        try {
            p = PauliString::from_word(word);
        } catch (const std::invalid_argument& e) {
            fail(e.what());
        }
        if (n >= 0 && p.num_qubits() != n) fail("word length does not match the qubit count");
        n = p.num_qubits();
        if (h.empty() && h.num_qubits() == 0) h = PauliSum(n);
        h.add(c, p);
    }
    if (n < 0) throw std::invalid_argument("hamiltonian text declares no qubits");
    if (h.num_qubits() == 0) h = PauliSum(n);
    return h;
}

PauliSum read_hamiltonian_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_hamiltonian(ss.str());
}

void write_hamiltonian_file(const std::string& path, const PauliSum& h) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << format_hamiltonian(h);
}

std::vector<PauliString> local_paulis_up_to_two(int n) {
    static constexpr char kLetters[3] = {'X', 'Y', 'Z'};
    std::vector<PauliString> out;
    out.reserve(static_cast<std::size_t>(3 * n + 9 * n * (n - 1) / 2));
    for (int q = 0; q < n; ++q)
        for (char a : kLetters) out.push_back(PauliString::single(n, q, a));
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            for (char a : kLetters)
                for (char b : kLetters) out.push_back(PauliString::single(n, i, a) * PauliString::single(n, j, b));
    return out;
}

std::vector<PauliString> ensemble_observables(int n) {
    static constexpr char kLetters[3] = {'X', 'Y', 'Z'};
    std::vector<PauliString> out;
    for (int q = 0; q < n; ++q)
        for (char a : kLetters) out.push_back(PauliString::single(n, q, a));
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            for (char a : kLetters) out.push_back(PauliString::single(n, i, a) * PauliString::single(n, j, a));
    return out;
}

}  // namespace thermshadow

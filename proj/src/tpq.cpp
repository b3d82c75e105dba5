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

#include "thermshadow/tpq.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "thermshadow/kernels.hpp"

namespace thermshadow {

StateVector stabilizer_state(const CliffordTableau& u) {
    StateVector s(u.num_qubits());
    apply_gates(s, synthesize(u));
    return s;
}

double ChebyshevPoly::operator()(double y) const {
    const double x = 2.0 * y - 1.0;
    double b1 = 0.0, b2 = 0.0;
    for (int k = degree; k >= 1; --k) {
        const double b0 = coeffs[static_cast<std::size_t>(k)] + 2.0 * x * b1 - b2;
        b2 = b1;
        b1 = b0;
    }
    return coeffs[0] + x * b1 - b2;
}

double measure_sup_error(const ChebyshevPoly& p, int grid_points) {
    if (grid_points < 2) throw std::invalid_argument("sup-error grid needs at least two points");
    double err = 0.0;
    for (int i = 0; i < grid_points; ++i) {
        const double y = static_cast<double>(i) / (grid_points - 1);
        err = std::max(err, std::abs(p(y) - std::exp(-p.tau * y)));
    }
    return err;
}

ChebyshevPoly chebyshev_fit(double tau, int degree) {
    if (degree < 1) throw std::invalid_argument("Chebyshev degree must be at least 1");
    if (!(tau >= 0.0) || !std::isfinite(tau)) throw std::invalid_argument("tau must be finite and nonnegative");
    const int nodes = 2 * (degree + 1);
    std::vector<double> fx(static_cast<std::size_t>(nodes));
    std::vector<double> theta(static_cast<std::size_t>(nodes));
    for (int j = 0; j < nodes; ++j) {
        theta[static_cast<std::size_t>(j)] = std::numbers::pi * (j + 0.5) / nodes;
        const double x = std::cos(theta[static_cast<std::size_t>(j)]);
        fx[static_cast<std::size_t>(j)] = std::exp(-tau * (x + 1.0) / 2.0);
    }
    std::vector<double> c(static_cast<std::size_t>(degree + 1));
    for (int k = 0; k <= degree; ++k) {
        double s = 0.0;
        for (int j = 0; j < nodes; ++j) {
            s += fx[static_cast<std::size_t>(j)] * std::cos(k * theta[static_cast<std::size_t>(j)]);
        }
        c[static_cast<std::size_t>(k)] = (k == 0 ? 1.0 : 2.0) * s / nodes;
    }
    return chebyshev_from_coefficients(tau, std::move(c));
}

ChebyshevPoly chebyshev_from_coefficients(double tau, std::vector<double> coeffs) {
    if (coeffs.empty()) throw std::invalid_argument("empty Chebyshev coefficient list");
    ChebyshevPoly p;
    p.degree = static_cast<int>(coeffs.size()) - 1;
    p.coeffs = std::move(coeffs);
    p.tau = tau;
    p.sup_error = measure_sup_error(p);
    return p;
}

namespace {

constexpr const char* kPolyHeader = "thermshadow-chebyshev v1";

std::string shortest(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

template <typename T>
T parse_number(std::string_view tok) {
    T v{};
    const auto r = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (r.ec != std::errc{} || r.ptr != tok.data() + tok.size()) {
        throw std::invalid_argument("bad number '" + std::string(tok) + "' in polynomial cache");
    }
    return v;
}

}  // namespace

std::string format_poly_cache(const std::vector<ChebyshevPoly>& polys) {
    std::string out = std::string(kPolyHeader) + "\n";
    for (const auto& p : polys) {
        out += shortest(p.tau) + " " + std::to_string(p.degree) + " " + shortest(p.sup_error);
        for (double c : p.coeffs) out += " " + shortest(c);
        out += "\n";
    }
    return out;
}

std::vector<ChebyshevPoly> parse_poly_cache(std::string_view text) {
    std::istringstream in{std::string(text)};
    std::string line;
    if (!std::getline(in, line) || line != kPolyHeader) throw std::invalid_argument("polynomial cache header mismatch");
    std::vector<ChebyshevPoly> out;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::vector<std::string> tok;
        for (std::string t; ls >> t;) tok.push_back(t);
        if (tok.size() < 4) throw std::invalid_argument("short polynomial cache record");
        ChebyshevPoly p;
        p.tau = parse_number<double>(tok[0]);
        p.degree = parse_number<int>(tok[1]);
        p.sup_error = parse_number<double>(tok[2]);
        if (p.degree < 0 || tok.size() != static_cast<std::size_t>(p.degree) + 4) {
            throw std::invalid_argument("polynomial cache record has the wrong coefficient count");
        }
        for (std::size_t k = 3; k < tok.size(); ++k) p.coeffs.push_back(parse_number<double>(tok[k]));
        out.push_back(std::move(p));
    }
    return out;
}

void write_poly_cache(const std::string& path, const std::vector<ChebyshevPoly>& polys) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << format_poly_cache(polys);
}

std::vector<ChebyshevPoly> read_poly_cache(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_poly_cache(ss.str());
}

ExactPropagator::ExactPropagator(const ThermalSpectrum& spectrum, double beta)
    : beta_(beta), lambda_min_(spectrum.lambda_min()) {
    if (!(beta >= 0.0)) throw std::invalid_argument("beta must be nonnegative");
    const double lmin = lambda_min_;
    op_ = spectrum.eig().apply([&](double l) { return std::exp(-beta * (l - lmin) / 2.0); });
}

StateVector ExactPropagator::propagate(const StateVector& initial, double* norm_sq) const {
    CVector v = op_ * initial.amplitudes();
    const double shifted = v.squaredNorm();
    if (!(shifted > 1e-300)) throw NumericalError("imaginary-time evolution annihilated the state");
    if (norm_sq) *norm_sq = shifted * std::exp(-beta_ * lambda_min_);
    v /= std::sqrt(shifted);
    return StateVector::from_amplitudes(initial.num_qubits(), std::move(v));
}

TpqState ExactPropagator::prepare(const CliffordTableau& u) const {
    TpqState t{StateVector(u.num_qubits()), beta_, TpqBackend::Exact, 0, u, 0.0};
    t.state = propagate(stabilizer_state(u), &t.norm_sq);
    return t;
}

TpqState prepare_exact(const PauliSum& h, double beta, const CliffordTableau& u) {
    if (h.num_qubits() != u.num_qubits()) throw std::invalid_argument("prepare_exact: qubit count mismatch");
    return ExactPropagator(ThermalSpectrum(h), beta).prepare(u);
}

namespace {

void check_tau(const ChebyshevPoly& poly, const RescaledHamiltonian& r) {
    if (std::abs(poly.tau - r.tau) > 1e-12 * std::max(1.0, r.tau)) {
        throw std::invalid_argument("polynomial tau " + std::to_string(poly.tau) +
                                    " does not match beta and window (tau " + std::to_string(r.tau) + ")");
    }
}

}  // namespace

PolynomialPropagator::PolynomialPropagator(const PauliSum& h, double beta, ChebyshevPoly poly,
                                           const SpectralWindow& window)
    : beta_(beta), poly_(std::move(poly)), rescaled_(rescale(h, window, beta)) {
    check_tau(poly_, rescaled_);
    terms_ = rescaled_.h_tilde.kernel_terms();
}

PolynomialPropagator::PolynomialPropagator(const ThermalSpectrum& spectrum, const PauliSum& h, double beta,
                                           ChebyshevPoly poly, const SpectralWindow& window)
    : PolynomialPropagator(h, beta, std::move(poly), window) {
    const double lo = window.lambda_min, span = window.span();
    const ChebyshevPoly& p = poly_;
    dense_ = spectrum.eig().apply([&](double l) { return p((l - lo) / span); });
}

CVector PolynomialPropagator::apply(const CVector& v) const {
    if (dense_) return *dense_ * v;
    const auto d = static_cast<std::size_t>(v.size());
    // T_k(A) v with A = 2 h_tilde - 1.
    auto apply_a = [&](const CVector& in, CVector& out) {
        kernels::parallel::apply_pauli_sum(terms_, {in.data(), d}, {out.data(), d});
        out = 2.0 * out - in;
    };
    CVector t_prev = v;
    CVector result = poly_.coeffs[0] * v;
    if (poly_.degree == 0) return result;
    CVector t_cur(v.size());
    apply_a(t_prev, t_cur);
    result += poly_.coeffs[1] * t_cur;
    CVector t_next(v.size());
    for (int k = 2; k <= poly_.degree; ++k) {
        apply_a(t_cur, t_next);
        t_next = 2.0 * t_next - t_prev;
        result += poly_.coeffs[static_cast<std::size_t>(k)] * t_next;
        std::swap(t_prev, t_cur);
        std::swap(t_cur, t_next);
    }
    return result;
}

StateVector PolynomialPropagator::propagate(const StateVector& initial, double* norm_sq) const {
    CVector v = apply(initial.amplitudes());
    const double nsq = v.squaredNorm();
    if (!(nsq > 1e-300)) throw NumericalError("polynomial evolution annihilated the state");
    if (norm_sq) *norm_sq = nsq;
    v /= std::sqrt(nsq);
    return StateVector::from_amplitudes(initial.num_qubits(), std::move(v));
}

TpqState PolynomialPropagator::prepare(const CliffordTableau& u) const {
    TpqState t{StateVector(u.num_qubits()), beta_, TpqBackend::Polynomial, poly_.degree, u, 0.0};
    t.state = propagate(stabilizer_state(u), &t.norm_sq);
    return t;
}

TpqState prepare_poly(const PauliSum& h, double beta, const CliffordTableau& u, const ChebyshevPoly& poly,
                      const SpectralWindow& window) {
    if (h.num_qubits() != u.num_qubits()) throw std::invalid_argument("prepare_poly: qubit count mismatch");
    return PolynomialPropagator(h, beta, poly, window).prepare(u);
}

CMatrix BlockEncoding::top_left_block() const {
    const Eigen::Index d = Eigen::Index{1} << n;
    return W.topLeftCorner(d, d);
}

BlockEncoding build_lcu(const PauliSum& h) {
    if (h.empty()) throw std::invalid_argument("build_lcu: empty Hamiltonian");
    const std::size_t K = h.size();
    int m = 0;
    while ((std::size_t{1} << m) < K) ++m;
    const int n = h.num_qubits();
    if (n + m > kMaxQubits) throw std::invalid_argument("block encoding exceeds the dense qubit cap");
    for (const auto& t : h.terms()) {
        if (t.coeff == 0.0) throw std::invalid_argument("build_lcu: zero coefficient");
    }
    const double a = h.one_norm();
    const Eigen::Index ds = Eigen::Index{1} << n;
    const Eigen::Index da = Eigen::Index{1} << m;

    // A: reflection on the ancilla mapping |0> to sum_k sqrt(|a_k| / a) |k>.
    Eigen::VectorXd alpha = Eigen::VectorXd::Zero(da);
    for (std::size_t k = 0; k < K; ++k) alpha[static_cast<Eigen::Index>(k)] = std::sqrt(std::abs(h.terms()[k].coeff) / a);
    Eigen::VectorXd u = -alpha;
    u[0] += 1.0;
    CMatrix A_anc = CMatrix::Identity(da, da);
    if (u.squaredNorm() > 1e-30) A_anc -= (2.0 / u.squaredNorm()) * (u * u.transpose()).cast<cplx>();

    CMatrix A = CMatrix::Zero(da * ds, da * ds);
    for (Eigen::Index i = 0; i < da; ++i)
        for (Eigen::Index j = 0; j < da; ++j)
            if (A_anc(i, j) != cplx(0.0)) A.block(i * ds, j * ds, ds, ds).diagonal().setConstant(A_anc(i, j));

    CMatrix B = CMatrix::Identity(da * ds, da * ds);
    for (std::size_t k = 0; k < K; ++k) {
        const auto& t = h.terms()[k];
        const double sgn = t.coeff > 0 ? 1.0 : -1.0;
        const Eigen::Index off = static_cast<Eigen::Index>(k) * ds;
        B.block(off, off, ds, ds) = sgn * t.pauli.to_dense();
    }
    BlockEncoding be;
    be.n = n;
    be.m = m;
    be.a = a;
    be.W = A.adjoint() * B * A;
    return be;
}

Eigen::Matrix2cd qubitized_block(const BlockEncoding& be, const CVector& eigenvector, double lambda) {
    const Eigen::Index ds = Eigen::Index{1} << be.n;
    if (eigenvector.size() != ds) throw std::invalid_argument("qubitized_block: eigenvector has the wrong length");
    const double s2 = 1.0 - lambda * lambda;
    if (!(s2 > 1e-8)) throw std::invalid_argument("qubitized_block: |lambda| too close to 1");
    CVector b0 = CVector::Zero(be.W.rows());
    b0.head(ds) = eigenvector.normalized();
    CVector b1 = (be.W * b0 - lambda * b0) / std::sqrt(s2);
    const CVector wb0 = be.W * b0;
    const CVector wb1 = be.W * b1;
    Eigen::Matrix2cd m;
    m(0, 0) = b0.dot(wb0);
    m(0, 1) = b0.dot(wb1);
    m(1, 0) = b1.dot(wb0);
    m(1, 1) = b1.dot(wb1);
    return m;
}

double success_probability(const ThermalSpectrum& spectrum, double beta, const SpectralWindow& window) {
    if (!(beta >= 0.0)) throw std::invalid_argument("beta must be nonnegative");
    if (beta == 0.0) return 1.0;
    const int n = spectrum.num_qubits();
    return std::exp(beta * window.lambda_min + spectrum.log_partition(beta) - n * std::log(2.0));
}

double success_probability(const PauliSum& h, double beta, const SpectralWindow& window) {
    return success_probability(ThermalSpectrum(h), beta, window);
}

double empirical_success(double norm_sq, double beta, const SpectralWindow& window) {
    return norm_sq * std::exp(beta * window.lambda_min);
}

}  // namespace thermshadow

// Copyright 2026 The locc-usd Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "locc/canonical.hpp"
#include "locc/statespace.hpp"
#include "oracles.hpp"

using namespace locc;

namespace {

PureState beta_state(double beta, double sign) {
    Vector v = Vector::Zero(4);
    v(0) = std::cos(beta);
    v(3) = sign * std::sin(beta);
    return PureState(PartySpace({2, 2}), v);
}

double omega_residual(complex a, complex b, double w) {
    return std::abs((a * std::polar(1.0, -w) + b * std::polar(1.0, w)).imag());
}

// Checks every CanonicalForm invariant on (phi, psi).
void check_invariants(const PureState& phi, const PureState& psi, const CanonicalForm& f) {
    const complex ov = inner_product(phi, psi);
    double tsum = 0.0, aligned = 0.0;
    complex recombined = 0.0;
    for (const auto& t : f.terms) {
        tsum += t.weight;
        if (!t.mu)
            continue;
        aligned += t.weight * t.rho;
        const complex inner = t.mu->dot(*t.nu);
        recombined += t.weight * inner;
        if (t.weight > 1e-12)
            CHECK(std::abs((std::polar(1.0, -f.global_phase) * inner).imag()) <= 1e-8);
    }
    CHECK(std::abs(tsum - 1.0) < 1e-10);
    CHECK(std::abs(aligned - std::abs(ov)) < 1e-9);
    CHECK(std::abs(recombined - ov) < 1e-9);
    CHECK(isometry_residual(f.alice_unitary) < 1e-12);
    CHECK(f.diagnostics.weight_gap < 1e-10);

    // (W (x) I)|phi> = sum sqrt(t_i) |i>|mu_i>, same for psi with nu.
    const PureState wphi = apply_local(f.alice_unitary, f.cut_party, phi);
    const PureState wpsi = apply_local(f.alice_unitary, f.cut_party, psi);
    std::vector<double> w;
    std::vector<std::optional<Vector>> mus, nus;
    for (const auto& t : f.terms) {
        w.push_back(t.weight);
        mus.push_back(t.mu);
        nus.push_back(t.nu);
    }
    StatePairDecomposition canon;
    canon.party = f.cut_party;
    canon.alice_basis = Matrix::Identity(f.alice_unitary.rows(), f.alice_unitary.rows());
    CHECK((canon.reassemble(phi.space(), w, mus) - wphi.amplitudes()).cwiseAbs().maxCoeff() < 1e-9);
    CHECK((canon.reassemble(psi.space(), w, nus) - wpsi.amplitudes()).cwiseAbs().maxCoeff() < 1e-9);

    // Re-deriving the decomposition in the basis W^dagger reproduces (t, mu, nu).
    const auto dec = decompose_pair(phi, psi, f.cut_party, f.alice_unitary.adjoint());
    for (std::size_t i = 0; i < f.terms.size(); ++i) {
        CHECK(std::abs(dec.r[i] - f.terms[i].weight) < 1e-9);
        CHECK(std::abs(dec.s[i] - f.terms[i].weight) < 1e-9);
        if (f.terms[i].mu && f.terms[i].weight > 1e-12) {
            CHECK((*dec.eta[i] - *f.terms[i].mu).cwiseAbs().maxCoeff() < 1e-9);
            CHECK((*dec.gamma[i] - *f.terms[i].nu).cwiseAbs().maxCoeff() < 1e-9);
        }
    }
}

} // namespace

TEST_SUITE("canonical") {

TEST_CASE("PairRotation is Hermitian and unitary") {
    const PairRotation r{0, 1, 0.37, -1.2};
    const Eigen::Matrix2cd u = r.matrix();
    CHECK((u - u.adjoint()).cwiseAbs().maxCoeff() < 1e-14);
    CHECK((u.adjoint() * u - Eigen::Matrix2cd::Identity()).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("solve_omega examples") {
    CHECK(solve_omega(1.0, 1.0) == 0.0);
    CHECK(solve_omega(complex(0, 1), 0.0) == doctest::Approx(std::numbers::pi / 2).epsilon(1e-15));
    CHECK(solve_omega(0.0, 0.0) == 0.0);

    std::mt19937_64 rng(1);
    std::normal_distribution<double> n(0, 1);
    for (int k = 0; k < 1000; ++k) {
        const complex a(n(rng), n(rng)), b(n(rng), n(rng));
        CHECK(omega_residual(a, b, solve_omega(a, b)) < 1e-12);
    }
}

TEST_CASE("solve_theta examples") {
    const double t = solve_theta(1.0, 1.0, 0.0);
    CHECK(t == doctest::Approx(-std::numbers::pi / 8).epsilon(1e-14));
    CHECK(theta_residual(1, 1, 0, t) < 1e-15);

    CHECK(solve_theta(0.7, -2.3, -0.7) == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(std::abs(solve_theta(0.7, -2.3, -0.7)) < 1e-14);

    const double t3 = solve_theta(0.3, -0.4, 0.2);
    CHECK(theta_residual(0.3, -0.4, 0.2, t3) < 1e-10);
    CHECK(std::abs(theta_residual(0.3, -0.4, 0.2, t3) - oracle::grid_min_residual(0.3, -0.4, 0.2)) < 1e-8);

    CHECK_THROWS_AS(solve_theta(0.3, 0.4, 0.6), PreconditionError);
}

TEST_CASE("solve_theta picks the branch with the smaller residual") {
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> u(-1, 1);
    for (int k = 0; k < 2000; ++k) {
        const double a = u(rng), b = u(rng);
        const double c = u(rng) * std::hypot(a, b);
        const double t = solve_theta(a, b, c);
        const double r = theta_residual(a, b, c, t);
        // The other root of R cos(2t - delta) = -C.
        const double delta = std::atan2(b, a);
        const double alt = delta - t; // 2t' - delta = -(2t - delta)
        CHECK(r < 1e-12);
        CHECK(r <= theta_residual(a, b, c, alt) + 1e-15);
    }
}

TEST_CASE("constant_diagonal_unitary examples") {
    const Matrix ci = 0.3 * Matrix::Identity(3, 3);
    const Matrix w0 = constant_diagonal_unitary(ci);
    CHECK((w0 * ci * w0.adjoint() - ci).cwiseAbs().maxCoeff() < 1e-15);

    Matrix d10 = Matrix::Zero(2, 2);
    d10(0, 0) = 1.0;
    const Matrix w = constant_diagonal_unitary(d10);
    const Matrix out = w * d10 * w.adjoint();
    CHECK(std::abs(out(0, 0) - 0.5) < 1e-12);
    CHECK(std::abs(out(1, 1) - 0.5) < 1e-12);
    // A grid over (theta, omega) reaches diag (1/2, 1/2), e.g. at theta = pi/4.
    double best = 1.0;
    for (int i = 0; i <= 400; ++i)
        for (int j = 0; j < 8; ++j) {
            const PairRotation r{0, 1, std::numbers::pi / 2 * i / 400.0, std::numbers::pi * j / 4.0};
            const Eigen::Matrix2cd u = r.matrix();
            const Eigen::Matrix2cd m = u * d10 * u.adjoint();
            best = std::min(best, std::abs(m(0, 0) - 0.5));
        }
    CHECK(best < 1e-12);

    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        std::mt19937_64 rng(seed);
        std::normal_distribution<double> n(0, 1);
        Matrix m(4, 4);
        for (auto& z : m.reshaped())
            z = complex(n(rng), n(rng));
        const Matrix u = constant_diagonal_unitary(m);
        const Matrix t = u * m * u.adjoint();
        const complex tau = m.trace() / 4.0;
        CHECK((t.diagonal().array() - tau).abs().maxCoeff() < 1e-10);
        CHECK(isometry_residual(u) < 1e-12);
    }
}

TEST_CASE("canonicalize: beta pair is already canonical") {
    const double beta = std::numbers::pi / 8;
    const PureState phi = beta_state(beta, 1), psi = beta_state(beta, -1);
    const CanonicalForm f = canonicalize(phi, psi, 0);
    CHECK((f.alice_unitary - Matrix::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-15);
    CHECK(f.terms[0].weight == doctest::Approx(std::cos(beta) * std::cos(beta)).epsilon(1e-15));
    CHECK(f.terms[1].weight == doctest::Approx(std::sin(beta) * std::sin(beta)).epsilon(1e-15));
    CHECK(f.terms[0].rho == doctest::Approx(1.0));
    CHECK(f.terms[1].rho == doctest::Approx(-1.0));
    CHECK(f.terms[0].sign == 1);
    CHECK(f.terms[1].sign == -1);
    check_invariants(phi, psi, f);
}

TEST_CASE("canonicalize: identical states give unit overlaps") {
    const PartySpace s({3, 2});
    const PureState phi = random_state(s, 5);
    const CanonicalForm f = canonicalize(phi, phi, 0);
    double sum = 0;
    for (const auto& t : f.terms) {
        if (t.mu)
            CHECK(t.rho == doctest::Approx(1.0).epsilon(1e-12));
        sum += t.weight * t.rho;
    }
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
    check_invariants(phi, phi, f);
}

TEST_CASE("canonicalize: invariant suite on random pairs") {
    const std::vector<std::vector<std::size_t>> shapes = {{2, 2}, {2, 3}, {3, 3}, {4, 4}};
    int cases = 0;
    for (const auto& dims : shapes) {
        const PartySpace s(dims);
        for (std::uint64_t seed = 0; seed < 50; ++seed) {
            const double target = 0.05 + 0.9 * static_cast<double>(seed % 10) / 10.0;
            const auto [phi, psi] = random_pair(s, target, seed * 31 + dims[0]);
            const CanonicalForm f = canonicalize(phi, psi, 0);
            check_invariants(phi, psi, f);
            ++cases;
        }
    }
    CHECK(cases == 200);
}

TEST_CASE("canonicalize on a non-leading cut and with complex overlap phase") {
    const PartySpace s({2, 3, 2});
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const auto [phi, psi] = random_pair(s, 0.45, seed);
        for (std::size_t party = 0; party < 3; ++party)
            check_invariants(phi, psi, canonicalize(phi, psi, party));
    }
}

TEST_CASE("canonicalize preconditions") {
    const PartySpace s({2, 2});
    const auto [phi, psi] = random_pair(s, 0.0, 1);
    CHECK_THROWS_AS(canonicalize(phi, psi, 0), PreconditionError);
    CHECK_THROWS_AS(canonicalize(phi, phi, 4), ShapeError);
    CHECK_THROWS_AS(canonicalize(phi, random_state(PartySpace({2, 3}), 1), 0), ShapeError);
}

}

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
#include <functional>
#include <numbers>

#include "locc/canonical.hpp"
#include "locc/protocols.hpp"
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

PureState from_list(const PartySpace& s, std::initializer_list<complex> amps) {
    Vector v(static_cast<Eigen::Index>(amps.size()));
    Eigen::Index k = 0;
    for (auto a : amps)
        v(k++) = a;
    return PureState::normalized(s, v);
}

LedgerTerm make_term(std::size_t index, double weight, double rho) {
    LedgerTerm t;
    t.index = index;
    t.weight = weight;
    t.rho = rho;
    t.sign = rho > 0 ? 1 : -1;
    t.alice = Vector::Unit(2, static_cast<Eigen::Index>(index));
    t.mu = Vector::Unit(2, 0);
    t.nu = Vector(2);
    t.nu << rho, std::sqrt(1 - rho * rho);
    return t;
}

double min_eigenvalue(const Matrix& m) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (m + m.adjoint()), Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
}

// Every measurement acts on one party and parties never decrease along a path.
void check_one_way(const ProtocolTree& tree, std::size_t parties, std::size_t floor = 0) {
    if (tree.is_leaf())
        return;
    const auto& node = tree.node();
    CHECK(node.party < parties);
    CHECK(node.party >= floor);
    for (const auto& b : node.branches)
        check_one_way(b, parties, node.party);
}

void check_perfect(const ProtocolTree& tree, const PureState& phi, const PureState& psi) {
    const auto dims = phi.space().dims();
    const auto a = oracle::full_space_evaluate(tree, phi.amplitudes(), dims);
    const auto b = oracle::full_space_evaluate(tree, psi.amplitudes(), dims);
    CHECK(a.phi == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(a.psi < 1e-10);
    CHECK(b.psi == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(b.phi < 1e-10);
}

} // namespace

TEST_SUITE("protocols") {

TEST_CASE("verdict names round-trip") {
    for (auto v : {Verdict::Phi, Verdict::Psi, Verdict::Inconclusive})
        CHECK(verdict_from_string(to_string(v)) == v);
    CHECK_THROWS_AS(verdict_from_string("maybe"), ParseError);
}

TEST_CASE("idp_povm examples") {
    Vector mu = Vector::Unit(2, 0), nu(2);
    nu << std::sqrt(0.5), std::sqrt(0.5);
    const auto povm = idp_povm(mu, nu);
    const double c = std::sqrt(0.5);
    const double p_phi = std::real(mu.dot(povm.effect(PovmLabel::IdentifyPhi) * mu));
    const double p_psi = std::real(nu.dot(povm.effect(PovmLabel::IdentifyPsi) * nu));
    CHECK(p_phi == doctest::Approx(1 - c).epsilon(1e-12));
    CHECK(p_psi == doctest::Approx(1 - c).epsilon(1e-12));
    CHECK(std::abs(mu.dot(povm.effect(PovmLabel::IdentifyPsi) * mu)) < 1e-12);
    CHECK(std::abs(nu.dot(povm.effect(PovmLabel::IdentifyPhi) * nu)) < 1e-12);
    CHECK(validate_povm(povm).pass);

    CHECK_THROWS_AS(idp_povm(mu, mu), PreconditionError);
    CHECK_THROWS_AS(idp_povm(mu, Vector::Unit(3, 0)), ShapeError);
}

TEST_CASE("idp_povm in dimension 5") {
    const PartySpace s({5});
    const auto [phi, psi] = random_pair(s, 0.3, 17);
    const auto povm = idp_povm(phi.amplitudes(), psi.amplitudes());
    const auto rep = validate_povm(povm);
    CHECK(rep.pass);
    const Vector& mu = phi.amplitudes();
    const Vector& nu = psi.amplitudes();
    CHECK(std::real(mu.dot(povm.effect(PovmLabel::IdentifyPhi) * mu)) == doctest::Approx(0.7).epsilon(1e-10));
    CHECK(std::real(nu.dot(povm.effect(PovmLabel::IdentifyPsi) * nu)) == doctest::Approx(0.7).epsilon(1e-10));
    for (const auto& e : povm.elements) {
        CHECK((e.effect - e.effect.adjoint()).cwiseAbs().maxCoeff() < 1e-12);
        CHECK(min_eigenvalue(e.effect) > -1e-10);
    }
}

TEST_CASE("pair_terms splits the larger term") {
    TermLedger ledger;
    ledger.terms = {make_term(0, 0.6, 0.5), make_term(1, 0.4, -0.5)};
    const auto [next, rec] = pair_terms(ledger, 0, 1);
    CHECK_FALSE(rec.exchanged);
    CHECK(rec.alpha == doctest::Approx(0.6154797086703874).epsilon(1e-14));
    REQUIRE(rec.pieces.size() == 2);
    CHECK(rec.pieces[0].term == 0);
    CHECK(rec.pieces[0].weight == doctest::Approx(0.4).epsilon(1e-14));
    CHECK(rec.pieces[1].term == 1);
    CHECK(rec.pieces[1].weight == doctest::Approx(0.4).epsilon(1e-14));
    REQUIRE(next.terms.size() == 1);
    CHECK(next.terms[0].weight == doctest::Approx(0.2).epsilon(1e-14));
    CHECK(next.total_weight() == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(next.aligned_overlap() == doctest::Approx(ledger.aligned_overlap()).epsilon(1e-14));
    // The branch pair is orthogonal.
    CHECK(std::abs(rec.phi.dot(rec.psi)) < 1e-14);
}

TEST_CASE("pair_terms exchanged and tie cases") {
    TermLedger ledger;
    ledger.terms = {make_term(0, 0.3, 0.5), make_term(1, 0.7, -0.5)};
    const auto [next, rec] = pair_terms(ledger, 0, 1);
    CHECK(rec.exchanged);
    REQUIRE(next.terms.size() == 1);
    CHECK(next.terms[0].index == 1);
    CHECK(next.terms[0].weight == doctest::Approx(0.7 * (1 - 3.0 / 7.0)).epsilon(1e-14));
    CHECK(std::abs(rec.phi.dot(rec.psi)) < 1e-14);

    TermLedger tie;
    tie.terms = {make_term(0, 0.5, 0.4), make_term(1, 0.5, -0.4)};
    const auto [empty, both] = pair_terms(tie, 0, 1);
    CHECK(empty.terms.empty());
    CHECK(both.alpha == 0.0);
    CHECK(both.weight() == doctest::Approx(1.0).epsilon(1e-14));

    CHECK_THROWS_AS(pair_terms(tie, 1, 0), PreconditionError);
    CHECK_THROWS_AS(pair_terms(tie, 0, 5), PreconditionError);
}

TEST_CASE("resolve_signs on the beta pair") {
    const double beta = std::numbers::pi / 8;
    const auto form = canonicalize(beta_state(beta, 1), beta_state(beta, -1), 0);
    const auto plan = resolve_signs(form);
    REQUIRE(plan.orthogonal.size() == 1);
    const auto& br = plan.orthogonal[0];
    CHECK(br.alpha == doctest::Approx(1.1437177404024206).epsilon(1e-12));
    CHECK(br.weight() == doctest::Approx(0.2928932188134525).epsilon(1e-12));
    REQUIRE(plan.residual.size() == 1);
    CHECK(plan.residual[0].weight == doctest::Approx(0.7071067811865476).epsilon(1e-12));
    CHECK((plan.residual[0].mu - plan.residual[0].nu).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("resolve_signs leaves only nonnegative residuals") {
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        const PartySpace s({3, 3});
        const auto [phi, psi] = random_pair(s, 0.1 + 0.008 * static_cast<double>(seed), seed);
        const auto form = canonicalize(phi, psi, 0);
        const auto plan = resolve_signs(form);
        double weight = 0, aligned = 0;
        for (const auto& t : plan.residual) {
            CHECK(t.sign >= 0);
            weight += t.weight;
            aligned += t.weight * t.rho;
        }
        for (const auto& br : plan.orthogonal) {
            weight += br.weight();
            CHECK(std::abs(br.phi.dot(br.psi)) < 1e-10);
        }
        CHECK(weight == doctest::Approx(1.0).epsilon(1e-10));
        CHECK(aligned == doctest::Approx(std::abs(inner_product(phi, psi))).epsilon(1e-9));
    }
}

TEST_CASE("compile_orthogonal examples") {
    const PartySpace two({2, 2});
    check_perfect(compile_orthogonal(from_list(two, {1, 0, 0, 0}), from_list(two, {0, 0, 0, 1})),
                  from_list(two, {1, 0, 0, 0}), from_list(two, {0, 0, 0, 1}));

    const PureState bell_p = from_list(two, {1, 0, 0, 1});
    const PureState bell_m = from_list(two, {1, 0, 0, -1});
    const auto tree = compile_orthogonal(bell_p, bell_m);
    CHECK(validate_protocol(tree).pass);
    check_perfect(tree, bell_p, bell_m);
    check_one_way(tree, 2);

    const PartySpace three({2, 2, 2});
    const PureState ghz_p = from_list(three, {1, 0, 0, 0, 0, 0, 0, 1});
    const PureState ghz_m = from_list(three, {1, 0, 0, 0, 0, 0, 0, -1});
    const auto t3 = compile_orthogonal(ghz_p, ghz_m);
    CHECK(validate_protocol(t3).pass);
    check_perfect(t3, ghz_p, ghz_m);
    check_one_way(t3, 3);

    CHECK_THROWS_AS(compile_orthogonal(bell_p, from_list(two, {1, 0, 0, 0})), PreconditionError);
}

TEST_CASE("compile_orthogonal on random orthogonal pairs") {
    for (std::uint64_t seed = 0; seed < 30; ++seed) {
        const PartySpace s(seed % 2 ? std::vector<std::size_t>{3, 2} : std::vector<std::size_t>{2, 2, 3});
        const auto [phi, psi] = random_pair(s, 0.0, seed + 100);
        const auto tree = compile_orthogonal(phi, psi);
        CHECK(validate_protocol(tree).pass);
        check_perfect(tree, phi, psi);
    }
}

TEST_CASE("compile: beta pair tree shape") {
    const double beta = std::numbers::pi / 8;
    const PureState phi = beta_state(beta, 1), psi = beta_state(beta, -1);
    const auto tree = compile(phi, psi);
    REQUIRE_FALSE(tree.is_leaf());
    const auto& root = tree.node();
    REQUIRE(root.isometry);
    CHECK(root.isometry->ancilla_dim == 2);
    CHECK(root.branches.size() == 2);
    // Residual branch has mu = nu and is inconclusive outright.
    REQUIRE(root.branches[1].is_leaf());
    CHECK(root.branches[1].verdict() == Verdict::Inconclusive);

    const auto a = oracle::full_space_evaluate(tree, phi.amplitudes(), {2, 2});
    const auto b = oracle::full_space_evaluate(tree, psi.amplitudes(), {2, 2});
    CHECK(a.phi == doctest::Approx(1 - std::cos(std::numbers::pi / 4)).epsilon(1e-12));
    CHECK(b.psi == doctest::Approx(1 - std::cos(std::numbers::pi / 4)).epsilon(1e-12));
    CHECK(a.psi < 1e-12);
    CHECK(b.phi < 1e-12);
}

TEST_CASE("compile: single party reduces to the optimal POVM") {
    const PartySpace s({3});
    const auto [phi, psi] = random_pair(s, 0.4, 9);
    const auto tree = compile(phi, psi);
    const auto a = oracle::full_space_evaluate(tree, phi.amplitudes(), {3});
    CHECK(a.phi == doctest::Approx(0.6).epsilon(1e-10));
    CHECK(compile(phi, phi).is_leaf());
}

TEST_CASE("compile reaches the bound on random pairs (full-space oracle)") {
    const std::vector<std::vector<std::size_t>> shapes = {{2, 2}, {2, 3}, {3, 2}, {3, 3}, {2, 2, 2}, {2, 3, 2}};
    for (const auto& dims : shapes) {
        const PartySpace s(dims);
        for (std::uint64_t seed = 0; seed < 12; ++seed) {
            const double target = 0.05 + 0.075 * static_cast<double>(seed);
            const auto [phi, psi] = random_pair(s, target, seed * 7 + dims.size());
            const auto tree = compile(phi, psi);
            check_one_way(tree, dims.size());
            const auto a = oracle::full_space_evaluate(tree, phi.amplitudes(), dims);
            const auto b = oracle::full_space_evaluate(tree, psi.amplitudes(), dims);
            const double bound = 1 - std::abs(inner_product(phi, psi));
            CHECK(std::abs(a.phi - bound) < 1e-9);
            CHECK(std::abs(b.psi - bound) < 1e-9);
            CHECK(a.psi < 1e-10);
            CHECK(b.phi < 1e-10);
            CHECK(a.phi + a.psi + a.inconclusive == doctest::Approx(1.0).epsilon(1e-10));
        }
    }
}

TEST_CASE("compile rejects mismatched spaces") {
    CHECK_THROWS_AS(compile(random_state(PartySpace({2, 2}), 1), random_state(PartySpace({4}), 1)), ShapeError);
}

TEST_CASE("validate_protocol flags broken nodes") {
    MeasureNode node;
    node.party = 0;
    node.operators = {std::sqrt(0.9) * Matrix::Identity(2, 2)};
    node.branches = {ProtocolTree::leaf(Verdict::Phi)};
    const auto rep = validate_protocol(ProtocolTree::measure(node));
    CHECK_FALSE(rep.pass);
    CHECK(rep.max_completeness_residual == doctest::Approx(0.1).epsilon(1e-12));
    REQUIRE(rep.failures.size() == 1);
    CHECK(rep.failures[0].rfind("root:", 0) == 0);

    MeasureNode inner = node;
    inner.operators = {Matrix::Identity(2, 2), Matrix::Zero(2, 2)};
    inner.branches = {ProtocolTree::measure(node), ProtocolTree::leaf(Verdict::Psi)};
    const auto rep2 = validate_protocol(ProtocolTree::measure(inner));
    CHECK_FALSE(rep2.pass);
    CHECK(rep2.failures[0].rfind("root/0:", 0) == 0);

    CHECK(validate_protocol(ProtocolTree::leaf(Verdict::Phi)).pass);
    CHECK_THROWS_AS(ProtocolTree::measure(MeasureNode{0, std::nullopt, {Matrix::Identity(2, 2)}, {}}), ShapeError);
}

TEST_CASE("validate_povm flags a negative effect") {
    PovmElementSet povm;
    Matrix a = Matrix::Zero(2, 2), b = Matrix::Zero(2, 2);
    a(0, 0) = 1.01;
    b(0, 0) = -0.01;
    b(1, 1) = 1.0;
    povm.elements = {{PovmLabel::IdentifyPhi, a}, {PovmLabel::Inconclusive, b}};
    const auto rep = validate_povm(povm);
    CHECK_FALSE(rep.pass);
    CHECK(rep.min_effect_eigenvalue == doctest::Approx(-0.01).epsilon(1e-12));
    CHECK(rep.max_completeness_residual < 1e-15);
}

}

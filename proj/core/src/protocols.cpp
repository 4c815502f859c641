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

#include "locc/protocols.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace locc {

namespace {

constexpr double kZeroNorm2 = 1e-28;
constexpr double kTieTol = 1e-12;

Vector kron(const Vector& a, const Vector& b) {
    Vector out(a.size() * b.size());
    for (Eigen::Index i = 0; i < a.size(); ++i)
        out.segment(i * b.size(), b.size()) = a(i) * b;
    return out;
}

Matrix psd_sqrt(const Matrix& m) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (m + m.adjoint()));
    const Eigen::VectorXd ev = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    return es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().adjoint();
}

ProtocolTree verdict_node(std::size_t party, std::vector<Matrix> ops, std::vector<Verdict> verdicts) {
    MeasureNode node;
    node.party = party;
    node.operators = std::move(ops);
    for (auto v : verdicts)
        node.branches.push_back(ProtocolTree::leaf(v));
    return ProtocolTree::measure(std::move(node));
}

// Optimal unambiguous measurement on a single party, as Kraus operators.
ProtocolTree idp_leaf(const Vector& mu, const Vector& nu, std::size_t party) {
    if (std::abs(mu.dot(nu)) >= 1.0 - 1e-12)
        return ProtocolTree::leaf(Verdict::Inconclusive);
    const PovmElementSet povm = idp_povm(mu, nu);
    std::vector<Matrix> ops;
    for (const auto& e : povm.elements)
        ops.push_back(psd_sqrt(e.effect));
    return verdict_node(party, std::move(ops), {Verdict::Phi, Verdict::Psi, Verdict::Inconclusive});
}

// Perfect discrimination of (numerically) orthogonal states over the parties
// [offset, offset + space.parties()). Inputs may be unnormalized.
ProtocolTree orthogonal_range(const Vector& phi, const Vector& psi, const PartySpace& space,
                              std::size_t offset) {
    const Vector phi_hat = phi.normalized();
    const Vector psi_hat = psi.normalized();
    if (space.parties() == 1) {
        const Matrix to_psi = psi_hat * psi_hat.adjoint();
        const auto d = static_cast<Eigen::Index>(space.dim(0));
        return verdict_node(offset, {Matrix::Identity(d, d) - to_psi, to_psi},
                            {Verdict::Phi, Verdict::Psi});
    }

    const Matrix phi_m = as_party_matrix(phi_hat, space, 0);
    const Matrix psi_m = as_party_matrix(psi_hat, space, 0);
    // Traceless overlap operator -> basis in which each conditional pair on
    // the remaining parties is orthogonal.
    const Matrix w = constant_diagonal_unitary(psi_m * phi_m.adjoint());
    const PartySpace rest = space.tail(1);

    MeasureNode node;
    node.party = offset;
    const Eigen::Index d = w.rows();
    for (Eigen::Index k = 0; k < d; ++k) {
        Matrix op = Matrix::Zero(d, d);
        op.row(k) = w.row(k);
        node.operators.push_back(std::move(op));

        const Vector phi_k = (w.row(k) * phi_m).transpose();
        const Vector psi_k = (w.row(k) * psi_m).transpose();
        const double r = phi_k.squaredNorm();
        const double s = psi_k.squaredNorm();
        if (r <= kZeroNorm2 && s <= kZeroNorm2)
            node.branches.push_back(ProtocolTree::leaf(Verdict::Phi)); // unreachable
        else if (r <= kZeroNorm2)
            node.branches.push_back(ProtocolTree::leaf(Verdict::Psi));
        else if (s <= kZeroNorm2)
            node.branches.push_back(ProtocolTree::leaf(Verdict::Phi));
        else
            node.branches.push_back(orthogonal_range(phi_k, psi_k, rest, offset + 1));
    }
    return ProtocolTree::measure(std::move(node));
}

Vector branch_vector(const std::vector<BranchPiece>& pieces, const std::vector<LedgerTerm>& terms,
                     bool use_nu, Eigen::Index alice_dim, Eigen::Index bob_dim) {
    Vector out = Vector::Zero(alice_dim * bob_dim);
    for (const auto& p : pieces) {
        const auto it = std::find_if(terms.begin(), terms.end(),
                                     [&](const LedgerTerm& t) { return t.index == p.term; });
        out += std::sqrt(p.weight) * kron(it->alice, use_nu ? it->nu : it->mu);
    }
    return out;
}

ProtocolTree compile_range(const PureState& phi, const PureState& psi, std::size_t offset);

// Root of a non-orthogonal (sub)problem: ancilla isometry on the first party
// followed by ancilla readout.
ProtocolTree ancilla_node(const PureState& phi, const PureState& psi, std::size_t offset) {
    const PartySpace& space = phi.space();
    const CanonicalForm form = canonicalize(phi, psi, 0);
    const BranchPlan plan = resolve_signs(form);

    const auto n = static_cast<Eigen::Index>(space.dim(0));
    const auto rest_dim = static_cast<Eigen::Index>(space.complement_dim(0));
    const PartySpace rest = space.tail(1);

    // pieces[b] lists (term, weight) feeding ancilla outcome b.
    std::vector<std::vector<BranchPiece>> pieces;
    for (const auto& br : plan.orthogonal)
        pieces.push_back(br.pieces);
    for (const auto& t : plan.residual)
        pieces.push_back({BranchPiece{t.index, t.weight}});
    const auto m = static_cast<Eigen::Index>(pieces.size());
    if (m == 0)
        throw InternalError("sign resolution produced no branches");

    // amp(b, i): amplitude routing canonical basis state |i> to ancilla |b>.
    Eigen::MatrixXd amp = Eigen::MatrixXd::Zero(m, n);
    for (Eigen::Index b = 0; b < m; ++b)
        for (const auto& p : pieces[static_cast<std::size_t>(b)])
            amp(b, static_cast<Eigen::Index>(p.term)) += std::sqrt(std::max(0.0, p.weight));
    for (Eigen::Index i = 0; i < n; ++i) {
        const double norm = amp.col(i).norm();
        if (norm == 0.0)
            amp(0, i) = 1.0; // term carries no weight in either state
        else
            amp.col(i) /= norm;
    }

    AncillaIsometry iso;
    iso.ancilla_dim = static_cast<std::size_t>(m);
    iso.matrix = Matrix::Zero(m * n, n);
    for (Eigen::Index b = 0; b < m; ++b)
        for (Eigen::Index i = 0; i < n; ++i)
            iso.matrix.row(b * n + i) = amp(b, i) * form.alice_unitary.row(i);

    MeasureNode node;
    node.party = offset;
    for (Eigen::Index b = 0; b < m; ++b) {
        Matrix readout = Matrix::Zero(n, m * n);
        readout.block(0, b * n, n, n) = Matrix::Identity(n, n);
        node.operators.push_back(std::move(readout));
    }

    // Children.
    std::vector<LedgerTerm> all_terms = make_ledger(form).terms;
    for (const auto& br : plan.orthogonal)
        node.branches.push_back(orthogonal_range(br.phi, br.psi, space, offset));
    for (const auto& t : plan.residual) {
        if (rest.parties() == 1) {
            node.branches.push_back(idp_leaf(t.mu, t.nu, offset + 1));
        } else {
            node.branches.push_back(compile_range(PureState::normalized(rest, t.mu),
                                                  PureState::normalized(rest, t.nu), offset + 1));
        }
    }

    // V|phi> must equal sum_b |b> (x) (branch component), and likewise for psi.
    auto check = [&](const PureState& state, bool use_nu) {
        const Vector lifted = apply_local(iso.matrix, 0, space, state.amplitudes());
        Vector expected = Vector::Zero(lifted.size());
        for (Eigen::Index b = 0; b < m; ++b) {
            const Vector comp = branch_vector(pieces[static_cast<std::size_t>(b)], all_terms, use_nu, n, rest_dim);
            expected.segment(b * n * rest_dim, n * rest_dim) = comp;
        }
        return (lifted - expected).cwiseAbs().maxCoeff();
    };
    const double phase_fix = form.global_phase;
    const PureState psi_aligned =
        PureState::normalized(space, psi.amplitudes() * std::polar(1.0, -phase_fix));
    const double res_phi = check(phi, false);
    const double res_psi = check(psi_aligned, true);
    const double iso_res = isometry_residual(iso.matrix);
    if (res_phi > 1e-9 || res_psi > 1e-9 || iso_res > kIsometryTol) {
        std::ostringstream os;
        os << "ancilla decomposition check failed at party " << offset << ": phi residual " << res_phi
           << ", psi residual " << res_psi << ", isometry residual " << iso_res;
        throw InternalError(os.str());
    }

    node.isometry = std::move(iso);
    return ProtocolTree::measure(std::move(node));
}

ProtocolTree compile_range(const PureState& phi, const PureState& psi, std::size_t offset) {
    const complex overlap = inner_product(phi, psi);
    if (std::abs(overlap) <= kOrthogonalGate)
        return orthogonal_range(phi.amplitudes(), psi.amplitudes(), phi.space(), offset);
    if (phi.space().parties() == 1)
        return idp_leaf(phi.amplitudes(), psi.amplitudes(), offset);
    return ancilla_node(phi, psi, offset);
}

void require_same_space(const PureState& a, const PureState& b) {
    if (a.space() != b.space())
        throw ShapeError("states live in different party spaces");
}

} // namespace

std::string_view to_string(Verdict v) noexcept {
    switch (v) {
    case Verdict::Phi:
        return "phi";
    case Verdict::Psi:
        return "psi";
    case Verdict::Inconclusive:
        return "inconclusive";
    }
    return "inconclusive";
}

Verdict verdict_from_string(std::string_view s) {
    if (s == "phi")
        return Verdict::Phi;
    if (s == "psi")
        return Verdict::Psi;
    if (s == "inconclusive")
        return Verdict::Inconclusive;
    throw ParseError("unknown verdict '" + std::string(s) + "'");
}

const Matrix& PovmElementSet::effect(PovmLabel label) const {
    for (const auto& e : elements)
        if (e.label == label)
            return e.effect;
    throw PreconditionError("POVM has no element with the requested label");
}

PovmElementSet idp_povm(const Vector& mu, const Vector& nu) {
    if (mu.size() != nu.size())
        throw ShapeError("idp_povm: vectors differ in dimension");
    const complex c = mu.dot(nu);
    const double mag = std::abs(c);
    if (mag >= 1.0 - 1e-12)
        throw PreconditionError("idp_povm: states are identical up to phase");

    // Unit vectors in span{mu, nu} orthogonal to nu and to mu respectively.
    const Vector nu_perp = (mu - nu.dot(mu) * nu).normalized();
    const Vector mu_perp = (nu - mu.dot(nu) * mu).normalized();
    const double scale = 1.0 / (1.0 + mag);

    PovmElementSet out;
    const Matrix e_phi = scale * nu_perp * nu_perp.adjoint();
    const Matrix e_psi = scale * mu_perp * mu_perp.adjoint();
    const auto d = mu.size();
    Matrix e_inc = Matrix::Identity(d, d) - e_phi - e_psi;
    e_inc = 0.5 * (e_inc + e_inc.adjoint());
    out.elements.push_back({PovmLabel::IdentifyPhi, e_phi});
    out.elements.push_back({PovmLabel::IdentifyPsi, e_psi});
    out.elements.push_back({PovmLabel::Inconclusive, e_inc});
    return out;
}

ProtocolTree ProtocolTree::leaf(Verdict v) { return ProtocolTree(v); }

ProtocolTree ProtocolTree::measure(MeasureNode node) {
    if (node.operators.size() != node.branches.size())
        throw ShapeError("measure node needs one branch per operator");
    return ProtocolTree(std::make_shared<const MeasureNode>(std::move(node)));
}

Verdict ProtocolTree::verdict() const {
    if (!is_leaf())
        throw PreconditionError("not a verdict leaf");
    return std::get<Verdict>(node_);
}

const MeasureNode& ProtocolTree::node() const {
    if (is_leaf())
        throw PreconditionError("not a measure node");
    return *std::get<std::shared_ptr<const MeasureNode>>(node_);
}

double BranchRecord::weight() const {
    double w = 0.0;
    for (const auto& p : pieces)
        w += p.weight;
    return w;
}

double TermLedger::total_weight() const {
    double w = 0.0;
    for (const auto& t : terms)
        w += t.weight;
    for (const auto& b : branches)
        w += b.weight();
    return w;
}

double TermLedger::aligned_overlap() const {
    double v = 0.0;
    for (const auto& t : terms)
        v += t.weight * t.rho;
    return v;
}

const LedgerTerm* TermLedger::find(std::size_t index) const {
    for (const auto& t : terms)
        if (t.index == index)
            return &t;
    return nullptr;
}

TermLedger make_ledger(const CanonicalForm& form) {
    TermLedger ledger;
    const auto n = static_cast<Eigen::Index>(form.terms.size());
    const complex unphase = std::polar(1.0, -form.global_phase);
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto& term = form.terms[static_cast<std::size_t>(i)];
        if (!term.mu || !term.nu)
            continue;
        LedgerTerm t;
        t.index = static_cast<std::size_t>(i);
        t.weight = term.weight;
        t.rho = term.rho;
        t.sign = term.sign;
        t.alice = Vector::Unit(n, i);
        t.mu = *term.mu;
        t.nu = *term.nu * unphase;
        ledger.terms.push_back(std::move(t));
    }
    return ledger;
}

std::pair<TermLedger, BranchRecord> pair_terms(const TermLedger& ledger, std::size_t pos,
                                               std::size_t neg) {
    const LedgerTerm* p = ledger.find(pos);
    const LedgerTerm* q = ledger.find(neg);
    if (!p || !q)
        throw PreconditionError("pair_terms: term is not live");
    if (p->sign != 1 || q->sign != -1)
        throw PreconditionError("pair_terms: needs one positive and one negative term");

    const double pos_mass = p->weight * p->rho;
    const double neg_mass = q->weight * std::abs(q->rho);

    // `big` keeps a remainder, `small` is consumed whole.
    const bool exchanged = pos_mass < neg_mass;
    const LedgerTerm& big = exchanged ? *q : *p;
    const LedgerTerm& small = exchanged ? *p : *q;
    double ratio = (exchanged ? pos_mass / neg_mass : neg_mass / pos_mass);
    if (ratio >= 1.0 - kTieTol)
        ratio = 1.0;

    BranchRecord rec;
    rec.exchanged = exchanged;
    rec.alpha = std::acos(std::sqrt(ratio));
    rec.pieces = {BranchPiece{big.index, big.weight * ratio}, BranchPiece{small.index, small.weight}};
    const Eigen::Index alice_dim = big.alice.size();
    const Eigen::Index bob_dim = big.mu.size();
    rec.phi = Vector::Zero(alice_dim * bob_dim);
    rec.psi = Vector::Zero(alice_dim * bob_dim);
    for (const auto& [term, piece] : {std::pair{&big, rec.pieces[0]}, std::pair{&small, rec.pieces[1]}}) {
        rec.phi += std::sqrt(piece.weight) * kron(term->alice, term->mu);
        rec.psi += std::sqrt(piece.weight) * kron(term->alice, term->nu);
    }

    TermLedger out;
    for (const auto& t : ledger.terms) {
        if (t.index == small.index)
            continue;
        if (t.index == big.index) {
            if (ratio >= 1.0)
                continue;
            LedgerTerm kept = t;
            kept.weight = t.weight * (1.0 - ratio);
            out.terms.push_back(std::move(kept));
            continue;
        }
        out.terms.push_back(t);
    }
    out.branches = ledger.branches;
    out.branches.push_back(rec);
    return {std::move(out), std::move(rec)};
}

BranchPlan resolve_signs(const CanonicalForm& form) {
    TermLedger ledger = make_ledger(form);
    if (ledger.aligned_overlap() <= 1e-12)
        throw PreconditionError("resolve_signs needs a positive aligned overlap");

    BranchPlan plan;
    const std::size_t limit = ledger.terms.size();
    while (true) {
        const LedgerTerm* neg = nullptr;
        const LedgerTerm* pos = nullptr;
        for (const auto& t : ledger.terms) {
            if (t.sign == -1 && (!neg || t.weight * -t.rho > neg->weight * -neg->rho))
                neg = &t;
            if (t.sign == 1 && (!pos || t.weight * t.rho > pos->weight * pos->rho))
                pos = &t;
        }
        if (!neg)
            break;
        if (!pos || plan.pairings >= limit)
            throw InternalError("resolve_signs: negative terms left without a positive partner");
        auto [next, rec] = pair_terms(ledger, pos->index, neg->index);
        ledger = std::move(next);
        plan.orthogonal.push_back(std::move(rec));
        ++plan.pairings;
    }
    plan.residual = ledger.terms;
    return plan;
}

ProtocolTree compile_orthogonal(const PureState& phi, const PureState& psi) {
    require_same_space(phi, psi);
    const double overlap = std::abs(inner_product(phi, psi));
    if (overlap > kOrthogonalGate) {
        std::ostringstream os;
        os << "compile_orthogonal: |<phi|psi>| = " << overlap << " exceeds " << kOrthogonalGate;
        throw PreconditionError(os.str());
    }
    return orthogonal_range(phi.amplitudes(), psi.amplitudes(), phi.space(), 0);
}

ProtocolTree compile(const PureState& phi, const PureState& psi) {
    require_same_space(phi, psi);
    ProtocolTree tree = compile_range(phi, psi, 0);
    const ValidationReport report = validate_protocol(tree);
    if (!report.pass) {
        std::ostringstream os;
        os << "compiled protocol failed validation:";
        for (const auto& f : report.failures)
            os << "\n  " << f;
        throw InternalError(os.str());
    }
    return tree;
}

namespace {

void validate_node(const ProtocolTree& tree, const std::string& path, ValidationReport& rep) {
    if (tree.is_leaf())
        return;
    const MeasureNode& node = tree.node();
    NodeCheck check;
    check.path = path;
    auto fail = [&](const std::string& what) {
        rep.pass = false;
        rep.failures.push_back(path + ": " + what);
    };

    if (node.operators.empty())
        fail("measure node without operators");
    if (node.operators.size() != node.branches.size())
        fail("operator and branch counts differ");

    Eigen::Index in_dim = node.operators.empty() ? 0 : node.operators.front().cols();
    Eigen::Index out_dim = in_dim;
    if (node.isometry) {
        const auto& iso = *node.isometry;
        out_dim = iso.matrix.cols();
        if (iso.matrix.rows() != static_cast<Eigen::Index>(iso.ancilla_dim) * iso.matrix.cols())
            fail("isometry shape does not match ancilla_dim");
        if (in_dim != iso.matrix.rows())
            fail("readout operators do not act on the ancilla-enlarged space");
        check.isometry = isometry_residual(iso.matrix);
        if (check.isometry > kIsometryTol) {
            std::ostringstream os;
            os << "isometry residual " << check.isometry;
            fail(os.str());
        }
    }

    bool shapes_ok = true;
    for (const auto& op : node.operators) {
        if (op.cols() != in_dim || op.rows() != out_dim) {
            fail("operator shape inconsistent with node");
            shapes_ok = false;
            break;
        }
    }
    if (shapes_ok && in_dim > 0) {
        Matrix sum = Matrix::Zero(in_dim, in_dim);
        check.min_eigenvalue = 1.0;
        for (const auto& op : node.operators) {
            const Matrix effect = op.adjoint() * op;
            sum += effect;
            Eigen::SelfAdjointEigenSolver<Matrix> es(effect, Eigen::EigenvaluesOnly);
            check.min_eigenvalue = std::min(check.min_eigenvalue, es.eigenvalues().minCoeff());
        }
        check.completeness = (sum - Matrix::Identity(in_dim, in_dim)).cwiseAbs().maxCoeff();
        if (check.completeness > kCompletenessTol) {
            std::ostringstream os;
            os << "completeness residual " << check.completeness;
            fail(os.str());
        }
        if (check.min_eigenvalue < -kPositivityTol) {
            std::ostringstream os;
            os << "effect eigenvalue " << check.min_eigenvalue;
            fail(os.str());
        }
    }
    rep.max_completeness_residual = std::max(rep.max_completeness_residual, check.completeness);
    rep.max_isometry_residual = std::max(rep.max_isometry_residual, check.isometry);
    rep.min_effect_eigenvalue = std::min(rep.min_effect_eigenvalue, check.min_eigenvalue);
    rep.nodes.push_back(check);

    for (std::size_t k = 0; k < node.branches.size(); ++k)
        validate_node(node.branches[k], path + "/" + std::to_string(k), rep);
}

} // namespace

ValidationReport validate_protocol(const ProtocolTree& tree) {
    ValidationReport rep;
    rep.min_effect_eigenvalue = 0.0;
    validate_node(tree, "root", rep);
    return rep;
}

ValidationReport validate_povm(const PovmElementSet& povm) {
    ValidationReport rep;
    NodeCheck check;
    check.path = "povm";
    if (povm.elements.empty()) {
        rep.pass = false;
        rep.failures.push_back("povm: no elements");
        return rep;
    }
    const Eigen::Index d = povm.elements.front().effect.rows();
    Matrix sum = Matrix::Zero(d, d);
    check.min_eigenvalue = 1.0;
    for (const auto& e : povm.elements) {
        if (e.effect.rows() != d || e.effect.cols() != d) {
            rep.pass = false;
            rep.failures.push_back("povm: element shapes differ");
            return rep;
        }
        const double herm = (e.effect - e.effect.adjoint()).cwiseAbs().maxCoeff();
        rep.max_hermiticity_residual = std::max(rep.max_hermiticity_residual, herm);
        Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (e.effect + e.effect.adjoint()),
                                                 Eigen::EigenvaluesOnly);
        check.min_eigenvalue = std::min(check.min_eigenvalue, es.eigenvalues().minCoeff());
        sum += e.effect;
    }
    check.completeness = (sum - Matrix::Identity(d, d)).cwiseAbs().maxCoeff();
    rep.max_completeness_residual = check.completeness;
    rep.min_effect_eigenvalue = check.min_eigenvalue;
    auto fail = [&](const std::string& what, double v) {
        std::ostringstream os;
        os << "povm: " << what << " " << v;
        rep.pass = false;
        rep.failures.push_back(os.str());
    };
    if (rep.max_hermiticity_residual > kHermiticityTol)
        fail("hermiticity residual", rep.max_hermiticity_residual);
    if (check.min_eigenvalue < -kPositivityTol)
        fail("minimum eigenvalue", check.min_eigenvalue);
    if (check.completeness > kCompletenessTol)
        fail("completeness residual", check.completeness);
    rep.nodes.push_back(check);
    return rep;
}

} // namespace locc

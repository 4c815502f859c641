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

#pragma once

/**
 * @file protocols.hpp
 * Compilation of a state pair into an explicit LOCC measurement tree.
 *
 * For non-orthogonal inputs the first party couples to a local ancilla through
 * one isometry and reads the ancilla out projectively. Every readout branch
 * has the same probability under both hypotheses. Branches whose conditional
 * pair is orthogonal are finished perfectly by a sequence of one-party
 * projective measurements; the others carry a pair of complement states with
 * real, nonnegative aligned overlap and are finished by the optimal
 * unambiguous POVM on the next party (or by recursing when more than two
 * parties are involved).
 */

#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "locc/canonical.hpp"
#include "locc/statespace.hpp"

namespace locc {

enum class Verdict { Phi, Psi, Inconclusive };

std::string_view to_string(Verdict v) noexcept;
/// Accepts "phi", "psi" and "inconclusive".
Verdict verdict_from_string(std::string_view s);

enum class PovmLabel { IdentifyPhi, IdentifyPsi, Inconclusive };

struct PovmElement {
    PovmLabel label;
    Matrix effect;
};

struct PovmElementSet {
    std::vector<PovmElement> elements;

    const Matrix& effect(PovmLabel label) const;
};

/// Three-outcome unambiguous discrimination of |mu> vs |nu> at equal priors.
/// Success probability is 1 - |<mu|nu>| for either input.
PovmElementSet idp_povm(const Vector& mu, const Vector& nu);

struct AncillaIsometry {
    std::size_t ancilla_dim = 0;
    /// (ancilla_dim * d) x d; output index is ancilla * d + local.
    Matrix matrix;
};

struct MeasureNode;

/// Immutable, cheaply copyable handle on a protocol (sub)tree.
class ProtocolTree {
  public:
    static ProtocolTree leaf(Verdict v);
    static ProtocolTree measure(MeasureNode node);

    bool is_leaf() const noexcept { return std::holds_alternative<Verdict>(node_); }
    Verdict verdict() const;
    const MeasureNode& node() const;

  private:
    explicit ProtocolTree(Verdict v) : node_(v) {}
    explicit ProtocolTree(std::shared_ptr<const MeasureNode> n) : node_(std::move(n)) {}

    std::variant<Verdict, std::shared_ptr<const MeasureNode>> node_;
};

/// One round of local measurement on a single party. With an isometry, the
/// operators act on the enlarged (ancilla x party) space and map back to the
/// party space; without one they map the party space to itself. Outcome k
/// leads to branches[k].
struct MeasureNode {
    std::size_t party = 0;
    std::optional<AncillaIsometry> isometry;
    std::vector<Matrix> operators;
    std::vector<ProtocolTree> branches;
};

// ---------------------------------------------------------------------------
// Sign resolution

struct LedgerTerm {
    std::size_t index = 0; ///< canonical term index
    double weight = 0.0;
    double rho = 0.0;
    int sign = 0;
    Vector alice; ///< basis vector on the cut party (canonical coordinates)
    Vector mu;
    Vector nu;    ///< phase-aligned with mu
};

struct BranchPiece {
    std::size_t term = 0; ///< canonical term index
    double weight = 0.0;
};

/// An orthogonal branch: sum over pieces of sqrt(w) |alice>|mu> against the
/// same with nu.
struct BranchRecord {
    std::vector<BranchPiece> pieces;
    double alpha = 0.0;
    bool exchanged = false; ///< the negative term was the larger one
    Vector phi;             ///< unnormalized, alice (x) complement
    Vector psi;

    double weight() const;
};

struct TermLedger {
    std::vector<LedgerTerm> terms; ///< live terms
    std::vector<BranchRecord> branches;

    double total_weight() const;
    /// sum of weight * rho over live terms.
    double aligned_overlap() const;
    const LedgerTerm* find(std::size_t index) const;
};

TermLedger make_ledger(const CanonicalForm& form);

/// Combines a positive term with a negative one into an orthogonal branch,
/// leaving whatever part of the larger term is not needed. `pos` and `neg`
/// are canonical term indices of live terms.
std::pair<TermLedger, BranchRecord> pair_terms(const TermLedger& ledger, std::size_t pos,
                                               std::size_t neg);

struct BranchPlan {
    std::vector<BranchRecord> orthogonal;
    std::vector<LedgerTerm> residual;
    std::size_t pairings = 0;
};

BranchPlan resolve_signs(const CanonicalForm& form);

// ---------------------------------------------------------------------------
// Compilation

/// Perfect LOCC discrimination of orthogonal states (|<phi|psi>| <= 1e-10).
ProtocolTree compile_orthogonal(const PureState& phi, const PureState& psi);

/// Optimal unambiguous LOCC discrimination at equal priors.
ProtocolTree compile(const PureState& phi, const PureState& psi);

inline constexpr double kOrthogonalGate = 1e-10;

// ---------------------------------------------------------------------------
// Validation

struct NodeCheck {
    std::string path;
    double completeness = 0.0;
    double isometry = 0.0;
    double min_eigenvalue = 0.0;
};

struct ValidationReport {
    bool pass = true;
    std::vector<NodeCheck> nodes;
    std::vector<std::string> failures;
    double max_completeness_residual = 0.0;
    double max_isometry_residual = 0.0;
    double min_effect_eigenvalue = 0.0;
    double max_hermiticity_residual = 0.0;
};

inline constexpr double kCompletenessTol = 1e-10;
inline constexpr double kIsometryTol = 1e-12;
inline constexpr double kPositivityTol = 1e-10;
inline constexpr double kHermiticityTol = 1e-12;

ValidationReport validate_protocol(const ProtocolTree& tree);
ValidationReport validate_povm(const PovmElementSet& povm);

} // namespace locc

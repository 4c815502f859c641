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

#include "locc/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <thread>

namespace locc {

namespace {

struct Branch {
    Vector state;
    PartySpace space;
};

// K_k (V) |v> for outcome k.
Vector apply_outcome(const MeasureNode& node, std::size_t k, const PartySpace& space, const Vector& v,
                     const Vector* lifted, const PartySpace* lifted_space) {
    if (node.isometry)
        return apply_local(node.operators[k], node.party, *lifted_space, *lifted);
    return apply_local(node.operators[k], node.party, space, v);
}

void check_node_shape(const MeasureNode& node, const PartySpace& space) {
    if (node.party >= space.parties())
        throw ShapeError("protocol node addresses party " + std::to_string(node.party) +
                         " but the state has " + std::to_string(space.parties()) + " parties");
    const auto d = static_cast<Eigen::Index>(space.dim(node.party));
    const Eigen::Index expect_cols = node.isometry ? node.isometry->matrix.cols() : d;
    if (expect_cols != d)
        throw ShapeError("protocol isometry does not match party dimension");
    for (const auto& op : node.operators)
        if (op.rows() != d)
            throw ShapeError("protocol operator output does not match party dimension");
}

PartySpace lifted_space_of(const MeasureNode& node, const PartySpace& space) {
    std::vector<std::size_t> dims = space.dims();
    dims[node.party] = static_cast<std::size_t>(node.isometry->matrix.rows());
    return PartySpace(std::move(dims));
}

void traverse(const ProtocolTree& tree, const Vector& phi, const Vector& psi, const PartySpace& space,
              const std::string& path, EvaluationReport& rep) {
    const double pp = phi.squaredNorm();
    const double pq = psi.squaredNorm();
    if (tree.is_leaf()) {
        const Verdict v = tree.verdict();
        rep.branches.push_back({path, v, pp, pq});
        switch (v) {
        case Verdict::Phi:
            rep.p_conclusive_phi += pp;
            rep.p_error_psi += pq;
            break;
        case Verdict::Psi:
            rep.p_error_phi += pp;
            rep.p_conclusive_psi += pq;
            break;
        case Verdict::Inconclusive:
            rep.p_inconclusive_phi += pp;
            rep.p_inconclusive_psi += pq;
            break;
        }
        return;
    }
    const MeasureNode& node = tree.node();
    check_node_shape(node, space);
    Vector lifted_phi, lifted_psi;
    PartySpace lifted;
    if (node.isometry) {
        lifted = lifted_space_of(node, space);
        lifted_phi = apply_local(node.isometry->matrix, node.party, space, phi);
        lifted_psi = apply_local(node.isometry->matrix, node.party, space, psi);
    }
    const bool root = path == "root";
    for (std::size_t k = 0; k < node.operators.size(); ++k) {
        Vector next_phi = apply_outcome(node, k, space, phi, &lifted_phi, &lifted);
        Vector next_psi = apply_outcome(node, k, space, psi, &lifted_psi, &lifted);
        const double np = next_phi.squaredNorm();
        const double nq = next_psi.squaredNorm();
        if (root) {
            rep.root_phi.push_back(np);
            rep.root_psi.push_back(nq);
        }
        if (np < kPrunePathProbability)
            next_phi.setZero();
        if (nq < kPrunePathProbability)
            next_psi.setZero();
        if (np < kPrunePathProbability && nq < kPrunePathProbability)
            continue;
        traverse(node.branches[k], next_phi, next_psi, space, path + "/" + std::to_string(k), rep);
    }
}

// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

// Counter-based stream: draw j of shot k is a pure function of (seed, k, j).
class ShotStream {
  public:
    ShotStream(std::uint64_t seed, std::uint64_t shot) : key_(mix64(mix64(seed) ^ (shot * kGolden + 1))) {}

    double uniform() {
        const std::uint64_t bits = mix64(key_ + (++counter_) * kGolden);
        return static_cast<double>(bits >> 11) * 0x1.0p-53;
    }

  private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

enum class ShotOutcome { Phi, Psi, Inconclusive, Aborted };

ShotOutcome run_one(const ProtocolTree& root, const PureState& prepared, ShotStream& rng) {
    Vector state = prepared.amplitudes();
    const PartySpace& space = prepared.space();
    const ProtocolTree* tree = &root;
    std::vector<Vector> candidates;
    while (!tree->is_leaf()) {
        const MeasureNode& node = tree->node();
        check_node_shape(node, space);
        Vector lifted;
        PartySpace lifted_sp;
        if (node.isometry) {
            lifted_sp = lifted_space_of(node, space);
            lifted = apply_local(node.isometry->matrix, node.party, space, state);
        }
        candidates.clear();
        double total = 0.0;
        for (std::size_t k = 0; k < node.operators.size(); ++k) {
            candidates.push_back(apply_outcome(node, k, space, state, &lifted, &lifted_sp));
            total += candidates.back().squaredNorm();
        }
        const double u = rng.uniform() * total;
        double acc = 0.0;
        std::size_t pick = candidates.size();
        for (std::size_t k = 0; k < candidates.size(); ++k) {
            const double p = candidates[k].squaredNorm();
            if (p <= 0.0)
                continue;
            acc += p;
            pick = k;
            if (u < acc)
                break;
        }
        if (pick == candidates.size())
            return ShotOutcome::Aborted;
        const double norm = candidates[pick].norm();
        if (!(norm > 0.0))
            return ShotOutcome::Aborted;
        state = candidates[pick] / norm;
        tree = &node.branches[pick];
    }
    switch (tree->verdict()) {
    case Verdict::Phi:
        return ShotOutcome::Phi;
    case Verdict::Psi:
        return ShotOutcome::Psi;
    case Verdict::Inconclusive:
        return ShotOutcome::Inconclusive;
    }
    return ShotOutcome::Aborted;
}

void check_tree_shape(const ProtocolTree& tree, const PartySpace& space) {
    if (tree.is_leaf())
        return;
    const MeasureNode& node = tree.node();
    check_node_shape(node, space);
    for (const auto& b : node.branches)
        check_tree_shape(b, space);
}

ShotCounts run_range(const ProtocolTree& tree, const PureState& prepared, std::uint64_t begin,
                     std::uint64_t end, std::uint64_t seed) {
    ShotCounts c;
    for (std::uint64_t k = begin; k < end; ++k) {
        ShotStream rng(seed, k);
        switch (run_one(tree, prepared, rng)) {
        case ShotOutcome::Phi:
            ++c.phi;
            break;
        case ShotOutcome::Psi:
            ++c.psi;
            break;
        case ShotOutcome::Inconclusive:
            ++c.inconclusive;
            break;
        case ShotOutcome::Aborted:
            ++c.aborted;
            break;
        }
    }
    return c;
}

} // namespace

EvaluationReport evaluate_exact(const ProtocolTree& tree, const PureState& phi, const PureState& psi) {
    if (phi.space() != psi.space())
        throw ShapeError("evaluate_exact: states live in different party spaces");
    EvaluationReport rep;
    traverse(tree, phi.amplitudes(), psi.amplitudes(), phi.space(), "root", rep);
    rep.overlap = std::abs(inner_product(phi, psi));
    rep.bound = 1.0 - rep.overlap;
    rep.optimality_residual = std::abs(rep.mean_conclusive() - rep.bound);
    return rep;
}

std::uint64_t ShotCounts::count(Verdict v) const {
    switch (v) {
    case Verdict::Phi:
        return phi;
    case Verdict::Psi:
        return psi;
    case Verdict::Inconclusive:
        return inconclusive;
    }
    return 0;
}

ShotCounts run_shots(const ProtocolTree& tree, const PureState& prepared, std::uint64_t shots,
                     std::uint64_t seed, unsigned workers) {
    if (shots == 0)
        throw PreconditionError("run_shots needs at least one shot");
    // Shape errors must surface here, not inside a worker thread.
    check_tree_shape(tree, prepared.space());
    if (workers == 0)
        workers = std::max(1u, std::thread::hardware_concurrency());
    workers = static_cast<unsigned>(std::min<std::uint64_t>(workers, shots));

    std::vector<ShotCounts> partial(workers);
    if (workers == 1) {
        partial[0] = run_range(tree, prepared, 0, shots, seed);
    } else {
        std::vector<std::jthread> pool;
        const std::uint64_t chunk = (shots + workers - 1) / workers;
        for (unsigned w = 0; w < workers; ++w) {
            const std::uint64_t begin = std::min<std::uint64_t>(shots, w * chunk);
            const std::uint64_t end = std::min<std::uint64_t>(shots, begin + chunk);
            pool.emplace_back([&, w, begin, end] { partial[w] = run_range(tree, prepared, begin, end, seed); });
        }
    }
    ShotCounts total;
    for (const auto& c : partial) {
        total.phi += c.phi;
        total.psi += c.psi;
        total.inconclusive += c.inconclusive;
        total.aborted += c.aborted;
    }
    total.shots = shots;
    total.seed = seed;
    return total;
}

OptimalityVerdict check_optimality(const EvaluationReport& report, double tol) {
    if (!(tol > 0.0))
        throw PreconditionError("check_optimality: tolerance must be positive");
    OptimalityVerdict v;
    v.tol = tol;
    v.optimality_residual = report.optimality_residual;
    v.max_error = report.max_error();
    const bool optimal = v.optimality_residual <= tol;
    const bool unambiguous = v.max_error <= tol / 10.0;
    v.pass = optimal && unambiguous;
    std::ostringstream os;
    if (v.pass)
        os << "optimal within " << tol;
    else {
        if (!optimal)
            os << "optimality residual " << v.optimality_residual << " exceeds " << tol;
        if (!unambiguous)
            os << (optimal ? "" : "; ") << "misidentification " << v.max_error << " exceeds " << tol / 10.0;
    }
    v.message = os.str();
    return v;
}

} // namespace locc

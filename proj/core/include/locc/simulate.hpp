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

#include <cstdint>
#include <string>
#include <vector>

#include "locc/protocols.hpp"
#include "locc/statespace.hpp"

namespace locc {

struct BranchProbability {
    std::string path; ///< "root/<outcome>/<outcome>..." down to a verdict leaf
    Verdict verdict = Verdict::Inconclusive;
    double p_phi = 0.0;
    double p_psi = 0.0;
};

struct EvaluationReport {
    double p_conclusive_phi = 0.0;
    double p_conclusive_psi = 0.0;
    double p_error_phi = 0.0; ///< P(verdict psi | phi prepared)
    double p_error_psi = 0.0; ///< P(verdict phi | psi prepared)
    double p_inconclusive_phi = 0.0;
    double p_inconclusive_psi = 0.0;
    double overlap = 0.0; ///< |<phi|psi>|
    double bound = 0.0;   ///< 1 - |<phi|psi>|
    double optimality_residual = 0.0;
    std::vector<BranchProbability> branches;
    /// Outcome probabilities of the root measurement (empty for a leaf root).
    std::vector<double> root_phi;
    std::vector<double> root_psi;

    double mean_conclusive() const { return 0.5 * (p_conclusive_phi + p_conclusive_psi); }
    double max_error() const { return p_error_phi > p_error_psi ? p_error_phi : p_error_psi; }
};

/// Paths whose probability falls below this are dropped from the traversal.
inline constexpr double kPrunePathProbability = 1e-14;

EvaluationReport evaluate_exact(const ProtocolTree& tree, const PureState& phi, const PureState& psi);

struct ShotCounts {
    std::uint64_t phi = 0;
    std::uint64_t psi = 0;
    std::uint64_t inconclusive = 0;
    /// Shots that sampled a branch of numerically zero norm.
    std::uint64_t aborted = 0;
    std::uint64_t shots = 0;
    std::uint64_t seed = 0;

    std::uint64_t count(Verdict v) const;
    friend bool operator==(const ShotCounts&, const ShotCounts&) = default;
};

/// Samples `shots` independent runs of the protocol. The random stream of
/// shot k depends only on (seed, k), so the counts do not depend on
/// `workers` (0 = hardware concurrency).
ShotCounts run_shots(const ProtocolTree& tree, const PureState& prepared, std::uint64_t shots,
                     std::uint64_t seed, unsigned workers = 0);

struct OptimalityVerdict {
    bool pass = false;
    double tol = 0.0;
    double optimality_residual = 0.0;
    double max_error = 0.0;
    std::string message;
};

/// Passes iff the optimality residual is within tol and no misidentification
/// probability exceeds tol / 10.
OptimalityVerdict check_optimality(const EvaluationReport& report, double tol);

} // namespace locc

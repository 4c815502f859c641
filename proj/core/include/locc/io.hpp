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
 * @file io.hpp
 * JSON file formats.
 *
 * State-pair file:
 *   {"dims": [2, 2], "phi": [[re, im], ...], "psi": [[re, im], ...]}
 * amplitudes row-major with party 0 slowest.
 *
 * Protocol file: a recursive node object,
 *   {"kind": "measure", "party": p, "operators": [M, ...],
 *    "branches": {"0": node, "1": node, ...},
 *    "isometry": M, "ancilla_dim": m}          (last two optional)
 *   {"kind": "verdict", "verdict": "phi" | "psi" | "inconclusive"}
 * where a complex matrix M is an array of rows of [re, im] pairs and branch
 * "k" follows operator k.
 *
 * Writers emit sorted keys, shortest round-trip decimals and a trailing
 * newline. Readers throw ParseError on malformed input.
 */

#include <string>
#include <string_view>

#include "locc/canonical.hpp"
#include "locc/protocols.hpp"
#include "locc/simulate.hpp"
#include "locc/statespace.hpp"

namespace locc {

struct StatePair {
    PureState phi;
    PureState psi;
};

StatePair parse_state_pair(std::string_view text);
std::string state_pair_to_json(const PureState& phi, const PureState& psi);

ProtocolTree parse_protocol(std::string_view text);
std::string protocol_to_json(const ProtocolTree& tree);

std::string canonical_to_json(const CanonicalForm& form);

std::string report_to_json(const EvaluationReport& report, const OptimalityVerdict& verdict);
std::string shots_to_json(const ShotCounts& counts, Verdict prepared, const EvaluationReport& exact);

/// Reads a whole file; throws ParseError if it cannot be opened.
std::string read_file(const std::string& path);
/// Writes `text` to `path`; throws std::runtime_error on failure.
void write_file(const std::string& path, const std::string& text);

} // namespace locc

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
 * @file canonical.hpp
 * Equal-weight, phase-aligned form of a state pair across one cut.
 *
 * Given |phi>, |psi> and a cut party, canonicalize() finds a local unitary W on
 * that party such that
 *
 *     (W (x) I)|phi> = sum_i sqrt(t_i) |i>|mu_i>,
 *     (W (x) I)|psi> = sum_i sqrt(t_i) |i>|nu_i>,
 *
 * with every <mu_i|nu_i> real up to the global phase of <phi|psi>. All the
 * work is done with 2x2 rotations of the form
 *
 *     [ cos t          sin t e^{iw} ]
 *     [ sin t e^{-iw}  -cos t       ]
 *
 * where w is fixed by a reality constraint and t by a weight constraint.
 */

#include <cstddef>
#include <optional>
#include <vector>

#include "locc/statespace.hpp"

namespace locc {

struct PairRotation {
    std::size_t i = 0;
    std::size_t j = 0;
    double theta = 0.0;
    double omega = 0.0;

    Eigen::Matrix2cd matrix() const;
};

/// Left-multiplies rows i and j of `m` by the rotation.
void apply_rows(const PairRotation& rot, Matrix& m);

/// Angle w with Im(a e^{-iw} + b e^{iw}) = 0, folded into (-pi/2, pi/2].
/// Returns 0 when the constraint is vacuous.
double solve_omega(complex a, complex b);

/// Angle t with C + A cos 2t + B sin 2t = 0. Of the two solutions the one
/// with the smaller residual is returned (smaller |t| on a tie).
/// Throws PreconditionError when |C| exceeds sqrt(A^2 + B^2).
double solve_theta(double a, double b, double c);

/// |C + A cos 2t + B sin 2t|
double theta_residual(double a, double b, double c, double theta);

/// Unitary W such that every diagonal entry of W M W^dagger equals tr(M)/n.
Matrix constant_diagonal_unitary(const Matrix& m);

struct CanonicalTerm {
    double weight = 0.0;
    std::optional<Vector> mu; ///< absent for zero-weight terms
    std::optional<Vector> nu; ///< carries the phase of the original psi
    double rho = 0.0;         ///< Re(e^{-i global_phase} <mu|nu>)
    int sign = 0;             ///< +1, -1, or 0 inside the dead zone
};

struct CanonicalDiagnostics {
    std::vector<PairRotation> rotations;
    /// Largest |Im| of an aligned diagonal overlap observed after any rotation.
    double max_phase_residual = 0.0;
    /// max_i |r_i - s_i| on output.
    double weight_gap = 0.0;
    bool used_constant_diagonal = false;
};

struct CanonicalForm {
    std::size_t cut_party = 0;
    Matrix alice_unitary;
    std::vector<CanonicalTerm> terms;
    double global_phase = 0.0;
    PartySpace complement;
    CanonicalDiagnostics diagnostics;

    std::vector<double> weights() const;
    std::vector<double> rhos() const;
};

/// Sign dead zone for aligned overlaps.
inline constexpr double kSignDeadZone = 1e-12;
/// Weight gap below which the equalizing sweep stops.
inline constexpr double kEqualizeTol = 1e-12;

/// Requires |<phi|psi>| > 1e-12.
CanonicalForm canonicalize(const PureState& phi, const PureState& psi, std::size_t party);

} // namespace locc

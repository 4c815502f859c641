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
 * @file statespace.hpp
 * Dense pure states over a tensor product of party spaces.
 *
 * Amplitudes are indexed row-major over the party multi-index with party 0
 * varying slowest, i.e. for dims (d0, d1, d2) the amplitude of |i j k> sits
 * at (i * d1 + j) * d2 + k. Every reshape in the library follows this layout.
 */

#include <complex>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "locc/errors.hpp"

namespace locc {

using complex = std::complex<double>;
using Vector = Eigen::VectorXcd;
using Matrix = Eigen::MatrixXcd;

/// Tolerance applied to the norm of externally supplied amplitudes.
inline constexpr double kIngestNormTol = 1e-8;

class PartySpace {
  public:
    PartySpace() = default;
    explicit PartySpace(std::vector<std::size_t> dims);

    const std::vector<std::size_t>& dims() const noexcept { return dims_; }
    std::size_t parties() const noexcept { return dims_.size(); }
    std::size_t dim(std::size_t party) const { return dims_.at(party); }
    std::size_t total() const noexcept { return total_; }

    /// Product of all dims except `party`.
    std::size_t complement_dim(std::size_t party) const;
    /// The space of every party except `party`, in order.
    PartySpace complement(std::size_t party) const;
    /// Parties [first, parties()).
    PartySpace tail(std::size_t first) const;

    friend bool operator==(const PartySpace&, const PartySpace&) = default;

  private:
    std::vector<std::size_t> dims_;
    std::size_t total_ = 0;
};

/// A unit vector in a PartySpace. Immutable after construction.
class PureState {
  public:
    /// Rejects amplitudes whose norm is off by more than kIngestNormTol,
    /// then renormalizes.
    PureState(PartySpace space, Vector amplitudes);

    /// Normalizes any nonzero vector without the ingestion tolerance check.
    static PureState normalized(PartySpace space, const Vector& amplitudes);

    const PartySpace& space() const noexcept { return space_; }
    const Vector& amplitudes() const noexcept { return amps_; }

  private:
    PartySpace space_;
    Vector amps_;
};

/// <a|b>, conjugate-linear in `a`.
complex inner_product(const PureState& a, const PureState& b);

/// Rows index the local basis of `party`; columns run row-major over the
/// remaining parties.
Matrix as_party_matrix(const Vector& amps, const PartySpace& space, std::size_t party);
/// Inverse of as_party_matrix. `mat.rows()` replaces dims[party].
Vector from_party_matrix(const Matrix& mat, const PartySpace& space, std::size_t party);

/// Overlap operator Tr_complement(|psi><phi|) on `party`; its trace is <phi|psi>.
Matrix overlap_operator(const PureState& psi, const PureState& phi, std::size_t party);

struct StatePairDecomposition {
    std::size_t party = 0;
    Matrix alice_basis; ///< columns are |e_i>
    std::vector<double> r;
    std::vector<double> s;
    std::vector<std::optional<Vector>> eta;   ///< absent where r_i vanishes
    std::vector<std::optional<Vector>> gamma; ///< absent where s_i vanishes
    PartySpace complement;

    /// sum_i sqrt(w_i) |e_i> (x) |v_i>, placed back at `party`.
    Vector reassemble(const PartySpace& space, const std::vector<double>& weights,
                      const std::vector<std::optional<Vector>>& vectors) const;
};

/// Expands both states against an orthonormal basis (columns of `basis`) on `party`.
StatePairDecomposition decompose_pair(const PureState& phi, const PureState& psi,
                                      std::size_t party, const Matrix& basis);

/// Applies `op` to the `party` tensor factor of a raw amplitude vector. The
/// operator may be rectangular; the result lives in `space` with dims[party]
/// replaced by op.rows().
Vector apply_local(const Matrix& op, std::size_t party, const PartySpace& space,
                   const Vector& amps);

/// Same, for a state. The operator must be an isometry (op^dagger op = I
/// within 1e-12) so that the result is again a unit vector.
PureState apply_local(const Matrix& op, std::size_t party, const PureState& state);

/// Largest |(M^dagger M - I)_{ij}|.
double isometry_residual(const Matrix& m);

struct SchmidtDecomposition {
    std::vector<double> coefficients; ///< nonincreasing
    Matrix left_basis;                ///< columns on the cut party
    Matrix right_basis;               ///< columns on the complement
};

/// Schmidt decomposition across `cut` vs. everything else. Coefficients below
/// 1e-13 are dropped.
SchmidtDecomposition schmidt(const PureState& state, std::size_t cut);

/// Haar-random pure state (normalized complex Gaussian amplitudes).
PureState random_state(const PartySpace& space, std::uint64_t seed);

/// phi Haar-random, psi = e^{i chi}(c phi + sqrt(1-c^2) phi_perp) with
/// |<phi|psi>| = c = target_overlap.
std::pair<PureState, PureState> random_pair(const PartySpace& space, double target_overlap,
                                            std::uint64_t seed);

/// Haar-random n x n unitary (QR of a Ginibre matrix with phase fix).
Matrix random_unitary(std::size_t n, std::uint64_t seed);

} // namespace locc

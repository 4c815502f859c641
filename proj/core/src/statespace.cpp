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

#include "locc/statespace.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>
#include <string>

namespace locc {

namespace {

std::string dims_string(const std::vector<std::size_t>& dims) {
    std::ostringstream os;
    os << '(';
    for (std::size_t k = 0; k < dims.size(); ++k)
        os << (k ? "," : "") << dims[k];
    os << ')';
    return os.str();
}

void require_same_space(const PureState& a, const PureState& b) {
    if (a.space() != b.space())
        throw ShapeError("state spaces differ: " + dims_string(a.space().dims()) + " vs " +
                         dims_string(b.space().dims()));
}

void require_party(const PartySpace& space, std::size_t party) {
    if (party >= space.parties())
        throw ShapeError("party index " + std::to_string(party) + " out of range for " +
                         std::to_string(space.parties()) + " parties");
}

// Stride of `party` in the row-major layout.
std::size_t stride_of(const PartySpace& space, std::size_t party) {
    std::size_t stride = 1;
    for (std::size_t k = party + 1; k < space.parties(); ++k)
        stride *= space.dim(k);
    return stride;
}

Vector gaussian_vector(std::size_t n, std::mt19937_64& rng) {
    std::normal_distribution<double> normal(0.0, 1.0);
    Vector v(static_cast<Eigen::Index>(n));
    for (auto& a : v) {
        const double re = normal(rng);
        const double im = normal(rng);
        a = complex(re, im);
    }
    return v;
}

} // namespace

PartySpace::PartySpace(std::vector<std::size_t> dims) : dims_(std::move(dims)) {
    if (dims_.empty())
        throw ShapeError("party space needs at least one party");
    total_ = 1;
    for (auto d : dims_) {
        if (d == 0)
            throw ShapeError("party dimensions must be >= 1");
        total_ *= d;
    }
}

std::size_t PartySpace::complement_dim(std::size_t party) const {
    return total_ / dims_.at(party);
}

PartySpace PartySpace::complement(std::size_t party) const {
    std::vector<std::size_t> rest;
    for (std::size_t k = 0; k < dims_.size(); ++k)
        if (k != party)
            rest.push_back(dims_[k]);
    if (rest.empty())
        rest.push_back(1);
    return PartySpace(std::move(rest));
}

PartySpace PartySpace::tail(std::size_t first) const {
    if (first >= dims_.size())
        throw ShapeError("tail start beyond last party");
    return PartySpace(std::vector<std::size_t>(dims_.begin() + static_cast<std::ptrdiff_t>(first),
                                               dims_.end()));
}

PureState::PureState(PartySpace space, Vector amplitudes)
    : space_(std::move(space)), amps_(std::move(amplitudes)) {
    if (static_cast<std::size_t>(amps_.size()) != space_.total())
        throw ShapeError("amplitude count " + std::to_string(amps_.size()) +
                         " does not match total dimension " + std::to_string(space_.total()));
    const double norm = amps_.norm();
    if (!std::isfinite(norm) || std::abs(norm - 1.0) > kIngestNormTol)
        throw PreconditionError("state norm " + std::to_string(norm) +
                                " deviates from 1 by more than 1e-8");
    amps_ /= norm;
}

PureState PureState::normalized(PartySpace space, const Vector& amplitudes) {
    const double norm = amplitudes.norm();
    if (!(norm > 0.0) || !std::isfinite(norm))
        throw PreconditionError("cannot normalize a zero or non-finite vector");
    return PureState(std::move(space), amplitudes / norm);
}

complex inner_product(const PureState& a, const PureState& b) {
    require_same_space(a, b);
    return a.amplitudes().dot(b.amplitudes());
}

Matrix as_party_matrix(const Vector& amps, const PartySpace& space, std::size_t party) {
    require_party(space, party);
    if (static_cast<std::size_t>(amps.size()) != space.total())
        throw ShapeError("vector length does not match party space");
    const std::size_t d = space.dim(party);
    const std::size_t stride = stride_of(space, party);
    const std::size_t rest = space.complement_dim(party);
    Matrix mat(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(rest));
    for (std::size_t idx = 0; idx < space.total(); ++idx) {
        const std::size_t local = (idx / stride) % d;
        const std::size_t col = (idx / (stride * d)) * stride + idx % stride;
        mat(static_cast<Eigen::Index>(local), static_cast<Eigen::Index>(col)) =
            amps(static_cast<Eigen::Index>(idx));
    }
    return mat;
}

Vector from_party_matrix(const Matrix& mat, const PartySpace& space, std::size_t party) {
    require_party(space, party);
    const std::size_t rest = space.complement_dim(party);
    if (static_cast<std::size_t>(mat.cols()) != rest)
        throw ShapeError("party matrix has wrong number of columns");
    const std::size_t d = static_cast<std::size_t>(mat.rows());
    const std::size_t stride = stride_of(space, party);
    Vector out(static_cast<Eigen::Index>(d * rest));
    for (std::size_t col = 0; col < rest; ++col) {
        const std::size_t high = col / stride;
        const std::size_t low = col % stride;
        for (std::size_t local = 0; local < d; ++local) {
            const std::size_t idx = (high * d + local) * stride + low;
            out(static_cast<Eigen::Index>(idx)) =
                mat(static_cast<Eigen::Index>(local), static_cast<Eigen::Index>(col));
        }
    }
    return out;
}

Matrix overlap_operator(const PureState& psi, const PureState& phi, std::size_t party) {
    require_same_space(psi, phi);
    require_party(psi.space(), party);
    const Matrix psi_m = as_party_matrix(psi.amplitudes(), psi.space(), party);
    const Matrix phi_m = as_party_matrix(phi.amplitudes(), phi.space(), party);
    return psi_m * phi_m.adjoint();
}

Vector StatePairDecomposition::reassemble(const PartySpace& space,
                                          const std::vector<double>& weights,
                                          const std::vector<std::optional<Vector>>& vectors) const {
    const Eigen::Index rest = static_cast<Eigen::Index>(space.complement_dim(party));
    Matrix mat = Matrix::Zero(alice_basis.rows(), rest);
    for (std::size_t i = 0; i < weights.size(); ++i) {
        if (!vectors[i])
            continue;
        mat += std::sqrt(weights[i]) * alice_basis.col(static_cast<Eigen::Index>(i)) *
               vectors[i]->transpose();
    }
    return from_party_matrix(mat, space, party);
}

StatePairDecomposition decompose_pair(const PureState& phi, const PureState& psi,
                                      std::size_t party, const Matrix& basis) {
    require_same_space(phi, psi);
    require_party(phi.space(), party);
    const auto d = static_cast<Eigen::Index>(phi.space().dim(party));
    if (basis.rows() != d || basis.cols() != d)
        throw ShapeError("basis must be a square matrix of the party dimension");
    const double ortho =
        (basis.adjoint() * basis - Matrix::Identity(d, d)).cwiseAbs().maxCoeff();
    if (ortho > 1e-10)
        throw PreconditionError("basis is not orthonormal (residual " + std::to_string(ortho) + ")");

    StatePairDecomposition out;
    out.party = party;
    out.alice_basis = basis;
    out.complement = phi.space().complement(party);

    // Row i of basis^dagger * Phi is (<e_i| (x) I)|phi>.
    const Matrix phi_rows = basis.adjoint() * as_party_matrix(phi.amplitudes(), phi.space(), party);
    const Matrix psi_rows = basis.adjoint() * as_party_matrix(psi.amplitudes(), psi.space(), party);

    auto split = [](const Matrix& rows, std::vector<double>& w, std::vector<std::optional<Vector>>& v) {
        for (Eigen::Index i = 0; i < rows.rows(); ++i) {
            const double n2 = rows.row(i).squaredNorm();
            w.push_back(n2);
            if (n2 > 1e-28)
                v.emplace_back(Vector(rows.row(i).transpose() / std::sqrt(n2)));
            else
                v.emplace_back(std::nullopt);
        }
    };
    split(phi_rows, out.r, out.eta);
    split(psi_rows, out.s, out.gamma);
    return out;
}

Vector apply_local(const Matrix& op, std::size_t party, const PartySpace& space,
                   const Vector& amps) {
    require_party(space, party);
    if (static_cast<std::size_t>(op.cols()) != space.dim(party))
        throw ShapeError("operator has " + std::to_string(op.cols()) +
                         " columns but party " + std::to_string(party) + " has dimension " +
                         std::to_string(space.dim(party)));
    const Matrix mat = as_party_matrix(amps, space, party);
    std::vector<std::size_t> out_dims = space.dims();
    out_dims[party] = static_cast<std::size_t>(op.rows());
    return from_party_matrix(op * mat, PartySpace(std::move(out_dims)), party);
}

double isometry_residual(const Matrix& m) {
    if (m.size() == 0)
        return 0.0;
    return (m.adjoint() * m - Matrix::Identity(m.cols(), m.cols())).cwiseAbs().maxCoeff();
}

PureState apply_local(const Matrix& op, std::size_t party, const PureState& state) {
    if (op.rows() < op.cols())
        throw ShapeError("isometric embedding needs rows >= cols");
    const double res = isometry_residual(op);
    if (res > 1e-12)
        throw PreconditionError("operator is not an isometry (residual " + std::to_string(res) + ")");
    std::vector<std::size_t> out_dims = state.space().dims();
    out_dims.at(party) = static_cast<std::size_t>(op.rows());
    Vector out = apply_local(op, party, state.space(), state.amplitudes());
    return PureState::normalized(PartySpace(std::move(out_dims)), out);
}

SchmidtDecomposition schmidt(const PureState& state, std::size_t cut) {
    const Matrix mat = as_party_matrix(state.amplitudes(), state.space(), cut);
    Eigen::JacobiSVD<Matrix> svd(mat, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& sv = svd.singularValues();
    SchmidtDecomposition out;
    Eigen::Index keep = 0;
    while (keep < sv.size() && sv(keep) > 1e-13)
        ++keep;
    out.coefficients.assign(sv.data(), sv.data() + keep);
    out.left_basis = svd.matrixU().leftCols(keep);
    // mat = U S V^dagger, so the complement vectors are the conjugated columns of V.
    out.right_basis = svd.matrixV().leftCols(keep).conjugate();
    return out;
}

PureState random_state(const PartySpace& space, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    Vector v = gaussian_vector(space.total(), rng);
    return PureState::normalized(space, v);
}

std::pair<PureState, PureState> random_pair(const PartySpace& space, double target_overlap,
                                            std::uint64_t seed) {
    if (!(target_overlap >= 0.0 && target_overlap <= 1.0))
        throw PreconditionError("target overlap must lie in [0, 1]");
    std::mt19937_64 rng(seed);
    const Vector phi = gaussian_vector(space.total(), rng).normalized();

    Vector perp = Vector::Zero(phi.size());
    if (space.total() > 1) {
        // Re-draw in the (measure-zero) event that the draw is parallel to phi.
        for (int attempt = 0; attempt < 16 && perp.norm() < 1e-6; ++attempt) {
            perp = gaussian_vector(space.total(), rng);
            perp -= phi.dot(perp) * phi;
        }
        perp.normalize();
        perp -= phi.dot(perp) * phi;
        perp.normalize();
    } else if (target_overlap < 1.0) {
        throw PreconditionError("a one-dimensional space admits no overlap below 1");
    }

    std::uniform_real_distribution<double> uniform(0.0, 2.0 * std::numbers::pi);
    const double chi = uniform(rng);
    const double c = target_overlap;
    const double c_perp = std::sqrt(std::max(0.0, 1.0 - c * c));
    Vector psi = std::polar(1.0, chi) * (c * phi + c_perp * perp);
    return {PureState::normalized(space, phi), PureState::normalized(space, psi)};
}

Matrix random_unitary(std::size_t n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    Matrix g(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (Eigen::Index j = 0; j < g.cols(); ++j)
        g.col(j) = gaussian_vector(n, rng);
    Eigen::HouseholderQR<Matrix> qr(g);
    Matrix q = qr.householderQ();
    const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (Eigen::Index j = 0; j < q.cols(); ++j) {
        const complex d = r(j, j);
        if (std::abs(d) > 0.0)
            q.col(j) *= d / std::abs(d);
    }
    return q;
}

} // namespace locc

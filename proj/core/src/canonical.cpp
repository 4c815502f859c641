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

#include "locc/canonical.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <string>

namespace locc {

namespace {

constexpr double kPi = std::numbers::pi;

// m <- m U^dagger restricted to columns i, j.
void apply_cols_adjoint(const PairRotation& rot, Matrix& m) {
    const Eigen::Matrix2cd u = rot.matrix();
    const auto i = static_cast<Eigen::Index>(rot.i);
    const auto j = static_cast<Eigen::Index>(rot.j);
    const Vector ci = m.col(i);
    const Vector cj = m.col(j);
    m.col(i) = ci * std::conj(u(0, 0)) + cj * std::conj(u(0, 1));
    m.col(j) = ci * std::conj(u(1, 0)) + cj * std::conj(u(1, 1));
}

void conjugate_by(const PairRotation& rot, Matrix& m) {
    apply_rows(rot, m);
    apply_cols_adjoint(rot, m);
}

// Rotation on (i, j) moving the (i, i) entry of m to m_ii + lambda (m_jj - m_ii),
// lambda in [0, 1]. The 2x2 numerical range contains that whole segment.
PairRotation rotation_to_segment(const Matrix& m, std::size_t i, std::size_t j, double lambda) {
    const auto ii = static_cast<Eigen::Index>(i);
    const auto jj = static_cast<Eigen::Index>(j);
    const complex x = m(ii, ii);
    const complex t = m(jj, jj);
    const complex y = m(ii, jj);
    const complex z = m(jj, ii);
    const complex d = t - x;

    PairRotation rot{i, j, 0.0, 0.0};
    if (std::abs(d) == 0.0)
        return rot;
    // Make the cross term y e^{-iw} + z e^{iw} parallel to d, then pick t
    // along the segment.
    rot.omega = solve_omega(y * std::conj(d), z * std::conj(d));
    const complex f = y * std::polar(1.0, -rot.omega) + z * std::polar(1.0, rot.omega);
    const double kappa = (f * std::conj(d)).real() / std::norm(d);
    const double target = std::clamp(lambda, 0.0, 1.0);
    rot.theta = solve_theta(-1.0, kappa, 1.0 - 2.0 * target);
    return rot;
}

struct DiagonalPass {
    // Selects the component of a deviation that this pass drives to zero.
    double (*component)(complex);
};

double imag_part(complex z) { return z.imag(); }
double real_part(complex z) { return z.real(); }

// Zeroes one component of the deviations diag(m) - tau, one index at a time.
void equalize_component(Matrix& m, Matrix& w, complex tau, DiagonalPass pass, double tol) {
    const std::size_t n = static_cast<std::size_t>(m.rows());
    std::vector<bool> fixed(n, false);
    for (std::size_t step = 0; step < n; ++step) {
        std::size_t hi = n, lo = n;
        double hi_val = 0.0, lo_val = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
            if (fixed[k])
                continue;
            const double v = pass.component(m(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k)) - tau);
            if (hi == n || v > hi_val) {
                hi = k;
                hi_val = v;
            }
            if (lo == n || v < lo_val) {
                lo = k;
                lo_val = v;
            }
        }
        if (hi == n || hi_val <= tol || lo_val >= -tol)
            return;
        const double lambda = hi_val / (hi_val - lo_val);
        const PairRotation rot = rotation_to_segment(m, hi, lo, lambda);
        conjugate_by(rot, m);
        apply_rows(rot, w);
        fixed[hi] = true;
    }
}

double max_diag_deviation(const Matrix& m, complex tau) {
    double dev = 0.0;
    for (Eigen::Index k = 0; k < m.rows(); ++k)
        dev = std::max(dev, std::abs(m(k, k) - tau));
    return dev;
}

} // namespace

Eigen::Matrix2cd PairRotation::matrix() const {
    const double c = std::cos(theta);
    const double s = std::sin(theta);
    Eigen::Matrix2cd u;
    u << c, s * std::polar(1.0, omega), s * std::polar(1.0, -omega), -c;
    return u;
}

void apply_rows(const PairRotation& rot, Matrix& m) {
    const Eigen::Matrix2cd u = rot.matrix();
    const auto i = static_cast<Eigen::Index>(rot.i);
    const auto j = static_cast<Eigen::Index>(rot.j);
    const Eigen::RowVectorXcd ri = m.row(i);
    const Eigen::RowVectorXcd rj = m.row(j);
    m.row(i) = u(0, 0) * ri + u(0, 1) * rj;
    m.row(j) = u(1, 0) * ri + u(1, 1) * rj;
}

double solve_omega(complex a, complex b) {
    // Im(a e^{-iw} + b e^{iw}) = (Im a + Im b) cos w + (Re b - Re a) sin w
    const double p = a.imag() + b.imag();
    const double q = b.real() - a.real();
    if (std::abs(p) < 1e-14 && std::abs(q) < 1e-14)
        return 0.0;
    double w = std::atan2(p, -q);
    if (w > kPi / 2)
        w -= kPi;
    else if (w <= -kPi / 2)
        w += kPi;
    return w;
}

double theta_residual(double a, double b, double c, double theta) {
    return std::abs(c + a * std::cos(2 * theta) + b * std::sin(2 * theta));
}

double solve_theta(double a, double b, double c) {
    const double r = std::hypot(a, b);
    if (std::abs(c) > r + 1e-12) {
        std::ostringstream os;
        os << "solve_theta infeasible: |C| = " << std::abs(c) << " exceeds sqrt(A^2+B^2) = " << r;
        throw PreconditionError(os.str());
    }
    if (r == 0.0)
        return 0.0;
    // A cos 2t + B sin 2t = R cos(2t - delta) = -C
    const double delta = std::atan2(b, a);
    const double spread = std::acos(std::clamp(-c / r, -1.0, 1.0));
    auto fold = [](double t) {
        t = std::remainder(t, kPi);
        return t <= -kPi / 2 ? t + kPi : t;
    };
    const double t1 = fold(0.5 * (delta - spread));
    const double t2 = fold(0.5 * (delta + spread));
    const double r1 = theta_residual(a, b, c, t1);
    const double r2 = theta_residual(a, b, c, t2);
    if (std::abs(r1 - r2) <= 1e-15)
        return std::abs(t1) <= std::abs(t2) ? t1 : t2;
    return r1 < r2 ? t1 : t2;
}

Matrix constant_diagonal_unitary(const Matrix& m) {
    if (m.rows() != m.cols() || m.rows() == 0)
        throw ShapeError("constant_diagonal_unitary needs a nonempty square matrix");
    const Eigen::Index n = m.rows();
    Matrix w = Matrix::Identity(n, n);
    if (n == 1)
        return w;
    const complex tau = m.trace() / static_cast<double>(n);
    const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
    const double tol = 1e-15 * scale;

    Matrix work = m;
    // First make every deviation real, then zero the real parts. Each pass
    // fixes one index per rotation, so a pass costs at most n-1 rotations.
    // Extra rounds only mop up rounding.
    for (int round = 0; round < 6; ++round) {
        equalize_component(work, w, tau, DiagonalPass{imag_part}, tol);
        equalize_component(work, w, tau, DiagonalPass{real_part}, tol);
        if (max_diag_deviation(work, tau) < 1e-13 * scale)
            break;
    }
    return w;
}

std::vector<double> CanonicalForm::weights() const {
    std::vector<double> out;
    out.reserve(terms.size());
    for (const auto& t : terms)
        out.push_back(t.weight);
    return out;
}

std::vector<double> CanonicalForm::rhos() const {
    std::vector<double> out;
    out.reserve(terms.size());
    for (const auto& t : terms)
        out.push_back(t.rho);
    return out;
}

CanonicalForm canonicalize(const PureState& phi, const PureState& psi, std::size_t party) {
    const complex overlap = inner_product(phi, psi);
    if (party >= phi.space().parties())
        throw ShapeError("cut party out of range");
    if (std::abs(overlap) <= 1e-12)
        throw PreconditionError("canonicalize requires non-orthogonal states");

    CanonicalForm form;
    form.cut_party = party;
    form.global_phase = std::arg(overlap);
    form.complement = phi.space().complement(party);
    const complex unphase = std::polar(1.0, -form.global_phase);

    // Row k holds the (unnormalized) complement vector attached to |k>.
    Matrix phi_rows = as_party_matrix(phi.amplitudes(), phi.space(), party);
    Matrix psi_rows = as_party_matrix(psi.amplitudes(), psi.space(), party) * unphase;
    const Eigen::Index n = phi_rows.rows();
    Matrix w = Matrix::Identity(n, n);

    auto overlap_matrix = [&] { return Matrix(psi_rows * phi_rows.adjoint()); };
    auto max_diag_imag = [&](const Matrix& c) {
        double v = 0.0;
        for (Eigen::Index k = 0; k < n; ++k)
            v = std::max(v, std::abs(c(k, k).imag()));
        return v;
    };

    // The sweep below needs a real diagonal to start from. Only rotate when
    // the input basis does not already provide one.
    if (max_diag_imag(overlap_matrix()) > 1e-12) {
        const Matrix u = constant_diagonal_unitary(overlap_matrix());
        phi_rows = u * phi_rows;
        psi_rows = u * psi_rows;
        w = u * w;
        form.diagnostics.used_constant_diagonal = true;
    }
    form.diagnostics.max_phase_residual = max_diag_imag(overlap_matrix());

    std::vector<bool> fixed(static_cast<std::size_t>(n), false);
    const std::size_t max_rotations = 10 * static_cast<std::size_t>(n * n);
    for (std::size_t iter = 0;; ++iter) {
        if (iter > max_rotations)
            throw InternalError("canonicalize did not converge after 10 n^2 rotations");
        Eigen::Index hi = -1, lo = -1;
        double hi_gap = 0.0, lo_gap = 0.0;
        for (Eigen::Index k = 0; k < n; ++k) {
            if (fixed[static_cast<std::size_t>(k)])
                continue;
            const double gap = phi_rows.row(k).squaredNorm() - psi_rows.row(k).squaredNorm();
            if (hi < 0 || gap > hi_gap) {
                hi = k;
                hi_gap = gap;
            }
            if (lo < 0 || gap < lo_gap) {
                lo = k;
                lo_gap = gap;
            }
        }
        if (hi < 0 || hi_gap <= kEqualizeTol || lo_gap >= -kEqualizeTol)
            break;

        const Matrix c = overlap_matrix();
        PairRotation rot{static_cast<std::size_t>(hi), static_cast<std::size_t>(lo), 0.0, 0.0};
        rot.omega = solve_omega(c(hi, lo), c(lo, hi));

        // Weight cross terms 2 Re(rho_{hi,lo} e^{-iw}); Eigen's dot conjugates
        // its left operand, hence the conj.
        const complex e = std::polar(1.0, -rot.omega);
        const double x = 2.0 * (std::conj(phi_rows.row(hi).dot(phi_rows.row(lo))) * e).real();
        const double y = 2.0 * (std::conj(psi_rows.row(hi).dot(psi_rows.row(lo))) * e).real();
        const double a = hi_gap - lo_gap;
        const double b = x - y;
        const double cc = hi_gap + lo_gap;
        rot.theta = solve_theta(a, b, cc);

        apply_rows(rot, phi_rows);
        apply_rows(rot, psi_rows);
        apply_rows(rot, w);
        fixed[static_cast<std::size_t>(hi)] = true;
        form.diagnostics.rotations.push_back(rot);
        form.diagnostics.max_phase_residual =
            std::max(form.diagnostics.max_phase_residual, max_diag_imag(overlap_matrix()));
    }

    form.alice_unitary = w;
    const complex rephase = std::polar(1.0, form.global_phase);
    for (Eigen::Index k = 0; k < n; ++k) {
        const double r = phi_rows.row(k).squaredNorm();
        const double s = psi_rows.row(k).squaredNorm();
        form.diagnostics.weight_gap = std::max(form.diagnostics.weight_gap, std::abs(r - s));
        CanonicalTerm term;
        term.weight = 0.5 * (r + s);
        if (r > 1e-28 && s > 1e-28) {
            Vector mu = phi_rows.row(k).transpose() / std::sqrt(r);
            Vector nu_aligned = psi_rows.row(k).transpose() / std::sqrt(s);
            term.rho = mu.dot(nu_aligned).real();
            term.sign = term.rho > kSignDeadZone ? 1 : (term.rho < -kSignDeadZone ? -1 : 0);
            term.mu = std::move(mu);
            term.nu = Vector(nu_aligned * rephase);
        }
        form.terms.push_back(std::move(term));
    }
    return form;
}

} // namespace locc

// Copyright 2026 The VILMA Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// Minimization of a linear functional Re Tr[C M] over Choi matrices of CPTP
// maps: ADMM splitting between the trace-preserving affine set and the PSD
// cone, with a dual certificate bounding the optimality gap.

#include "vilma/core.hpp"

#include <cmath>
#include <limits>
#include <optional>

namespace vilma {

struct SdpOptions {
    int max_iters = 5000;
    double step0 = 1.0;  // initial ADMM penalty step, in units of 1/||M||
    double tol = 1e-9;   // absolute gap target, in units of ||M||
    int check_every = 10;
};

struct SdpResult {
    Matrix choi;
    double objective = 0.0;
    double lower_bound = 0.0;
    double gap = 0.0;
    double tp_residual = 0.0;
    double psd_residual = 0.0;  // max(0, -min eigenvalue)
    int iterations = 0;
    bool converged = false;
};

namespace detail {

inline Matrix psd_projection(const Matrix &x) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(hermitian_part(x));
    Eigen::VectorXd lam = es.eigenvalues().cwiseMax(0.0);
    return es.eigenvectors() * lam.asDiagonal() * es.eigenvectors().adjoint();
}

// C + (I - Tr_out C) ⊗ I / d_out; returns the correction's left factor too.
inline Matrix tp_projection(const Matrix &c, Eigen::Index d, Matrix *delta = nullptr) {
    Matrix dl = Matrix::Identity(d, d) - trace_out_second(c, d);
    if (delta != nullptr) {
        *delta = dl;
    }
    return c + kron(dl, Matrix::Identity(d, d)) / static_cast<double>(d);
}

inline Matrix inverse_sqrt(const Matrix &x) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(hermitian_part(x));
    Eigen::VectorXd lam = es.eigenvalues().cwiseMax(1e-300).cwiseSqrt().cwiseInverse();
    return es.eigenvectors() * lam.asDiagonal() * es.eigenvectors().adjoint();
}

}  // namespace detail

/// Maps a PSD matrix onto an exactly feasible Choi matrix: congruence by
/// (Tr_out Z)^{-1/2} when that is well conditioned, otherwise TP projection
/// mixed with the completely depolarizing Choi until PSD.
inline Matrix repair_choi(const Matrix &z, Eigen::Index d) {
    Matrix x = trace_out_second(z, d);
    auto lam = hermitian_eigenvalues(x);
    if (lam.minCoeff() > 1e-6) {
        Matrix s = kron(detail::inverse_sqrt(x), Matrix::Identity(d, d));
        return hermitian_part(s * z * s);
    }
    Matrix c = hermitian_part(detail::tp_projection(z, d));
    const double lmin = min_eigenvalue(c);
    if (lmin >= 0.0) {
        return c;
    }
    const double floor = 1.0 / static_cast<double>(d);
    const double t = -lmin / (floor - lmin);
    return (1.0 - t) * c + t * Matrix::Identity(d * d, d * d) / static_cast<double>(d);
}

inline double tp_residual(const Matrix &c, Eigen::Index d) {
    return max_abs(trace_out_second(c, d) - Matrix::Identity(d, d));
}

/// Lower bound Tr Y + d * lambda_min(M - Y ⊗ I) valid over all CPTP Choi matrices.
inline double dual_bound(const Matrix &m, const Matrix &y, Eigen::Index d) {
    const Matrix yh = hermitian_part(y);
    return yh.trace().real() +
           static_cast<double>(d) * min_eigenvalue(hermitian_part(m) - kron(yh, Matrix::Identity(d, d)));
}

/// min Re Tr[C M] over C >= 0 with Tr_out C = I, for a (d^2 x d^2) Hermitian M.
inline SdpResult minimize_over_cptp(const Matrix &m_in, const SdpOptions &opts = {},
                                    const std::optional<Matrix> &warm_start = std::nullopt) {
    require(m_in.rows() == m_in.cols(), "objective matrix must be square");
    Eigen::Index d = 1;
    while (d * d < m_in.rows()) {
        ++d;
    }
    require(d * d == m_in.rows(), "objective matrix dimension must be a square d^2");
    require(max_abs(m_in - m_in.adjoint()) <= 1e-10 * std::max(1.0, max_abs(m_in)), "objective matrix is not Hermitian");
    require(opts.max_iters > 0 && opts.step0 > 0.0 && opts.tol > 0.0, "SDP options must be positive");

    const Matrix m_h = hermitian_part(m_in);
    const double scale = std::max(m_h.norm(), 1e-300);
    const Matrix m = m_h / scale;
    const auto dim = m.rows();

    auto objective = [&](const Matrix &c) { return (c * m_h).trace().real(); };

    SdpResult best;
    best.choi = warm_start ? repair_choi(detail::psd_projection(*warm_start), d)
                           : Matrix(Matrix::Identity(dim, dim) / static_cast<double>(d));
    best.objective = objective(best.choi);
    best.lower_bound = -std::numeric_limits<double>::infinity();
    if (m_h.norm() == 0.0) {
        best.lower_bound = 0.0;
        best.gap = 0.0;
        best.converged = true;
        best.tp_residual = tp_residual(best.choi, d);
        best.psd_residual = std::max(0.0, -min_eigenvalue(best.choi));
        return best;
    }

    double rho = 1.0 / opts.step0;
    Matrix z = best.choi;
    Matrix u = Matrix::Zero(dim, dim);
    Matrix delta;
    int it = 0;
    for (it = 1; it <= opts.max_iters; ++it) {
        const Matrix c = detail::tp_projection(z - u - m / rho, d, &delta);
        const Matrix z_old = z;
        z = detail::psd_projection(c + u);
        u += c - z;
        const double r_primal = (c - z).norm();
        const double r_dual = rho * (z - z_old).norm();

        if (it % opts.check_every == 0 || it == opts.max_iters) {
            // Multiplier of the TP constraint: rho * delta / d (scaled units).
            const double lb = scale * dual_bound(m, rho * delta / static_cast<double>(d), d);
            if (lb > best.lower_bound) {
                best.lower_bound = lb;
            }
            Matrix cand = repair_choi(z, d);
            const double val = objective(cand);
            if (val < best.objective) {
                best.objective = val;
                best.choi = cand;
            }
            best.gap = best.objective - best.lower_bound;
            if (best.gap <= opts.tol * scale) {
                best.converged = true;
                break;
            }
        }
        // Residual balancing keeps both residuals on the same scale.
        if (r_primal > 10.0 * r_dual) {
            rho *= 2.0;
            u /= 2.0;
        } else if (r_dual > 10.0 * r_primal) {
            rho /= 2.0;
            u *= 2.0;
        }
    }
    best.iterations = std::min(it, opts.max_iters);
    best.tp_residual = tp_residual(best.choi, d);
    best.psd_residual = std::max(0.0, -min_eigenvalue(best.choi));
    return best;
}

}  // namespace vilma

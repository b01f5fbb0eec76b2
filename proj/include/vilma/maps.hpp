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

// k-local linear maps on qubit operators.
//
// Conventions (fixed everywhere in the library):
//   superoperator  vec(L(X)) = S vec(X), column stacking, vec(A X B) = (B^T ⊗ A) vec(X)
//   Choi matrix    C = sum_ab |a><b| ⊗ L(|a><b|), index order (input ⊗ output)
// so that C[(a,x),(b,y)] = S[x + y d, a + b d], Tr_out C = I iff L is trace
// preserving, and Tr[L(R) Q] = Tr[C (R^T ⊗ Q)].

#include "vilma/core.hpp"
#include "vilma/kernels.hpp"

#include <cmath>
#include <numeric>
#include <random>
#include <vector>

namespace vilma {

struct MapFlags {
    bool cp = false;
    bool tp = false;
    bool hermiticity_preserving = false;
};

inline Matrix superop_to_choi_matrix(const Matrix &s) {
    const auto d = static_cast<Eigen::Index>(std::llround(std::sqrt(static_cast<double>(s.rows()))));
    Matrix c(s.rows(), s.cols());
    for (Eigen::Index a = 0; a < d; ++a)
        for (Eigen::Index b = 0; b < d; ++b)
            for (Eigen::Index x = 0; x < d; ++x)
                for (Eigen::Index y = 0; y < d; ++y)
                    c(a * d + x, b * d + y) = s(x + y * d, a + b * d);
    return c;
}

inline Matrix choi_to_superop_matrix(const Matrix &c) {
    const auto d = static_cast<Eigen::Index>(std::llround(std::sqrt(static_cast<double>(c.rows()))));
    Matrix s(c.rows(), c.cols());
    for (Eigen::Index a = 0; a < d; ++a)
        for (Eigen::Index b = 0; b < d; ++b)
            for (Eigen::Index x = 0; x < d; ++x)
                for (Eigen::Index y = 0; y < d; ++y)
                    s(x + y * d, a + b * d) = c(a * d + x, b * d + y);
    return s;
}

/// Tr_out of a Choi matrix (input ⊗ output order).
inline Matrix choi_trace_output(const Matrix &c, Eigen::Index d_out) { return trace_out_second(c, d_out); }

/// Properties checked at `tol` against a Choi matrix.
inline MapFlags check_choi(const Matrix &c, int arity, double tol = 1e-10) {
    MapFlags f;
    const auto d = static_cast<Eigen::Index>(pow2(arity));
    f.hermiticity_preserving = max_abs(c - c.adjoint()) <= tol;
    f.tp = max_abs(choi_trace_output(c, d) - Matrix::Identity(d, d)) <= tol;
    f.cp = f.hermiticity_preserving && min_eigenvalue(c) >= -tol;
    return f;
}

/// A linear map on k qubits stored as its superoperator; immutable.
class LocalMap {
  public:
    LocalMap() : LocalMap(Matrix::Identity(4, 4)) {}

    explicit LocalMap(Matrix superop) : superop_(std::move(superop)) {
        const auto rows = superop_.rows();
        require(superop_.cols() == rows, "superoperator must be square");
        arity_ = -1;
        for (int k = 1; k <= 4; ++k) {
            if (rows == static_cast<Eigen::Index>(pow4(k))) {
                arity_ = k;
            }
        }
        require(arity_ > 0, "superoperator dimension " + std::to_string(rows) + " is not 4^k for k in 1..4");
        require(superop_.allFinite(), "superoperator has non-finite entries");
        flags_ = check_choi(choi(), arity_);
    }

    static LocalMap from_choi(const Matrix &c) { return LocalMap(choi_to_superop_matrix(c)); }

    static LocalMap identity(int arity) {
        return LocalMap(Matrix::Identity(static_cast<Eigen::Index>(pow4(arity)), static_cast<Eigen::Index>(pow4(arity))));
    }

    /// X -> U X U^dagger.
    static LocalMap unitary(const Matrix &u) { return LocalMap(kron(u.conjugate(), u)); }

    /// X -> sum_i K_i X K_i^dagger.
    static LocalMap kraus(const std::vector<Matrix> &ops) {
        require(!ops.empty(), "empty Kraus list");
        Matrix s = Matrix::Zero(ops[0].rows() * ops[0].rows(), ops[0].rows() * ops[0].rows());
        for (const auto &k : ops) {
            s += kron(k.conjugate(), k);
        }
        return LocalMap(std::move(s));
    }

    int arity() const { return arity_; }
    Eigen::Index dim() const { return static_cast<Eigen::Index>(pow2(arity_)); }
    const Matrix &superop() const { return superop_; }
    Matrix choi() const { return superop_to_choi_matrix(superop_); }
    const MapFlags &flags() const { return flags_; }

    Matrix apply(const Matrix &x) const {
        require(x.rows() == dim() && x.cols() == dim(), "operator dimension does not match map arity");
        return unvec(superop_ * vec(x), dim());
    }

  private:
    Matrix superop_;
    int arity_ = 0;
    MapFlags flags_;
};

inline Matrix superop_to_choi(const LocalMap &m) { return m.choi(); }
inline LocalMap choi_to_superop(const Matrix &c) { return LocalMap::from_choi(c); }

/// (cp, tp, hermiticity_preserving) at the given tolerance.
inline MapFlags is_cptp(const LocalMap &m, double tol = 1e-10) {
    if (tol == 1e-10) {
        return m.flags();
    }
    return check_choi(m.choi(), m.arity(), tol);
}

/// Hilbert-Schmidt adjoint: Tr[L(A)^dagger B] = Tr[A^dagger L^dagger(B)].
inline LocalMap adjoint_map(const LocalMap &m) { return LocalMap(m.superop().adjoint()); }

namespace detail {

// Permutation K with vec(X^T) = K vec(X).
inline Matrix commutation_matrix(Eigen::Index d) {
    Matrix k = Matrix::Zero(d * d, d * d);
    for (Eigen::Index r = 0; r < d; ++r)
        for (Eigen::Index c = 0; c < d; ++c)
            k(c + r * d, r + c * d) = 1.0;
    return k;
}

}  // namespace detail

/// Transpose under the bilinear pairing Tr[L(A) B] = Tr[A L'(B)]. Coincides
/// with adjoint_map for Hermiticity-preserving maps.
inline LocalMap dual_map(const LocalMap &m) {
    Matrix k = detail::commutation_matrix(m.dim());
    return LocalMap(k * m.superop().transpose() * k);
}

/// Matrix inverse of the superoperator.
inline LocalMap invert_map(const LocalMap &m, double max_condition = 1e10) {
    Eigen::JacobiSVD<Matrix> svd(m.superop());
    const auto &sv = svd.singularValues();
    const double smin = sv(sv.size() - 1);
    const double cond = smin > 0.0 ? sv(0) / smin : INFINITY;
    if (!(cond <= max_condition)) {
        throw NumericalError("map is singular or ill-conditioned (condition estimate " + std::to_string(cond) + ")");
    }
    return LocalMap(m.superop().inverse());
}

/// maps[0] is applied first.
inline LocalMap compose(const std::vector<LocalMap> &maps) {
    require(!maps.empty(), "compose needs at least one map");
    Matrix s = maps.front().superop();
    for (std::size_t i = 1; i < maps.size(); ++i) {
        require(maps[i].arity() == maps.front().arity(), "compose: arity mismatch");
        s = maps[i].superop() * s;
    }
    return LocalMap(std::move(s));
}

/// Embeds a map into a larger register: `positions[t]` is where map qubit t
/// sits among `total` qubits; identity on the others.
inline LocalMap tensor_extend(const LocalMap &m, int total, const std::vector<int> &positions) {
    require(static_cast<int>(positions.size()) == m.arity(), "tensor_extend: arity mismatch");
    require(total >= m.arity() && total <= 4, "tensor_extend: target register must hold 1..4 qubits");
    for (int p : positions) {
        require(p >= 0 && p < total, "tensor_extend: position out of range");
    }
    const auto dim = static_cast<Eigen::Index>(pow2(total));
    Matrix s(dim * dim, dim * dim);
    for (Eigen::Index col = 0; col < dim * dim; ++col) {
        Matrix unit = Matrix::Zero(dim, dim);
        unit(col % dim, col / dim) = 1.0;
        s.col(col) = vec(kernels::apply_superop_at(unit, total, m.superop(), positions));
    }
    return LocalMap(std::move(s));
}

/// Tensor product a ⊗ b, with a on the leading qubits.
inline LocalMap tensor(const LocalMap &a, const LocalMap &b) {
    const int total = a.arity() + b.arity();
    std::vector<int> pa(static_cast<std::size_t>(a.arity()));
    std::iota(pa.begin(), pa.end(), 0);
    std::vector<int> pb(static_cast<std::size_t>(b.arity()));
    std::iota(pb.begin(), pb.end(), a.arity());
    return compose({tensor_extend(a, total, pa), tensor_extend(b, total, pb)});
}

/// Linear combination alpha A + beta B.
inline LocalMap affine_combination(double alpha, const LocalMap &a, double beta, const LocalMap &b) {
    require(a.arity() == b.arity(), "affine_combination: arity mismatch");
    return LocalMap(alpha * a.superop() + beta * b.superop());
}

namespace presets {

inline Matrix cnot_unitary() {
    Matrix u = Matrix::Zero(4, 4);
    u(0, 0) = 1.0;
    u(1, 1) = 1.0;
    u(2, 3) = 1.0;
    u(3, 2) = 1.0;
    return u;
}

/// Control on the first map qubit.
inline LocalMap cnot() { return LocalMap::unitary(cnot_unitary()); }

/// X -> (1 - p) X + p Tr[X] I / d.
inline LocalMap depolarizing(int arity, double p) {
    require(p >= 0.0 && p <= 1.0, "depolarizing probability must lie in [0, 1]");
    const auto d = static_cast<Eigen::Index>(pow2(arity));
    Matrix s = (1.0 - p) * Matrix::Identity(d * d, d * d);
    Vector vid = vec(Matrix::Identity(d, d));
    s += (p / static_cast<double>(d)) * vid * vid.transpose();
    return LocalMap(std::move(s));
}

/// Single-qubit reset: sigma -> Tr[sigma] |0><0|.
inline LocalMap zreset() {
    Matrix k0 = Matrix::Zero(2, 2);
    Matrix k1 = Matrix::Zero(2, 2);
    k0(0, 0) = 1.0;
    k1(0, 1) = 1.0;
    return LocalMap::kraus({k0, k1});
}

inline Matrix rx(double theta) {
    Matrix r(2, 2);
    r << std::cos(theta / 2), cplx(0, -std::sin(theta / 2)), cplx(0, -std::sin(theta / 2)), std::cos(theta / 2);
    return r;
}

inline Matrix rz(double theta) {
    Matrix r = Matrix::Zero(2, 2);
    r(0, 0) = std::exp(cplx(0, -theta / 2));
    r(1, 1) = std::exp(cplx(0, theta / 2));
    return r;
}

/// CNOT conjugation, then two-qubit depolarizing(p_dep), then R_x(theta) R_z(theta) on both qubits.
inline LocalMap noisy_cnot(double theta, double p_dep) {
    require(p_dep >= 0.0 && p_dep <= 1.0, "noisy_cnot: depolarizing probability must lie in [0, 1]");
    Matrix single = rx(theta) * rz(theta);
    return compose({cnot(), depolarizing(2, p_dep), LocalMap::unitary(kron(single, single))});
}

}  // namespace presets

/// Haar-random unitary: QR of a complex Ginibre matrix with the phases of R's diagonal fixed.
template <class Rng>
Matrix haar_unitary(Eigen::Index d, Rng &rng) {
    std::normal_distribution<double> g(0.0, 1.0);
    Matrix z(d, d);
    for (Eigen::Index i = 0; i < d; ++i)
        for (Eigen::Index j = 0; j < d; ++j)
            z(i, j) = cplx(g(rng), g(rng)) / std::sqrt(2.0);
    Eigen::HouseholderQR<Matrix> qr(z);
    Matrix q = qr.householderQ() * Matrix::Identity(d, d);
    Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (Eigen::Index i = 0; i < d; ++i) {
        cplx ph = r(i, i) / std::abs(r(i, i));
        q.col(i) *= ph;
    }
    return q;
}

/// Random CPTP map from the Ginibre-Choi ensemble: W = G G^dagger, then
/// C = (X^{-1/2} ⊗ I) W (X^{-1/2} ⊗ I) with X = Tr_out W.
template <class Rng>
LocalMap random_cptp(int arity, Rng &rng) {
    const auto d = static_cast<Eigen::Index>(pow2(arity));
    std::normal_distribution<double> g(0.0, 1.0);
    Matrix gm(d * d, d * d);
    for (Eigen::Index i = 0; i < gm.rows(); ++i)
        for (Eigen::Index j = 0; j < gm.cols(); ++j)
            gm(i, j) = cplx(g(rng), g(rng));
    Matrix w = gm * gm.adjoint();
    Eigen::SelfAdjointEigenSolver<Matrix> es(choi_trace_output(w, d));
    Matrix inv_sqrt = es.eigenvectors() * es.eigenvalues().cwiseInverse().cwiseSqrt().asDiagonal() *
                      es.eigenvectors().adjoint();
    Matrix lift = kron(inv_sqrt, Matrix::Identity(d, d));
    Matrix c = lift * w * lift;
    return LocalMap::from_choi(hermitian_part(c));
}

template <class Rng>
LocalMap random_unitary_map(int arity, Rng &rng) {
    return LocalMap::unitary(haar_unitary(static_cast<Eigen::Index>(pow2(arity)), rng));
}

/// Hermiticity-preserving map whose Choi matrix is a random Hermitian matrix
/// made trace preserving; generically not CP.
template <class Rng>
LocalMap random_tp_hermitian_map(int arity, Rng &rng) {
    const auto d = static_cast<Eigen::Index>(pow2(arity));
    std::normal_distribution<double> g(0.0, 1.0);
    Matrix h(d * d, d * d);
    for (Eigen::Index i = 0; i < h.rows(); ++i)
        for (Eigen::Index j = 0; j < h.cols(); ++j)
            h(i, j) = cplx(g(rng), g(rng));
    h = hermitian_part(h) / static_cast<double>(d);
    Matrix delta = Matrix::Identity(d, d) - choi_trace_output(h, d);
    h += kron(delta, Matrix::Identity(d, d)) / static_cast<double>(d);
    return LocalMap::from_choi(h);
}

}  // namespace vilma

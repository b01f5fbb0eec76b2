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

#include <Eigen/Dense>

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace vilma {

using cplx = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using Matrix2 = Eigen::Matrix2cd;

/// Bad input: malformed files, out-of-range arguments, inconsistent sizes.
class ValidationError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// A computation that could not complete to the requested accuracy.
class NumericalError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// No evaluation order keeps the active-qubit set within the requested cap.
class ScheduleError : public NumericalError {
  public:
    ScheduleError(const std::string &what, int best_bound)
        : NumericalError(what), best_bound_(best_bound) {}
    int best_bound() const { return best_bound_; }

  private:
    int best_bound_;
};

inline void require(bool cond, const std::string &msg) {
    if (!cond) {
        throw ValidationError(msg);
    }
}

constexpr std::size_t pow2(int n) { return std::size_t{1} << n; }
constexpr std::size_t pow4(int n) { return std::size_t{1} << (2 * n); }

inline Matrix kron(const Matrix &a, const Matrix &b) {
    Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
        }
    }
    return out;
}

/// Column-stacking vectorization: vec(X)[r + c * rows] = X(r, c).
inline Vector vec(const Matrix &x) {
    return Eigen::Map<const Vector>(x.data(), x.size());
}

inline Matrix unvec(const Vector &v, Eigen::Index dim) {
    return Eigen::Map<const Matrix>(v.data(), dim, dim);
}

inline Matrix hermitian_part(const Matrix &m) { return (m + m.adjoint()) / 2.0; }

inline double max_abs(const Matrix &m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

inline Eigen::VectorXd hermitian_eigenvalues(const Matrix &m) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(hermitian_part(m), Eigen::EigenvaluesOnly);
    return es.eigenvalues();
}

inline double min_eigenvalue(const Matrix &m) { return hermitian_eigenvalues(m).minCoeff(); }

/// Partial trace over the trailing factor of dimension `dim_b` in a (A ⊗ B) operator.
inline Matrix trace_out_second(const Matrix &m, Eigen::Index dim_b) {
    Eigen::Index dim_a = m.rows() / dim_b;
    Matrix out = Matrix::Zero(dim_a, dim_a);
    for (Eigen::Index i = 0; i < dim_a; ++i) {
        for (Eigen::Index j = 0; j < dim_a; ++j) {
            out(i, j) = m.block(i * dim_b, j * dim_b, dim_b, dim_b).trace();
        }
    }
    return out;
}

/// Partial trace over the leading factor of dimension `dim_a` in a (A ⊗ B) operator.
inline Matrix trace_out_first(const Matrix &m, Eigen::Index dim_a) {
    Eigen::Index dim_b = m.rows() / dim_a;
    Matrix out = Matrix::Zero(dim_b, dim_b);
    for (Eigen::Index i = 0; i < dim_a; ++i) {
        out += m.block(i * dim_b, i * dim_b, dim_b, dim_b);
    }
    return out;
}

namespace pauli_matrix {

inline Matrix2 I() { return Matrix2::Identity(); }
inline Matrix2 X() {
    Matrix2 m;
    m << 0, 1, 1, 0;
    return m;
}
inline Matrix2 Y() {
    Matrix2 m;
    m << 0, cplx(0, -1), cplx(0, 1), 0;
    return m;
}
inline Matrix2 Z() {
    Matrix2 m;
    m << 1, 0, 0, -1;
    return m;
}

/// Index order I, X, Y, Z.
inline Matrix2 by_index(int a) {
    switch (a) {
    case 0:
        return I();
    case 1:
        return X();
    case 2:
        return Y();
    default:
        return Z();
    }
}

}  // namespace pauli_matrix

/// Dense n-qubit Pauli basis element; digits of `index` in base 4 are the letters, qubit 0 most significant.
inline Matrix pauli_basis_element(std::size_t index, int n) {
    Matrix out = Matrix::Identity(1, 1);
    for (int q = 0; q < n; ++q) {
        int letter = static_cast<int>((index >> (2 * (n - 1 - q))) & 3u);
        out = kron(out, Matrix(pauli_matrix::by_index(letter)));
    }
    return out;
}

}  // namespace vilma

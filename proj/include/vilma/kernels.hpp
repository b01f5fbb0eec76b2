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

// Index kernels shared by the state simulator and the cone engine.
//
// An n-qubit operator is a 2^n x 2^n matrix whose row/column index has qubit
// position p in bit (n - 1 - p): position 0 is the leftmost tensor factor.

#include "vilma/core.hpp"

#include <span>
#include <vector>

namespace vilma::kernels {

/// Offsets of the 2^k local basis states of `positions` inside an n-qubit index.
/// positions[0] is the most significant local bit.
inline std::vector<std::size_t> local_offsets(int n, std::span<const int> positions) {
    const int k = static_cast<int>(positions.size());
    std::vector<std::size_t> off(pow2(k), 0);
    for (std::size_t i = 0; i < off.size(); ++i) {
        for (int t = 0; t < k; ++t) {
            if ((i >> (k - 1 - t)) & 1u) {
                off[i] |= pow2(n - 1 - positions[t]);
            }
        }
    }
    return off;
}

/// Indices in [0, 2^n) whose bits at `positions` are all zero.
inline std::vector<std::size_t> rest_bases(int n, std::span<const int> positions) {
    std::size_t mask = 0;
    for (int p : positions) {
        mask |= pow2(n - 1 - p);
    }
    std::vector<std::size_t> out;
    out.reserve(pow2(n - static_cast<int>(positions.size())));
    for (std::size_t b = 0; b < pow2(n); ++b) {
        if ((b & mask) == 0) {
            out.push_back(b);
        }
    }
    return out;
}

/// Applies a k-qubit column-stacking superoperator to the qubits at `positions`
/// of an n-qubit operator, acting as the identity elsewhere.
inline Matrix apply_superop_at(const Matrix &x, int n, const Matrix &superop, std::span<const int> positions) {
    const std::size_t dk = pow2(static_cast<int>(positions.size()));
    const auto off = local_offsets(n, positions);
    const auto bases = rest_bases(n, positions);
    Matrix y(x.rows(), x.cols());
    Vector v(static_cast<Eigen::Index>(dk * dk));
    Vector w(static_cast<Eigen::Index>(dk * dk));
    for (std::size_t rb : bases) {
        for (std::size_t cb : bases) {
            for (std::size_t j = 0; j < dk; ++j) {
                for (std::size_t i = 0; i < dk; ++i) {
                    v(static_cast<Eigen::Index>(i + j * dk)) =
                        x(static_cast<Eigen::Index>(rb + off[i]), static_cast<Eigen::Index>(cb + off[j]));
                }
            }
            w.noalias() = superop * v;
            for (std::size_t j = 0; j < dk; ++j) {
                for (std::size_t i = 0; i < dk; ++i) {
                    y(static_cast<Eigen::Index>(rb + off[i]), static_cast<Eigen::Index>(cb + off[j])) =
                        w(static_cast<Eigen::Index>(i + j * dk));
                }
            }
        }
    }
    return y;
}

namespace detail {

// Removes bit b from idx, closing the gap.
inline std::size_t drop_bit(std::size_t idx, int b) {
    return ((idx >> (b + 1)) << b) | (idx & (pow2(b) - 1));
}

// Inserts `bit` at bit position b of idx.
inline std::size_t put_bit(std::size_t idx, int b, std::size_t bit) {
    return ((idx >> b) << (b + 1)) | (bit << b) | (idx & (pow2(b) - 1));
}

}  // namespace detail

/// X (n qubits) -> X with `factor` tensored in as a new qubit at position `pos` (0..n).
inline Matrix insert_factor(const Matrix &x, int n, int pos, const Matrix2 &factor) {
    const int b = n - pos;
    const std::size_t dim = pow2(n + 1);
    Matrix y(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
    for (std::size_t c = 0; c < dim; ++c) {
        const std::size_t oc = detail::drop_bit(c, b);
        const std::size_t bc = (c >> b) & 1u;
        for (std::size_t r = 0; r < dim; ++r) {
            y(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
                x(static_cast<Eigen::Index>(detail::drop_bit(r, b)), static_cast<Eigen::Index>(oc)) *
                factor(static_cast<Eigen::Index>((r >> b) & 1u), static_cast<Eigen::Index>(bc));
        }
    }
    return y;
}

/// Tr_pos[X (F at pos)]: multiplies by a single-qubit factor and traces that qubit out.
inline Matrix trace_with_factor(const Matrix &x, int n, int pos, const Matrix2 &factor) {
    const int b = n - 1 - pos;
    const std::size_t dim = pow2(n - 1);
    Matrix y(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
    for (std::size_t c = 0; c < dim; ++c) {
        for (std::size_t r = 0; r < dim; ++r) {
            cplx acc = 0.0;
            for (std::size_t a = 0; a < 2; ++a) {
                for (std::size_t bb = 0; bb < 2; ++bb) {
                    acc += x(static_cast<Eigen::Index>(detail::put_bit(r, b, a)),
                             static_cast<Eigen::Index>(detail::put_bit(c, b, bb))) *
                           factor(static_cast<Eigen::Index>(bb), static_cast<Eigen::Index>(a));
                }
            }
            y(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = acc;
        }
    }
    return y;
}

/// Splits an n-qubit operator over (kept ⊗ rest) into sum_a X_a ⊗ B_a with
/// B_a the normalized Pauli basis (Pauli / sqrt 2 per qubit) on the rest.
/// `kept` lists positions in the order of the returned local factors.
inline std::vector<Matrix> pauli_split(const Matrix &x, int n, std::span<const int> kept) {
    std::vector<int> rest;
    for (int p = 0; p < n; ++p) {
        bool in = false;
        for (int k : kept) {
            in = in || (k == p);
        }
        if (!in) {
            rest.push_back(p);
        }
    }
    const int nr = static_cast<int>(rest.size());
    const auto koff = local_offsets(n, kept);
    const auto roff = local_offsets(n, rest);
    const std::size_t dk = koff.size();
    const std::size_t dr = roff.size();
    const double norm = std::pow(2.0, -0.5 * nr);
    std::vector<Matrix> out;
    out.reserve(pow4(nr));
    for (std::size_t a = 0; a < pow4(nr); ++a) {
        Matrix basis = pauli_basis_element(a, nr) * norm;
        Matrix xa = Matrix::Zero(static_cast<Eigen::Index>(dk), static_cast<Eigen::Index>(dk));
        for (std::size_t i = 0; i < dk; ++i) {
            for (std::size_t j = 0; j < dk; ++j) {
                cplx acc = 0.0;
                for (std::size_t u = 0; u < dr; ++u) {
                    for (std::size_t v = 0; v < dr; ++v) {
                        cplx bvu = basis(static_cast<Eigen::Index>(v), static_cast<Eigen::Index>(u));
                        if (bvu != 0.0) {
                            acc += x(static_cast<Eigen::Index>(koff[i] + roff[u]),
                                     static_cast<Eigen::Index>(koff[j] + roff[v])) *
                                   bvu;
                        }
                    }
                }
                xa(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = acc;
            }
        }
        out.push_back(std::move(xa));
    }
    return out;
}

}  // namespace vilma::kernels

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

#include "vilma/povm.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace vilma;

namespace {

Matrix2 matrix_unit(int a, int b) {
    Matrix2 e = Matrix2::Zero();
    e(a, b) = 1.0;
    return e;
}

Matrix2 reconstruct(const Matrix2 &a, const SingleQubitPOVM &povm, const DualFrame &duals) {
    Matrix2 out = Matrix2::Zero();
    for (int m = 0; m < 4; ++m) {
        out += (a * povm.effects[m]).trace() * duals.duals[m];
    }
    return out;
}

}  // namespace

TEST(Sic, EffectTracesAndCompleteness) {
    auto povm = make_sic_povm();
    Matrix2 sum = Matrix2::Zero();
    for (const auto &e : povm.effects) {
        EXPECT_NEAR(e.trace().real(), 0.5, 1e-15);
        EXPECT_GE(min_eigenvalue(e), -1e-12);
        sum += e;
    }
    EXPECT_LT(max_abs(sum - Matrix2::Identity()), 1e-12);
}

TEST(Sic, PairwiseOverlaps) {
    auto povm = make_sic_povm();
    for (int m = 0; m < 4; ++m) {
        for (int n = 0; n < 4; ++n) {
            const double expected = m == n ? 0.25 : 1.0 / 12.0;
            EXPECT_NEAR((povm.effects[m] * povm.effects[n]).trace().real(), expected, 1e-15);
        }
    }
}

TEST(Duals, SicClosedForm) {
    auto duals = compute_duals(make_sic_povm());
    auto s = sic_bloch_vectors();
    for (int m = 0; m < 4; ++m) {
        // (I + 3 s.sigma) / 2 written out entrywise
        Matrix2 expected;
        expected << (1.0 + 3.0 * s[m].z()) / 2.0, cplx(3.0 * s[m].x(), -3.0 * s[m].y()) / 2.0,
            cplx(3.0 * s[m].x(), 3.0 * s[m].y()) / 2.0, (1.0 - 3.0 * s[m].z()) / 2.0;
        EXPECT_LT(max_abs(duals.duals[m] - expected), 1e-12);
        EXPECT_NEAR(duals.duals[m].trace().real(), 1.0, 1e-12);
        EXPECT_NEAR(min_eigenvalue(duals.duals[m]), -1.0, 1e-12);
    }
}

TEST(Duals, ReconstructMatrixUnitsAndPaulis) {
    auto povm = make_sic_povm();
    auto duals = compute_duals(povm);
    for (int a = 0; a < 2; ++a) {
        for (int b = 0; b < 2; ++b) {
            EXPECT_LT(max_abs(reconstruct(matrix_unit(a, b), povm, duals) - matrix_unit(a, b)), 1e-12);
        }
    }
    EXPECT_LT(max_abs(reconstruct(pauli_matrix::X(), povm, duals) - pauli_matrix::X()), 1e-12);
    EXPECT_LT(max_abs(reconstruct(Matrix2::Identity(), povm, duals) - Matrix2::Identity()), 1e-12);
}

TEST(Duals, RandomPovmReconstructsArbitraryOperators) {
    std::mt19937_64 rng(9);
    std::normal_distribution<double> g;
    SingleQubitPOVM povm{{}, "random"};
    // Random rank-one effects rescaled to sum to identity.
    std::array<Matrix2, 4> raw;
    Matrix2 sum = Matrix2::Zero();
    for (auto &r : raw) {
        Eigen::Vector2cd v(cplx(g(rng), g(rng)), cplx(g(rng), g(rng)));
        r = v * v.adjoint();
        sum += r;
    }
    Eigen::SelfAdjointEigenSolver<Matrix2> es(sum);
    Matrix2 w = es.eigenvectors() * es.eigenvalues().cwiseInverse().cwiseSqrt().asDiagonal() *
                es.eigenvectors().adjoint();
    for (int m = 0; m < 4; ++m) {
        povm.effects[m] = w * raw[m] * w;
    }
    auto duals = compute_duals(povm);
    Matrix2 a;
    a << cplx(g(rng), g(rng)), cplx(g(rng), g(rng)), cplx(g(rng), g(rng)), cplx(g(rng), g(rng));
    EXPECT_LT(max_abs(reconstruct(a, povm, duals) - a), 1e-10);
}

TEST(Duals, RejectsNonInformationallyComplete) {
    SingleQubitPOVM z{{}, "z"};
    z.effects[0] = matrix_unit(0, 0) / 2.0;
    z.effects[1] = matrix_unit(0, 0) / 2.0;
    z.effects[2] = matrix_unit(1, 1) / 2.0;
    z.effects[3] = matrix_unit(1, 1) / 2.0;
    EXPECT_THROW(compute_duals(z), ValidationError);
}

TEST(Duals, ProductTraceIsOne) {
    auto duals = compute_duals(make_sic_povm());
    for (int m = 0; m < 64; ++m) {
        Matrix d = kron(kron(Matrix(duals.duals[m / 16]), Matrix(duals.duals[(m / 4) % 4])),
                        Matrix(duals.duals[m % 4]));
        EXPECT_NEAR(d.trace().real(), 1.0, 1e-12);
    }
}

TEST(PovmJson, RoundTrip) {
    auto povm = make_sic_povm();
    auto back = povm_from_json(povm_to_json(povm));
    EXPECT_EQ(back.label, "sic");
    for (int m = 0; m < 4; ++m) {
        EXPECT_LT(max_abs(back.effects[m] - povm.effects[m]), 1e-15);
    }
}

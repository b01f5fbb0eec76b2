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

#include "vilma/pauli.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace vilma;

namespace {

Matrix random_state(int n, std::mt19937_64 &rng) {
    std::normal_distribution<double> g;
    const auto d = static_cast<Eigen::Index>(pow2(n));
    Matrix a(d, d);
    for (Eigen::Index i = 0; i < d; ++i)
        for (Eigen::Index j = 0; j < d; ++j)
            a(i, j) = cplx(g(rng), g(rng));
    Matrix rho = a * a.adjoint();
    return rho / rho.trace();
}

}  // namespace

TEST(PauliString, ParsesLettersLeftToRight) {
    auto p = PauliString::from_text("XIZY");
    EXPECT_EQ(p.num_qubits(), 4);
    EXPECT_EQ(p.letter(0), 1);
    EXPECT_EQ(p.letter(1), 0);
    EXPECT_EQ(p.letter(2), 3);
    EXPECT_EQ(p.letter(3), 2);
    EXPECT_EQ(p.weight(), 3);
    EXPECT_EQ(p.text(), "XIZY");
    EXPECT_THROW(PauliString::from_text("XQ"), ValidationError);
    EXPECT_THROW(PauliString::from_text("xz"), ValidationError);
}

TEST(PauliString, DenseIsKronWithQubitZeroLeftmost) {
    Matrix expected = kron(Matrix(pauli_matrix::X()), Matrix(pauli_matrix::Z()));
    EXPECT_LT(max_abs(PauliString::from_text("XZ").dense() - expected), 1e-15);
}

TEST(PauliString, TraceOrthogonality) {
    const int n = 2;
    for (std::size_t a = 0; a < pow4(n); ++a) {
        for (std::size_t b = 0; b < pow4(n); ++b) {
            cplx t = (pauli_basis_element(a, n) * pauli_basis_element(b, n)).trace();
            EXPECT_LT(std::abs(t - cplx(a == b ? 4.0 : 0.0)), 1e-14);
        }
    }
}

TEST(Observable, ParsesSingleTerm) {
    auto obs = parse_observable(R"({"num_qubits": 2, "terms": [{"coeff": [1.0, 0.0], "pauli": "ZZ"}]})");
    EXPECT_EQ(obs.num_qubits(), 2);
    ASSERT_EQ(obs.size(), 1u);
    EXPECT_EQ(obs.terms()[0].string.text(), "ZZ");
    EXPECT_TRUE(obs.is_hermitian());
}

TEST(Observable, MergesDuplicates) {
    auto obs = parse_observable(
        R"({"num_qubits": 2, "terms": [{"coeff": [0.5, 0], "pauli": "XI"}, {"coeff": [0.5, 0], "pauli": "XI"}]})");
    ASSERT_EQ(obs.size(), 1u);
    EXPECT_EQ(obs.terms()[0].coeff, cplx(1.0, 0.0));
}

TEST(Observable, RejectsMalformedDocuments) {
    EXPECT_THROW(parse_observable(R"({"num_qubits": 2, "terms": [{"coeff": [1, 0], "pauli": "XA"}]})"),
                 ValidationError);
    EXPECT_THROW(parse_observable(R"({"num_qubits": 2, "terms": [{"coeff": [1, 0], "pauli": "XYZ"}]})"),
                 ValidationError);
    EXPECT_THROW(parse_observable(R"({"num_qubits": 2, "terms": [{"coeff": [1e999, 0], "pauli": "XY"}]})"),
                 ValidationError);
    EXPECT_THROW(parse_observable("{\"num_qubits\": 2,\n \"terms\": [}"), ValidationError);
}

TEST(Observable, WriteParseRoundTrip) {
    std::mt19937_64 rng(11);
    std::uniform_int_distribution<int> letter(0, 3);
    std::normal_distribution<double> g;
    Observable obs(8);
    while (obs.size() < 15) {
        PauliString p(8);
        for (int q = 0; q < 8; ++q) {
            p.set_letter(q, letter(rng));
        }
        obs.add(g(rng), p);
    }
    auto back = parse_observable(write_observable(obs));
    ASSERT_EQ(back.size(), 15u);
    EXPECT_TRUE(back.is_hermitian());
    for (std::size_t i = 0; i < obs.size(); ++i) {
        EXPECT_EQ(back.terms()[i].string, obs.terms()[i].string);
        EXPECT_EQ(back.terms()[i].coeff, obs.terms()[i].coeff);
    }
}

TEST(Observable, ComplexCoefficientIsNotHermitian) {
    Observable obs(1);
    obs.add(cplx(0.0, 1.0), "Z");
    EXPECT_FALSE(obs.is_hermitian());
}

TEST(XXHamiltonian, ThreeSitesNoField) {
    auto h = xx_hamiltonian(3, 1.0, 0.0, true);
    ASSERT_EQ(h.size(), 6u);
    for (const auto &t : h.terms()) {
        EXPECT_EQ(t.coeff, cplx(-0.5, 0.0));
    }
}

TEST(XXHamiltonian, ThreeSitesWithField) {
    auto h = xx_hamiltonian(3, 1.0, 1.0, true);
    ASSERT_EQ(h.size(), 9u);
    int z_terms = 0;
    for (const auto &t : h.terms()) {
        if (t.string.weight() == 1) {
            EXPECT_EQ(t.string.letter(0) + t.string.letter(1) + t.string.letter(2), 3);
            EXPECT_EQ(t.coeff, cplx(-1.0, 0.0));
            ++z_terms;
        }
    }
    EXPECT_EQ(z_terms, 3);
}

TEST(XXHamiltonian, TwoSitePeriodicMergesDoubleBond) {
    auto h = xx_hamiltonian(2, 1.0, 0.0, true);
    ASSERT_EQ(h.size(), 2u);
    for (const auto &t : h.terms()) {
        EXPECT_EQ(t.coeff, cplx(-1.0, 0.0));
    }
    EXPECT_THROW(xx_hamiltonian(1, 1.0, 0.0, true), ValidationError);
}

TEST(XXHamiltonian, ExpectationIsReal) {
    std::mt19937_64 rng(3);
    auto h = xx_hamiltonian(4, 0.7, 0.3, true);
    for (int i = 0; i < 5; ++i) {
        EXPECT_LT(std::abs(expectation_oracle(random_state(4, rng), h).imag()), 1e-10);
    }
}

TEST(ExpectationOracle, SimpleStates) {
    Observable traceless(3);
    traceless.add(0.3, "XIZ");
    traceless.add(-1.2, "YYI");
    Matrix mixed = Matrix::Identity(8, 8) / 8.0;
    EXPECT_LT(std::abs(expectation_oracle(mixed, traceless)), 1e-15);

    Observable z(1);
    z.add(1.0, "Z");
    Matrix zero = Matrix::Zero(2, 2);
    zero(0, 0) = 1.0;
    EXPECT_LT(std::abs(expectation_oracle(zero, z) - 1.0), 1e-15);
    EXPECT_THROW(expectation_oracle(mixed, z), ValidationError);
}

TEST(ExpectationOracle, MatchesDenseTrace) {
    std::mt19937_64 rng(5);
    std::normal_distribution<double> g;
    std::uniform_int_distribution<int> letter(0, 3);
    Matrix rho = random_state(3, rng);
    Observable obs(3);
    for (int k = 0; k < 10; ++k) {
        PauliString p(3);
        for (int q = 0; q < 3; ++q) {
            p.set_letter(q, letter(rng));
        }
        obs.add(cplx(g(rng), g(rng)), p);
    }
    Matrix dense = Matrix::Zero(8, 8);
    for (const auto &t : obs.terms()) {
        Matrix p = Matrix::Identity(1, 1);
        for (int q = 0; q < 3; ++q) {
            p = kron(p, Matrix(pauli_matrix::by_index(t.string.letter(q))));
        }
        dense += t.coeff * p;
    }
    EXPECT_LT(std::abs(expectation_oracle(rho, obs) - (rho * dense).trace()), 1e-12);
}

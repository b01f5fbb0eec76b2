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

#include "test_util.hpp"

#include <gtest/gtest.h>

using namespace vilma;
using namespace vilma::testing;

namespace {

Observable random_observable(int n, int terms, std::mt19937_64 &rng) {
    std::normal_distribution<double> g;
    Observable obs(n);
    for (int k = 0; k < terms; ++k) {
        obs.add(g(rng), random_pauli(n, rng));
    }
    return obs;
}

Observable single(int n, const std::string &text, double coeff = 1.0) {
    Observable obs(n);
    obs.add(coeff, text);
    return obs;
}

double dense_expectation(const MapCircuit &c, const Matrix &rho, const Observable &obs) {
    return (dense_map_circuit_oracle(c, rho) * obs.dense()).trace().real();
}

MapCircuit random_cptp_brickwork(int n, int layers, std::mt19937_64 &rng) {
    auto c = brickwork(n, layers);
    for (std::size_t i = 0; i < c.size(); ++i) {
        c.replace_map(i, random_cptp(2, rng));
    }
    return c;
}

}  // namespace

TEST(ShotWeight, IdentityObservableUnderTpCircuit) {
    std::mt19937_64 rng(1);
    auto c = random_brickwork(4, 2, rng);
    ConeEvaluator ev(c);
    for (int i = 0; i < 10; ++i) {
        auto w = shot_weight(ev, sic_dual_factors(random_outcome(4, rng)), Observable::identity(4));
        EXPECT_NEAR(w.value, 1.0, 1e-12);
        EXPECT_TRUE(w.real_checked);
    }
}

TEST(ShotWeight, SingleZUnderIdentityCircuit) {
    auto duals = sic_duals(2);
    auto s = sic_bloch_vectors();
    for (std::uint8_t m = 0; m < 4; ++m) {
        auto w = shot_weight({m, 0}, duals, brickwork(2, 1), single(2, "ZI"));
        EXPECT_NEAR(w.value, 3.0 * s[m].z(), 1e-12);
    }
    EXPECT_NEAR(shot_weight({0, 0}, duals, brickwork(2, 1), single(2, "ZI")).value, 3.0, 1e-12);
}

TEST(ShotWeight, MatchesDenseComputation) {
    std::mt19937_64 rng(2);
    auto c = random_brickwork(4, 2, rng);
    auto obs = random_observable(4, 6, rng);
    ConeEvaluator ev(c);
    for (int i = 0; i < 10; ++i) {
        auto outcome = random_outcome(4, rng);
        auto f = sic_dual_factors(outcome);
        const double dense = dense_expectation(c, product_of(f), obs);
        EXPECT_NEAR(shot_weight(ev, f, obs).value, dense, 1e-10 * std::max(1.0, std::abs(dense)));
    }
}

TEST(ShotWeight, NonHermitianInputsSkipRealCheck) {
    std::mt19937_64 rng(3);
    MapCircuit c(2, "brickwork");
    c.add(1, {0, 1}, LocalMap(random_matrix(16, rng)));
    auto w = shot_weight({1, 2}, sic_duals(2), c, single(2, "XY"));
    EXPECT_FALSE(w.real_checked);
    EXPECT_GT(std::abs(w.imag), 1e-6);
}

TEST(Estimate, ConstantWeights) {
    std::mt19937_64 rng(4);
    auto batch = sample_outcomes(random_state(3, rng), sic_povms(3), 100, 1);
    auto e = estimate(batch, sic_duals(3), random_brickwork(3, 2, rng), Observable::identity(3));
    EXPECT_NEAR(e.value, 1.0, 1e-12);
    EXPECT_NEAR(e.sigma, 0.0, 1e-7);
    EXPECT_EQ(e.per_shot.size(), 100u);
}

TEST(Estimate, TwoShotArithmetic) {
    Estimate e;
    summarize(e, {0.0, 2.0});
    EXPECT_DOUBLE_EQ(e.value, 1.0);
    EXPECT_DOUBLE_EQ(e.sigma, 1.0);
    EXPECT_THROW(summarize(e, {1.0}), ValidationError);
}

TEST(Estimate, NeedsTwoShots) {
    auto batch = sample_outcomes(maximally_mixed(2), sic_povms(2), 1, 1);
    EXPECT_THROW(estimate(batch, sic_duals(2), brickwork(2, 1), Observable::identity(2)), ValidationError);
}

TEST(Estimate, PerShotWeightsAgreeWithSummary) {
    std::mt19937_64 rng(5);
    auto batch = sample_outcomes(random_state(3, rng), sic_povms(3), 300, 2);
    auto e = estimate(batch, sic_duals(3), random_brickwork(3, 2, rng), random_observable(3, 4, rng));
    Estimate f;
    summarize(f, e.per_shot);
    EXPECT_NEAR(e.value, f.value, 1e-12);
    EXPECT_NEAR(e.sigma, f.sigma, 1e-12);
    const auto hist = batch.histogram();
    EXPECT_LE(hist.size(), 64u);
}

TEST(Estimate, UnbiasedAcrossBatches) {
    std::mt19937_64 rng(6);
    const int n = 4;
    Matrix rho = random_state(n, rng);
    auto c = random_cptp_brickwork(n, 2, rng);
    auto obs = random_observable(n, 5, rng);
    const double exact = dense_expectation(c, rho, obs);
    ConeEvaluator ev(c);
    std::vector<double> values;
    int covered = 0;
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
        auto e = estimate(sample_outcomes(rho, sic_povms(n), 1000, seed), sic_duals(n), ev, obs);
        values.push_back(e.value);
        covered += std::abs(e.value - exact) <= 3.0 * e.sigma;
    }
    Estimate grand;
    summarize(grand, values);
    EXPECT_LE(std::abs(grand.value - exact), 4.0 * grand.sigma);
    EXPECT_GE(covered, 190);
}

TEST(EstimateExact, PopulationIdentity) {
    std::mt19937_64 rng(7);
    for (int n = 2; n <= 5; ++n) {
        Matrix rho = random_state(n, rng);
        auto c = random_brickwork(n, 2, rng);
        auto obs = random_observable(n, 4, rng);
        const double exact = dense_expectation(c, rho, obs);
        EXPECT_NEAR(estimate_exact(rho, sic_povms(n), sic_duals(n), c, obs), exact, 1e-9) << "N=" << n;
    }
}

TEST(EstimateExact, IdentityCircuitAndIdentityObservable) {
    std::mt19937_64 rng(8);
    Matrix rho = random_state(3, rng);
    auto obs = random_observable(3, 5, rng);
    EXPECT_NEAR(estimate_exact(rho, sic_povms(3), sic_duals(3), brickwork(3, 2), obs),
                expectation_oracle(rho, obs).real(), 1e-12);
    EXPECT_NEAR(estimate_exact(rho, sic_povms(3), sic_duals(3), random_brickwork(3, 2, rng), Observable::identity(3)),
                1.0, 1e-12);
}

TEST(EstimateExact, InverseOfPerturbationRecoversOriginal) {
    const int n = 4;
    auto g = exact_ground_energy(xx_hamiltonian(n, 1.0, 0.5, true));
    Matrix rho0 = pure_state(g.vector);
    auto pert = build_perturbed_state(rho0, 0.05, 17);
    auto inv = inverse_circuit(pert.perturbation);
    for (const auto &obs : {xx_hamiltonian(n, 1.0, 0.5, true), single(n, "ZZII"), single(n, "XIIX")}) {
        const double got = estimate_exact(pert.rho, sic_povms(n), sic_duals(n), inv, obs);
        EXPECT_NEAR(got, expectation_oracle(rho0, obs).real(), 1e-8);
    }
}

TEST(EstimateExact, RejectsLargeRegisters) {
    EXPECT_THROW(estimate_exact(maximally_mixed(10), sic_povms(10), sic_duals(10), brickwork(10, 1),
                                Observable::identity(10)),
                 ValidationError);
}

TEST(Covariance, IdentitiesAndExactJointDistribution) {
    std::mt19937_64 rng(9);
    const int n = 3;
    Matrix rho = random_state(n, rng);
    auto c = brickwork(n, 1);
    auto a = single(n, "XII"), b = combine(1.0, a, 0.5, single(n, "IZI"));
    const std::size_t shots = 40000;
    auto batch = sample_outcomes(rho, sic_povms(n), shots, 4);
    auto ea = estimate(batch, sic_duals(n), c, a);
    auto eb = estimate(batch, sic_duals(n), c, b);
    auto eneg = estimate(batch, sic_duals(n), c, a.scaled(-1.0));
    EXPECT_NEAR(estimate_covariance(ea, ea), ea.sigma * ea.sigma, 1e-12);
    EXPECT_NEAR(estimate_covariance(ea, eneg), -ea.sigma * ea.sigma, 1e-12);

    auto p = outcome_distribution(rho, sic_povms(n));
    ConeEvaluator ev(c);
    double ma = 0, mb = 0, mab = 0;
    for (std::size_t m = 0; m < p.size(); ++m) {
        auto f = sic_dual_factors(outcome_digits(m, n));
        const double wa = shot_weight(ev, f, a).value, wb = shot_weight(ev, f, b).value;
        ma += p[m] * wa;
        mb += p[m] * wb;
        mab += p[m] * wa * wb;
    }
    const double exact = (mab - ma * mb) / static_cast<double>(shots);
    EXPECT_GT(std::abs(exact), 1e-5);
    EXPECT_NEAR(estimate_covariance(ea, eb), exact, 0.1 * std::abs(exact));

    auto other = estimate(sample_outcomes(rho, sic_povms(n), shots, 5), sic_duals(n), c, a);
    EXPECT_THROW(estimate_covariance(ea, other), ValidationError);
}

TEST(Estimate, LinearPerShot) {
    std::mt19937_64 rng(10);
    const int n = 3;
    auto batch = sample_outcomes(random_state(n, rng), sic_povms(n), 200, 6);
    auto c = random_brickwork(n, 2, rng);
    auto o1 = random_observable(n, 3, rng), o2 = random_observable(n, 3, rng);
    const double alpha = 0.7, beta = -2.1;
    auto e1 = estimate(batch, sic_duals(n), c, o1);
    auto e2 = estimate(batch, sic_duals(n), c, o2);
    auto e12 = estimate(batch, sic_duals(n), c, combine(alpha, o1, beta, o2));
    for (std::size_t s = 0; s < 200; ++s) {
        EXPECT_NEAR(e12.per_shot[s], alpha * e1.per_shot[s] + beta * e2.per_shot[s], 1e-12);
    }
}

TEST(Estimate, ThreadCountDoesNotChangeResults) {
    std::mt19937_64 rng(11);
    const int n = 4;
    Matrix rho = random_state(n, rng);
    auto batch = sample_outcomes(rho, sic_povms(n), 2000, 7);
    auto c = random_brickwork(n, 2, rng);
    auto obs = random_observable(n, 4, rng);
    EstimateOptions one, four;
    four.threads = 4;
    auto a = estimate(batch, sic_duals(n), c, obs, one);
    auto b = estimate(batch, sic_duals(n), c, obs, four);
    EXPECT_EQ(a.value, b.value);
    EXPECT_EQ(a.sigma, b.sigma);
    ConeEvaluator ev(c);
    auto data = data_from_state(rho, sic_povms(n), sic_duals(n));
    EXPECT_EQ(weighted_value(ev, data, obs, 1), weighted_value(ev, data, obs, 3));
}

TEST(EstimateJson, ReportFields) {
    Estimate e;
    e.value = 0.5;
    e.sigma = 0.1;
    e.shots = 10;
    e.observable_id = "obs";
    auto j = estimate_to_json(e);
    EXPECT_EQ(j["observable"], "obs");
    EXPECT_EQ(j["S"], 10);
    EXPECT_DOUBLE_EQ(j["value"].get<double>(), 0.5);
}

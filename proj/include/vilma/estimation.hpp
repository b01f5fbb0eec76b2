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

#include "vilma/cone.hpp"
#include "vilma/densesim.hpp"
#include "vilma/parallel.hpp"

#include <cmath>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace vilma {

/// One product operator fed into the circuit with a statistical weight:
/// a unique outcome string with weight count/S, an exact outcome with weight
/// p_m, or a classical product state with weight 1.
struct WeightedInput {
    std::vector<Matrix2> factors;
    double weight = 1.0;
};

struct InputData {
    int num_qubits = 0;
    std::vector<WeightedInput> entries;
    std::string label;
};

inline std::vector<Matrix2> dual_factors(const std::vector<std::uint8_t> &outcome, const std::vector<DualFrame> &duals) {
    require(outcome.size() == duals.size(), "outcome length does not match the number of dual frames");
    std::vector<Matrix2> out;
    out.reserve(outcome.size());
    for (std::size_t q = 0; q < outcome.size(); ++q) {
        require(outcome[q] < 4, "outcome entries must lie in 0..3");
        out.push_back(duals[q].duals[outcome[q]]);
    }
    return out;
}

/// Unique outcome strings in sorted order with weight multiplicity/S.
inline InputData data_from_batch(const OutcomeBatch &batch, const std::vector<DualFrame> &duals) {
    require(static_cast<int>(duals.size()) == batch.num_qubits, "one dual frame per qubit required");
    InputData d{batch.num_qubits, {}, "batch(seed=" + std::to_string(batch.seed) + ")"};
    const double s = static_cast<double>(batch.shots());
    for (const auto &[outcome, count] : batch.histogram()) {
        d.entries.push_back({dual_factors(outcome, duals), static_cast<double>(count) / s});
    }
    return d;
}

/// Every outcome with its exact probability p_m (exact-state mode).
inline InputData data_from_state(const Matrix &rho, const std::vector<SingleQubitPOVM> &povms,
                                 const std::vector<DualFrame> &duals) {
    const int n = qubits_of_dim(rho.rows());
    require(n <= 9, "exact-state path limited to N <= 9");
    require(static_cast<int>(duals.size()) == n, "one dual frame per qubit required");
    auto p = outcome_distribution(rho, povms);
    InputData d{n, {}, "exact-state"};
    for (std::size_t m = 0; m < p.size(); ++m) {
        if (p[m] != 0.0) {
            d.entries.push_back({dual_factors(outcome_digits(m, n), duals), p[m]});
        }
    }
    return d;
}

inline InputData data_from_product(const std::vector<Matrix2> &factors, std::string label = "product") {
    return {static_cast<int>(factors.size()), {{factors, 1.0}}, std::move(label)};
}

inline InputData zero_product_data(int n) {
    Matrix2 zero = Matrix2::Zero();
    zero(0, 0) = 1.0;
    return data_from_product(std::vector<Matrix2>(static_cast<std::size_t>(n), zero), "|0...0>");
}

inline bool hermiticity_preserving(const MapCircuit &c) {
    return std::all_of(c.components().begin(), c.components().end(),
                       [](const Component &x) { return x.map.flags().hermiticity_preserving; });
}

struct ShotWeight {
    double value = 0.0;
    double imag = 0.0;
    bool real_checked = false;  // imaginary residue was required to vanish
};

/// sum_k c_k Tr[L(⊗ inputs) P_k] without any realness check.
inline cplx complex_weight(const ConeEvaluator &ev, const std::vector<Matrix2> &inputs, const Observable &obs) {
    require(obs.num_qubits() == ev.circuit().num_qubits(), "observable width does not match circuit");
    cplx acc = 0.0;
    for (const auto &t : obs.terms()) {
        acc += t.coeff * ev.evaluate(inputs, t.string);
    }
    return acc;
}

inline ShotWeight checked_weight(cplx w, bool demand_real) {
    ShotWeight out{w.real(), w.imag(), demand_real};
    if (demand_real && std::abs(w.imag()) > 1e-8 * (1.0 + std::abs(w.real()))) {
        std::ostringstream os;
        os << "imaginary residue " << w.imag() << " in a shot weight of a Hermitian estimate";
        throw NumericalError(os.str());
    }
    return out;
}

inline ShotWeight shot_weight(const ConeEvaluator &ev, const std::vector<Matrix2> &inputs, const Observable &obs) {
    const bool real = obs.is_hermitian() && hermiticity_preserving(ev.circuit());
    return checked_weight(complex_weight(ev, inputs, obs), real);
}

inline ShotWeight shot_weight(const std::vector<std::uint8_t> &outcome, const std::vector<DualFrame> &duals,
                              const MapCircuit &circuit, const Observable &obs, int max_active = 0) {
    ConeEvaluator ev(circuit, max_active);
    return shot_weight(ev, dual_factors(outcome, duals), obs);
}

/// Weighted sum of real shot weights over an input set.
inline double weighted_value(const ConeEvaluator &ev, const InputData &data, const Observable &obs, int threads = 1) {
    const bool real = obs.is_hermitian() && hermiticity_preserving(ev.circuit());
    ChunkPlan plan{data.entries.size(), 64};
    std::vector<double> partial(plan.count(), 0.0);
    parallel_chunks(plan, threads, [&](std::size_t c) {
        double acc = 0.0;
        for (std::size_t i = plan.begin(c); i < plan.end(c); ++i) {
            const auto &e = data.entries[i];
            acc += e.weight * checked_weight(complex_weight(ev, e.factors, obs), real).value;
        }
        partial[c] = acc;
    });
    double total = 0.0;
    for (double v : partial) {
        total += v;
    }
    return total;
}

struct Estimate {
    double value = 0.0;
    double sigma = 0.0;
    std::size_t shots = 0;
    std::vector<double> per_shot;  // empty unless retained
    std::string observable_id;
    std::string circuit_id;
    std::string batch_id;
};

struct EstimateOptions {
    bool keep_per_shot = true;
    int max_active = 0;
    int threads = 1;
};

/// Mean and standard error from per-shot weights.
inline void summarize(Estimate &e, const std::vector<double> &weights) {
    require(weights.size() >= 2, "at least two shots are needed for a variance");
    const double s = static_cast<double>(weights.size());
    double sum = 0.0;
    for (double w : weights) {
        sum += w;
    }
    const double mean = sum / s;
    double ss = 0.0;
    for (double w : weights) {
        ss += (w - mean) * (w - mean);
    }
    const double var = ss / (s - 1.0);
    e.value = mean;
    e.sigma = std::sqrt(var / s);
    e.shots = weights.size();
}

inline Estimate estimate(const OutcomeBatch &batch, const std::vector<DualFrame> &duals, const ConeEvaluator &ev,
                         const Observable &obs, const EstimateOptions &opts = {}) {
    require(batch.shots() >= 2, "estimate needs S >= 2");
    require(batch.num_qubits == ev.circuit().num_qubits(), "batch width does not match circuit");
    auto hist = batch.histogram();
    std::vector<std::vector<std::uint8_t>> unique;
    unique.reserve(hist.size());
    for (const auto &kv : hist) {
        unique.push_back(kv.first);
    }
    const bool real = obs.is_hermitian() && hermiticity_preserving(ev.circuit());
    std::vector<double> w(unique.size());
    ChunkPlan plan{unique.size(), 16};
    parallel_chunks(plan, opts.threads, [&](std::size_t c) {
        for (std::size_t i = plan.begin(c); i < plan.end(c); ++i) {
            w[i] = checked_weight(complex_weight(ev, dual_factors(unique[i], duals), obs), real).value;
        }
    });
    std::map<std::vector<std::uint8_t>, double> lookup;
    for (std::size_t i = 0; i < unique.size(); ++i) {
        lookup.emplace(unique[i], w[i]);
    }
    std::vector<double> per_shot(batch.shots());
    for (std::size_t s = 0; s < batch.shots(); ++s) {
        per_shot[s] = lookup.at(batch.row(s));
    }
    Estimate e;
    // Sum over the sorted unique outcomes so the result does not depend on shot order.
    double sum = 0.0;
    for (std::size_t i = 0; i < unique.size(); ++i) {
        sum += static_cast<double>(hist.at(unique[i])) * w[i];
    }
    const double s = static_cast<double>(batch.shots());
    const double mean = sum / s;
    double ss = 0.0;
    for (std::size_t i = 0; i < unique.size(); ++i) {
        ss += static_cast<double>(hist.at(unique[i])) * (w[i] - mean) * (w[i] - mean);
    }
    e.value = mean;
    e.sigma = std::sqrt(ss / (s - 1.0) / s);
    e.shots = batch.shots();
    e.batch_id = "seed=" + std::to_string(batch.seed);
    if (opts.keep_per_shot) {
        e.per_shot = std::move(per_shot);
    }
    return e;
}

inline Estimate estimate(const OutcomeBatch &batch, const std::vector<DualFrame> &duals, const MapCircuit &circuit,
                         const Observable &obs, const EstimateOptions &opts = {}) {
    return estimate(batch, duals, ConeEvaluator(circuit, opts.max_active), obs, opts);
}

/// sum_m p_m w_m over the full outcome distribution of rho.
inline double estimate_exact(const Matrix &rho, const std::vector<SingleQubitPOVM> &povms,
                             const std::vector<DualFrame> &duals, const MapCircuit &circuit, const Observable &obs,
                             int max_active = 0, int threads = 1) {
    return weighted_value(ConeEvaluator(circuit, max_active), data_from_state(rho, povms, duals), obs, threads);
}

/// Unbiased sample covariance of two per-shot weight series over the same
/// batch, divided by S.
inline double estimate_covariance(const Estimate &a, const Estimate &b) {
    require(a.per_shot.size() == b.per_shot.size(), "covariance needs per-shot weights of equal length");
    require(a.batch_id == b.batch_id, "covariance needs estimates from the same batch");
    const std::size_t n = a.per_shot.size();
    require(n >= 2, "covariance needs S >= 2");
    double ma = 0.0, mb = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        ma += a.per_shot[i];
        mb += b.per_shot[i];
    }
    ma /= static_cast<double>(n);
    mb /= static_cast<double>(n);
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        acc += (a.per_shot[i] - ma) * (b.per_shot[i] - mb);
    }
    return acc / static_cast<double>(n - 1) / static_cast<double>(n);
}

inline json estimate_to_json(const Estimate &e) {
    return json{{"observable", e.observable_id}, {"circuit", e.circuit_id}, {"batch", e.batch_id},
                {"value", e.value},           {"sigma", e.sigma},        {"S", e.shots}};
}

}  // namespace vilma

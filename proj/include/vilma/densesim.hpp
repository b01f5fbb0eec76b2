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

// Dense density-matrix simulation: state preparation, IC-POVM outcome
// sampling, and brute-force references for the cone engine.

#include "vilma/circuit.hpp"
#include "vilma/kernels.hpp"
#include "vilma/pauli.hpp"
#include "vilma/povm.hpp"

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

namespace vilma {

inline int qubits_of_dim(Eigen::Index dim) {
    int n = 0;
    while (static_cast<Eigen::Index>(pow2(n)) < dim) {
        ++n;
    }
    require(static_cast<Eigen::Index>(pow2(n)) == dim, "operator dimension is not a power of two");
    return n;
}

struct StateCheck {
    double hermiticity_error = 0.0;
    double trace_error = 0.0;
    double min_eigenvalue = 0.0;

    bool valid(double tol = 1e-10, double psd_tol = 1e-8) const {
        return hermiticity_error <= tol && trace_error <= tol && min_eigenvalue >= -psd_tol;
    }
};

inline StateCheck check_state(const Matrix &rho) {
    StateCheck c;
    c.hermiticity_error = max_abs(rho - rho.adjoint());
    c.trace_error = std::abs(rho.trace() - cplx(1.0, 0.0));
    c.min_eigenvalue = min_eigenvalue(rho);
    return c;
}

inline Matrix zero_state(int n) {
    Matrix rho = Matrix::Zero(static_cast<Eigen::Index>(pow2(n)), static_cast<Eigen::Index>(pow2(n)));
    rho(0, 0) = 1.0;
    return rho;
}

inline Matrix maximally_mixed(int n) {
    const auto d = static_cast<Eigen::Index>(pow2(n));
    return Matrix::Identity(d, d) / static_cast<double>(d);
}

inline Matrix pure_state(const Vector &psi) { return psi * psi.adjoint() / psi.squaredNorm(); }

/// Image of rho under `map` on `qubits`, identity on the rest.
inline Matrix apply_local_map(const Matrix &rho, const LocalMap &map, const std::vector<int> &qubits) {
    const int n = qubits_of_dim(rho.rows());
    require(static_cast<int>(qubits.size()) == map.arity(), "apply_local_map: arity mismatch");
    for (std::size_t i = 0; i < qubits.size(); ++i) {
        require(qubits[i] >= 0 && qubits[i] < n, "apply_local_map: qubit index out of range");
        for (std::size_t j = 0; j < i; ++j) {
            require(qubits[i] != qubits[j], "apply_local_map: repeated qubit index");
        }
    }
    Matrix out = kernels::apply_superop_at(rho, n, map.superop(), qubits);
    if (map.flags().tp && std::abs(out.trace() - rho.trace()) > 1e-10 * std::max(1.0, std::abs(rho.trace()))) {
        throw NumericalError("trace not preserved by a TP map");
    }
    return out;
}

inline Matrix apply_circuit(const Matrix &rho, const MapCircuit &circuit) {
    Matrix out = rho;
    for (const auto &c : circuit.components()) {
        out = apply_local_map(out, c.map, c.qubits);
    }
    return out;
}

struct PerturbedState {
    Matrix rho;
    MapCircuit perturbation;  // the channels that were applied, in order
};

/// One brickwork layer pair of channels (1 - p) Id + p E_ij, each E_ij drawn
/// from `sample`: pairs (0,1),(2,3),... then (1,2),(3,4),...
inline PerturbedState build_perturbed_state(const Matrix &rho0, double p, const std::function<LocalMap()> &sample) {
    require(p >= 0.0 && p <= 1.0, "perturbation weight p must lie in [0, 1]");
    const int n = qubits_of_dim(rho0.rows());
    require(n >= 2, "perturbation needs at least two qubits");
    PerturbedState out{rho0, MapCircuit(n, "brickwork")};
    for (int layer = 1; layer <= 2; ++layer) {
        for (auto [i, j] : brickwork_pairs(n, layer)) {
            out.perturbation.add(layer, {i, j}, affine_combination(1.0 - p, LocalMap::identity(2), p, sample()));
        }
    }
    out.rho = apply_circuit(rho0, out.perturbation);
    return out;
}

/// Same with independent random CPTP maps E_ij.
inline PerturbedState build_perturbed_state(const Matrix &rho0, double p, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    return build_perturbed_state(rho0, p, [&rng] { return random_cptp(2, rng); });
}

/// Circuit undoing `c`: reversed order, each component inverted.
inline MapCircuit inverse_circuit(const MapCircuit &c) {
    MapCircuit out(c.num_qubits(), c.topology() == "brickwork" ? "brickwork" : "general");
    const int top = c.num_layers();
    for (auto it = c.components().rbegin(); it != c.components().rend(); ++it) {
        out.add(top + 1 - it->layer, it->qubits, invert_map(it->map));
    }
    return out;
}

inline LocalMap noisy_cnot(double theta, double p_dep) { return presets::noisy_cnot(theta, p_dep); }

/// Imprints the noise of `reps` sweeps of noisy CNOT pairs along the chain;
/// each pair would be the identity without noise.
inline Matrix noisy_cnot_chain(const Matrix &rho, int reps, double theta, double p_dep) {
    const int n = qubits_of_dim(rho.rows());
    const LocalMap g = presets::noisy_cnot(theta, p_dep);
    Matrix out = rho;
    for (int r = 0; r < reps; ++r) {
        for (int i = 0; i + 1 < n; ++i) {
            out = apply_local_map(out, g, {i, i + 1});
            out = apply_local_map(out, g, {i, i + 1});
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Outcome data
// ---------------------------------------------------------------------------

/// S outcome strings of N four-valued POVM outcomes.
struct OutcomeBatch {
    int num_qubits = 0;
    std::vector<std::uint8_t> outcomes;  // row-major S x N
    std::string povm_label = "sic";
    std::uint64_t seed = 0;
    std::string source;

    std::size_t shots() const { return num_qubits == 0 ? 0 : outcomes.size() / static_cast<std::size_t>(num_qubits); }

    std::uint8_t at(std::size_t shot, int qubit) const {
        return outcomes[shot * static_cast<std::size_t>(num_qubits) + static_cast<std::size_t>(qubit)];
    }

    std::vector<std::uint8_t> row(std::size_t shot) const {
        auto b = outcomes.begin() + static_cast<std::ptrdiff_t>(shot * static_cast<std::size_t>(num_qubits));
        return {b, b + num_qubits};
    }

    /// Sorted unique outcome strings with their multiplicities.
    std::map<std::vector<std::uint8_t>, std::size_t> histogram() const {
        std::map<std::vector<std::uint8_t>, std::size_t> h;
        for (std::size_t s = 0; s < shots(); ++s) {
            ++h[row(s)];
        }
        return h;
    }
};

inline std::string write_batch_csv(const OutcomeBatch &b) {
    std::ostringstream os;
    os << "# povm=" << b.povm_label << " seed=" << b.seed << " N=" << b.num_qubits << " S=" << b.shots() << "\n";
    for (std::size_t s = 0; s < b.shots(); ++s) {
        for (int q = 0; q < b.num_qubits; ++q) {
            os << (q ? "," : "") << static_cast<int>(b.at(s, q));
        }
        os << "\n";
    }
    return os.str();
}

inline OutcomeBatch parse_batch_csv(const std::string &text) {
    std::istringstream in(text);
    std::string line;
    require(static_cast<bool>(std::getline(in, line)) && line.rfind("#", 0) == 0,
            "batch: missing '# povm=... seed=... N=... S=...' header");
    OutcomeBatch b;
    std::map<std::string, std::string> kv;
    {
        std::istringstream hs(line.substr(1));
        std::string tok;
        while (hs >> tok) {
            auto eq = tok.find('=');
            if (eq != std::string::npos) {
                kv[tok.substr(0, eq)] = tok.substr(eq + 1);
            }
        }
    }
    for (const char *key : {"povm", "seed", "N", "S"}) {
        require(kv.count(key) > 0, std::string("batch header lacks ") + key);
    }
    std::size_t expected = 0;
    try {
        b.povm_label = kv["povm"];
        b.seed = std::stoull(kv["seed"]);
        b.num_qubits = std::stoi(kv["N"]);
        expected = std::stoull(kv["S"]);
    } catch (const std::exception &) {
        throw ValidationError("batch header has malformed numbers");
    }
    require(b.num_qubits > 0, "batch header: N must be positive");
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line == "\r") {
            continue;
        }
        int count = 0;
        for (char ch : line) {
            if (ch == ',' || ch == '\r' || ch == ' ') {
                continue;
            }
            require(ch >= '0' && ch <= '3',
                    "batch line " + std::to_string(lineno) + ": outcome must be an integer in 0..3");
            b.outcomes.push_back(static_cast<std::uint8_t>(ch - '0'));
            ++count;
        }
        require(count == b.num_qubits, "batch line " + std::to_string(lineno) + ": expected " +
                                           std::to_string(b.num_qubits) + " outcomes, got " + std::to_string(count));
    }
    require(b.shots() == expected, "batch: header says S=" + std::to_string(expected) + " but file has " +
                                       std::to_string(b.shots()) + " rows");
    return b;
}

/// Exact distribution p_m = Tr[rho ⊗_q Pi^{(q)}_{m_q}] over all 4^N outcome
/// strings; outcome index has qubit 0 as the most significant base-4 digit.
inline std::vector<double> outcome_distribution(const Matrix &rho, const std::vector<SingleQubitPOVM> &povms) {
    const int n = qubits_of_dim(rho.rows());
    require(static_cast<int>(povms.size()) == n, "one POVM per qubit required");
    require(n <= 10, "exact outcome distribution limited to N <= 10");
    const std::size_t total = pow4(n);
    std::vector<cplx> t(total);
    const std::size_t dim = pow2(n);
    for (std::size_t r = 0; r < dim; ++r) {
        for (std::size_t c = 0; c < dim; ++c) {
            std::size_t idx = 0;
            for (int q = 0; q < n; ++q) {
                const std::size_t rb = (r >> (n - 1 - q)) & 1u;
                const std::size_t cb = (c >> (n - 1 - q)) & 1u;
                idx = idx * 4 + 2 * rb + cb;
            }
            t[idx] = rho(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
        }
    }
    for (int q = 0; q < n; ++q) {
        // transform[m][2 r + c] = Pi_m(c, r)
        cplx transform[4][4];
        for (int m = 0; m < 4; ++m)
            for (int r = 0; r < 2; ++r)
                for (int c = 0; c < 2; ++c)
                    transform[m][2 * r + c] = povms[static_cast<std::size_t>(q)].effects[m](c, r);
        const std::size_t stride = pow4(n - 1 - q);
        for (std::size_t base = 0; base < total; ++base) {
            if ((base / stride) % 4 != 0) {
                continue;
            }
            cplx in[4];
            for (int a = 0; a < 4; ++a) {
                in[a] = t[base + static_cast<std::size_t>(a) * stride];
            }
            for (int m = 0; m < 4; ++m) {
                cplx acc = 0.0;
                for (int a = 0; a < 4; ++a) {
                    acc += transform[m][a] * in[a];
                }
                t[base + static_cast<std::size_t>(m) * stride] = acc;
            }
        }
    }
    std::vector<double> p(total);
    for (std::size_t i = 0; i < total; ++i) {
        p[i] = t[i].real();
    }
    return p;
}

inline std::vector<std::uint8_t> outcome_digits(std::size_t index, int n) {
    std::vector<std::uint8_t> d(static_cast<std::size_t>(n));
    for (int q = n - 1; q >= 0; --q) {
        d[static_cast<std::size_t>(q)] = static_cast<std::uint8_t>(index & 3u);
        index >>= 2;
    }
    return d;
}

namespace detail {

inline double uniform01(std::mt19937_64 &rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

// Shot counts for every outcome string by recursive qubit-by-qubit conditioning.
inline void conditional_counts(const Matrix &sigma, int n, const std::vector<SingleQubitPOVM> &povms, int depth,
                               std::size_t shots, std::size_t prefix, std::mt19937_64 &rng,
                               std::map<std::size_t, std::size_t> &counts) {
    if (shots == 0) {
        return;
    }
    const int remaining = n - depth;
    if (remaining == 0) {
        counts[prefix] += shots;
        return;
    }
    const auto &povm = povms[static_cast<std::size_t>(depth)];
    std::array<Matrix, 4> cond;
    std::array<double, 4> prob{};
    for (int m = 0; m < 4; ++m) {
        cond[m] = kernels::trace_with_factor(sigma, remaining, 0, povm.effects[m]);
        prob[m] = std::max(0.0, cond[m].trace().real());
    }
    double left = std::accumulate(prob.begin(), prob.end(), 0.0);
    std::size_t to_assign = shots;
    for (int m = 0; m < 4; ++m) {
        std::size_t k = to_assign;
        if (m < 3) {
            double frac = left > 0.0 ? std::min(1.0, prob[m] / left) : 0.0;
            std::binomial_distribution<std::size_t> bin(to_assign, frac);
            k = bin(rng);
        }
        left -= prob[m];
        to_assign -= k;
        if (k > 0 && prob[m] > 0.0) {
            conditional_counts(cond[m] / prob[m], n, povms, depth + 1, k, prefix * 4 + static_cast<std::size_t>(m),
                               rng, counts);
        }
    }
}

}  // namespace detail

/// Draws S i.i.d. outcome strings from p_m = Tr[rho Pi_m]. Uses the exact 4^N
/// distribution up to `enumeration_limit` qubits, conditional sampling above.
inline OutcomeBatch sample_outcomes(const Matrix &rho, const std::vector<SingleQubitPOVM> &povms, std::size_t shots,
                                    std::uint64_t seed, int enumeration_limit = 9) {
    const int n = qubits_of_dim(rho.rows());
    require(static_cast<int>(povms.size()) == n, "one POVM per qubit required");
    require(n <= 12, "sampling limited to N <= 12");
    for (const auto &p : povms) {
        validate_povm(p, 1e-10);
    }
    OutcomeBatch b;
    b.num_qubits = n;
    b.seed = seed;
    b.povm_label = povms.front().label;
    b.outcomes.reserve(shots * static_cast<std::size_t>(n));
    std::mt19937_64 rng(seed);
    if (n <= enumeration_limit) {
        b.source = "exact-distribution";
        auto p = outcome_distribution(rho, povms);
        std::vector<double> cdf(p.size());
        double acc = 0.0;
        for (std::size_t i = 0; i < p.size(); ++i) {
            acc += std::max(0.0, p[i]);
            cdf[i] = acc;
        }
        for (std::size_t s = 0; s < shots; ++s) {
            const double u = detail::uniform01(rng) * acc;
            auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
            std::size_t idx = std::min<std::size_t>(static_cast<std::size_t>(it - cdf.begin()), cdf.size() - 1);
            auto d = outcome_digits(idx, n);
            b.outcomes.insert(b.outcomes.end(), d.begin(), d.end());
        }
    } else {
        b.source = "conditional";
        std::map<std::size_t, std::size_t> counts;
        detail::conditional_counts(rho, n, povms, 0, shots, 0, rng, counts);
        std::vector<std::size_t> order;
        order.reserve(shots);
        for (auto [idx, k] : counts) {
            order.insert(order.end(), k, idx);
        }
        for (std::size_t i = order.size(); i > 1; --i) {
            std::size_t j = static_cast<std::size_t>(detail::uniform01(rng) * static_cast<double>(i));
            std::swap(order[i - 1], order[std::min(j, i - 1)]);
        }
        for (auto idx : order) {
            auto d = outcome_digits(idx, n);
            b.outcomes.insert(b.outcomes.end(), d.begin(), d.end());
        }
    }
    return b;
}

// ---------------------------------------------------------------------------
// Brute-force references
// ---------------------------------------------------------------------------

namespace detail {

inline Matrix embedded_pauli(std::size_t local_index, const std::vector<int> &qubits, int n) {
    const int k = static_cast<int>(qubits.size());
    std::vector<int> letters(static_cast<std::size_t>(n), 0);
    for (int t = 0; t < k; ++t) {
        letters[static_cast<std::size_t>(qubits[static_cast<std::size_t>(t)])] =
            static_cast<int>((local_index >> (2 * (k - 1 - t))) & 3u);
    }
    Matrix out = Matrix::Identity(1, 1);
    for (int q = 0; q < n; ++q) {
        out = kron(out, Matrix(pauli_matrix::by_index(letters[static_cast<std::size_t>(q)])));
    }
    return out;
}

}  // namespace detail

/// Applies every component to the full 2^N x 2^N operator through the
/// Pauli operator-sum form L(X) = sum_ij chi_ij P_i X P_j embedded in the
/// whole register. Test oracle only.
inline Matrix dense_map_circuit_oracle(const MapCircuit &circuit, const Matrix &input) {
    const int n = circuit.num_qubits();
    require(n <= 6, "dense oracle limited to N <= 6");
    require(input.rows() == static_cast<Eigen::Index>(pow2(n)) && input.cols() == input.rows(),
            "dense oracle: input dimension mismatch");
    Matrix x = input;
    for (const auto &comp : circuit.components()) {
        const int k = comp.map.arity();
        const std::size_t nb = pow4(k);
        const double d2 = static_cast<double>(pow4(k));
        std::vector<Matrix> local(nb), full(nb);
        for (std::size_t i = 0; i < nb; ++i) {
            local[i] = pauli_basis_element(i, k);
            full[i] = detail::embedded_pauli(i, comp.qubits, n);
        }
        // chi_ij = <P_j^T ⊗ P_i, S>_HS / d^2
        Matrix chi(static_cast<Eigen::Index>(nb), static_cast<Eigen::Index>(nb));
        for (std::size_t i = 0; i < nb; ++i) {
            for (std::size_t j = 0; j < nb; ++j) {
                Matrix basis = kron(local[j].transpose(), local[i]);
                chi(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                    (basis.adjoint() * comp.map.superop()).trace() / d2;
            }
        }
        std::vector<Matrix> left(nb);
        for (std::size_t i = 0; i < nb; ++i) {
            left[i] = full[i] * x;
        }
        Matrix y = Matrix::Zero(x.rows(), x.cols());
        for (std::size_t j = 0; j < nb; ++j) {
            Matrix acc = Matrix::Zero(x.rows(), x.cols());
            bool any = false;
            for (std::size_t i = 0; i < nb; ++i) {
                cplx c = chi(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
                if (std::abs(c) > 1e-15) {
                    acc += c * left[i];
                    any = true;
                }
            }
            if (any) {
                y += acc * full[j];
            }
        }
        x = std::move(y);
    }
    return x;
}

struct GroundState {
    double energy = 0.0;
    Vector vector;
};

/// Smallest eigenvalue of the dense observable matrix.
inline GroundState exact_ground_energy(const Observable &obs) {
    require(obs.num_qubits() <= 12, "exact_ground_energy limited to N <= 12");
    require(obs.is_hermitian(), "exact_ground_energy needs a Hermitian observable");
    Eigen::SelfAdjointEigenSolver<Matrix> es(obs.dense());
    return {es.eigenvalues()(0), es.eigenvectors().col(0)};
}

/// Dense product operator ⊗_q factors[q].
inline Matrix product_operator(const std::vector<Matrix2> &factors) {
    Matrix out = Matrix::Identity(1, 1);
    for (const auto &f : factors) {
        out = kron(out, Matrix(f));
    }
    return out;
}

// ---------------------------------------------------------------------------
// State-preparation files
// ---------------------------------------------------------------------------

/// Either a bare list of {"qubits", "map"} operations applied to |0...0>, or
/// {"num_qubits": N, "initial": "zero" | "mixed" | {"ground": <observable>},
///  "ops": [...]}. `num_qubits_hint` sizes a bare list (0: infer from indices).
inline Matrix prepare_state(const json &doc, int num_qubits_hint = 0) {
    const json *ops = &doc;
    int n = num_qubits_hint;
    Matrix rho;
    if (doc.is_object()) {
        require(doc.contains("num_qubits") && doc["num_qubits"].is_number_integer(), "state prep: missing num_qubits");
        n = doc["num_qubits"].get<int>();
        require(n >= 1 && n <= 12, "state prep: num_qubits must lie in 1..12");
        const json initial = doc.value("initial", json("zero"));
        if (initial.is_string() && initial == "zero") {
            rho = zero_state(n);
        } else if (initial.is_string() && initial == "mixed") {
            rho = maximally_mixed(n);
        } else if (initial.is_object() && initial.contains("ground")) {
            Observable h = observable_from_json(initial["ground"]);
            require(h.num_qubits() == n, "state prep: ground-state observable width mismatch");
            rho = pure_state(exact_ground_energy(h).vector);
        } else {
            throw ValidationError("state prep: initial must be \"zero\", \"mixed\" or {\"ground\": observable}");
        }
        static const json empty = json::array();
        ops = doc.contains("ops") ? &doc["ops"] : &empty;
    }
    require(ops->is_array(), "state prep: expected a list of operations");
    if (n <= 0) {
        for (const auto &op : *ops) {
            if (op.is_object() && op.contains("qubits") && op["qubits"].is_array()) {
                for (const auto &q : op["qubits"]) {
                    if (q.is_number_integer()) {
                        n = std::max(n, q.get<int>() + 1);
                    }
                }
            }
        }
    }
    require(n >= 1 && n <= 12, "state prep: cannot determine a qubit count in 1..12");
    if (rho.size() == 0) {
        rho = zero_state(n);
    }
    std::size_t idx = 0;
    for (const auto &op : *ops) {
        const std::string where = "state prep operation " + std::to_string(idx++);
        require(op.is_object() && op.contains("qubits") && op["qubits"].is_array() && op.contains("map"),
                where + ": needs qubits and map");
        std::vector<int> qubits;
        for (const auto &q : op["qubits"]) {
            require(q.is_number_integer(), where + ": qubit indices must be integers");
            qubits.push_back(q.get<int>());
        }
        require(!qubits.empty() && qubits.size() <= 2, where + ": operations act on 1 or 2 qubits");
        try {
            rho = apply_local_map(rho, map_from_json(op["map"], static_cast<int>(qubits.size())), qubits);
        } catch (const ValidationError &e) {
            throw ValidationError(where + ": " + e.what());
        }
    }
    const StateCheck check = check_state(rho);
    if (!check.valid()) {
        throw NumericalError("state prep does not yield a density matrix (trace error " +
                             std::to_string(check.trace_error) + ", min eigenvalue " +
                             std::to_string(check.min_eigenvalue) + ")");
    }
    return rho;
}

inline Matrix prepare_state(const std::string &text, int num_qubits_hint = 0) {
    return prepare_state(parse_json(text, "state prep"), num_qubits_hint);
}

}  // namespace vilma

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

#include "vilma/estimation.hpp"
#include "vilma/sdp.hpp"

#include <algorithm>
#include <numeric>
#include <optional>
#include <sstream>

namespace vilma {

/// Linear objective Re Tr[C M] over the Choi matrix C of one component.
struct LocalObjective {
    int component = 0;
    int arity = 2;
    Matrix m;
    double offset = 0.0;

    double value(const Matrix &choi) const { return (choi * m).trace().real() + offset; }
};

/// M = Herm sum_entries w sum_k c_k sum_a (R_a^T ⊗ Rbar_a), from the split
/// of the circuit around `component`.
inline LocalObjective assemble_local_objective(const ConeEvaluator &ev, int component, const InputData &data,
                                               const Observable &obs, int threads = 1) {
    require(component >= 0 && static_cast<std::size_t>(component) < ev.circuit().size(),
            "component index out of range");
    require(obs.num_qubits() == ev.circuit().num_qubits(), "observable width does not match circuit");
    const int arity = ev.circuit()[static_cast<std::size_t>(component)].map.arity();
    const auto dim = static_cast<Eigen::Index>(pow4(arity));
    ChunkPlan plan{data.entries.size(), 32};
    std::vector<Matrix> partial(plan.count(), Matrix::Zero(dim, dim));
    parallel_chunks(plan, threads, [&](std::size_t c) {
        Matrix acc = Matrix::Zero(dim, dim);
        for (std::size_t i = plan.begin(c); i < plan.end(c); ++i) {
            const auto &e = data.entries[i];
            for (const auto &t : obs.terms()) {
                const cplx w = e.weight * t.coeff;
                for (const auto &[r, rbar] : ev.split_pairs(component, e.factors, ConeEvaluator::pauli_factors(t.string))) {
                    acc += w * kron(r.transpose(), rbar);
                }
            }
        }
        partial[c] = std::move(acc);
    });
    Matrix total = Matrix::Zero(dim, dim);
    for (const auto &p : partial) {
        total += p;
    }
    return {component, arity, hermitian_part(total), 0.0};
}

inline LocalObjective assemble_local_objective(const MapCircuit &circuit, int component, const InputData &data,
                                               const Observable &obs, int max_active = 0) {
    return assemble_local_objective(ConeEvaluator(circuit, max_active), component, data, obs);
}

inline SdpResult minimize_over_cptp(const LocalObjective &obj, const SdpOptions &opts = {},
                                    const std::optional<Matrix> &warm_start = std::nullopt) {
    SdpResult r = minimize_over_cptp(obj.m, opts, warm_start);
    r.objective += obj.offset;
    r.lower_bound += obj.offset;
    return r;
}

struct SweepIteration {
    int round = 0;
    int component = 0;
    double before = 0.0;
    double after = 0.0;  // objective of the SDP solution, installed or not
    bool installed = false;
    SdpResult solver;     // choi omitted from reports
};

struct SweepReport {
    std::vector<SweepIteration> iterations;
    std::vector<double> energies;  // energies[0] is the starting value; one entry per iteration after
    int unconverged_solves = 0;
    std::optional<double> ground_energy;

    double initial_energy() const { return energies.front(); }
    double final_energy() const { return energies.back(); }

    /// Largest increase between consecutive energies (<= 0 for a monotone run).
    double max_increase() const {
        double worst = -std::numeric_limits<double>::infinity();
        for (std::size_t i = 1; i < energies.size(); ++i) {
            worst = std::max(worst, energies[i] - energies[i - 1]);
        }
        return energies.size() < 2 ? 0.0 : worst;
    }

    std::optional<double> relative_error(double e) const {
        if (!ground_energy || *ground_energy == 0.0) {
            return std::nullopt;
        }
        return std::abs(e - *ground_energy) / std::abs(*ground_energy);
    }
};

inline std::string sweep_report_csv(const SweepReport &r) {
    std::ostringstream os;
    os.precision(17);
    os << "iteration,component,energy,relative_error\n";
    auto row = [&](std::size_t i, int comp, double e) {
        os << i << "," << comp << "," << e << ",";
        if (auto re = r.relative_error(e)) {
            os << *re;
        }
        os << "\n";
    };
    row(0, -1, r.energies.front());
    for (std::size_t i = 0; i < r.iterations.size(); ++i) {
        row(i + 1, r.iterations[i].component, r.energies[i + 1]);
    }
    return os.str();
}

struct SweepOptions {
    int rounds = 20;
    std::vector<int> order;  // empty: layer-major, left to right
    SdpOptions sdp;
    double accept_tol = 1e-8;
    double round_tol = 1e-10;  // stop once a full round gains less than this
    int max_active = 0;
    int threads = 1;
    std::optional<double> ground_energy;
};

inline std::vector<int> default_sweep_order(const MapCircuit &c) {
    std::vector<int> order(c.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        const auto &x = c[static_cast<std::size_t>(a)];
        const auto &y = c[static_cast<std::size_t>(b)];
        if (x.layer != y.layer) {
            return x.layer < y.layer;
        }
        return x.qubits.front() < y.qubits.front();
    });
    return order;
}

struct SweepResult {
    SweepReport report;
    MapCircuit circuit;
};

/// Coordinate descent: each component in turn is replaced by the CPTP map
/// minimizing the estimator with all others fixed, when that lowers it by
/// more than accept_tol.
inline SweepResult sweep(MapCircuit circuit, const InputData &data, const Observable &obs,
                         const SweepOptions &opts = {}) {
    require(opts.rounds >= 1, "sweep needs at least one round");
    require(data.num_qubits == circuit.num_qubits(), "data width does not match circuit");
    std::vector<int> order = opts.order.empty() ? default_sweep_order(circuit) : opts.order;
    {
        std::vector<int> sorted = order;
        std::sort(sorted.begin(), sorted.end());
        for (std::size_t i = 0; i < sorted.size(); ++i) {
            require(sorted[i] >= 0 && static_cast<std::size_t>(sorted[i]) < circuit.size() &&
                        (i == 0 || sorted[i] != sorted[i - 1]),
                    "sweep order must list distinct component indices");
        }
    }
    const EvaluationSchedule plan = schedule(circuit, opts.max_active);
    SweepResult out{{}, circuit};
    out.report.ground_energy = opts.ground_energy;
    out.report.energies.push_back(weighted_value(ConeEvaluator(circuit, plan), data, obs, opts.threads));
    for (int round = 1; round <= opts.rounds; ++round) {
        const double round_start = out.report.energies.back();
        int installed = 0;
        for (int s : order) {
            ConeEvaluator ev(out.circuit, plan);
            LocalObjective obj = assemble_local_objective(ev, s, data, obs, opts.threads);
            const Matrix current = out.circuit[static_cast<std::size_t>(s)].map.choi();
            SweepIteration step;
            step.round = round;
            step.component = s;
            step.before = obj.value(current);
            step.solver = minimize_over_cptp(obj, opts.sdp, current);
            step.after = step.solver.objective;
            if (!step.solver.converged) {
                ++out.report.unconverged_solves;
            }
            double energy = step.before;
            if (step.before - step.after > opts.accept_tol) {
                out.circuit.replace_map(static_cast<std::size_t>(s), LocalMap::from_choi(step.solver.choi));
                step.installed = true;
                energy = step.after;
                ++installed;
            }
            step.solver.choi = Matrix();
            out.report.iterations.push_back(std::move(step));
            out.report.energies.push_back(energy);
        }
        if (installed == 0 || round_start - out.report.energies.back() < opts.round_tol) {
            break;
        }
    }
    return out;
}

inline MapCircuit random_unitary_staircase(int n, int layers, std::uint64_t seed) {
    MapCircuit c = staircase(n, layers);
    std::mt19937_64 rng(seed);
    for (std::size_t i = 0; i < c.size(); ++i) {
        c.replace_map(i, LocalMap::unitary(haar_unitary(4, rng)));
    }
    return c;
}

struct AnsatzOptions {
    int layers = 1;
    std::string init = "identity";  // or "random_unitary"
    std::uint64_t seed = 0;
    SweepOptions sweep;
};

/// Sweeps a staircase circuit fed with the classical product input |0...0>.
inline SweepResult classical_ansatz(int n, const Observable &obs, const AnsatzOptions &opts) {
    require(obs.num_qubits() == n, "observable width does not match N");
    MapCircuit c(n, "staircase");
    if (opts.init == "identity") {
        c = staircase(n, opts.layers);
    } else if (opts.init == "random_unitary") {
        c = random_unitary_staircase(n, opts.layers, opts.seed);
    } else {
        throw ValidationError("unknown ansatz init '" + opts.init + "' (expected identity or random_unitary)");
    }
    return sweep(std::move(c), zero_product_data(n), obs, opts.sweep);
}

/// Precomposes a reset to |0> on each qubit's first use, so the circuit
/// output no longer depends on its input; untouched qubits get a lone reset.
inline MapCircuit zreset_compose(const MapCircuit &circuit) {
    require(circuit.topology() == "brickwork" || circuit.topology() == "staircase",
            "zreset_compose needs a brickwork or staircase circuit");
    const int n = circuit.num_qubits();
    std::vector<bool> reset(static_cast<std::size_t>(n), false);
    MapCircuit out(n, circuit.topology());
    for (const auto &c : circuit.components()) {
        std::vector<LocalMap> stages;
        for (std::size_t t = 0; t < c.qubits.size(); ++t) {
            auto q = static_cast<std::size_t>(c.qubits[t]);
            if (!reset[q]) {
                reset[q] = true;
                stages.push_back(tensor_extend(presets::zreset(), c.map.arity(), {static_cast<int>(t)}));
            }
        }
        stages.push_back(c.map);
        out.add(c.layer, c.qubits, compose(stages));
    }
    for (int q = 0; q < n; ++q) {
        if (!reset[static_cast<std::size_t>(q)]) {
            out.add(1, {q}, presets::zreset());
        }
    }
    return out;
}

}  // namespace vilma

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

// Causal-cone evaluation of Tr[L(D_1 ⊗ ... ⊗ D_N) (P_1 ⊗ ... ⊗ P_N)] for a
// circuit L of local maps, never forming operators on more than `max_active`
// qubits.
//
// A schedule is a list of three step kinds run against a residual operator
// on an ordered set of active qubits:
//   Absorb(q)  residual <- residual ⊗ D_q
//   Apply(c)   residual <- (L_c ⊗ id)(residual)
//   Trace(q)   residual <- Tr_q[residual (P_q ⊗ I)]
// starting from the scalar 1 and ending at the scalar result.

#include "vilma/circuit.hpp"
#include "vilma/kernels.hpp"
#include "vilma/pauli.hpp"

#include <algorithm>
#include <sstream>
#include <string>
#include <vector>

namespace vilma {

enum class StepKind { Absorb, Apply, Trace };

struct Step {
    StepKind kind;
    int index;  // qubit for Absorb/Trace, component for Apply

    friend bool operator==(const Step &, const Step &) = default;
};

struct EvaluationSchedule {
    int num_qubits = 0;
    int max_active = 0;
    int peak_active = 0;
    std::vector<Step> steps;

    /// Position of Apply(component) in `steps`.
    std::size_t apply_position(int component) const {
        for (std::size_t i = 0; i < steps.size(); ++i) {
            if (steps[i].kind == StepKind::Apply && steps[i].index == component) {
                return i;
            }
        }
        throw ValidationError("component " + std::to_string(component) + " is not in the schedule");
    }

    std::string listing() const {
        std::ostringstream os;
        os << "# schedule N=" << num_qubits << " max_active=" << max_active << " peak=" << peak_active << "\n";
        for (const auto &s : steps) {
            switch (s.kind) {
            case StepKind::Absorb:
                os << "absorb " << s.index << "\n";
                break;
            case StepKind::Apply:
                os << "apply " << s.index << "\n";
                break;
            case StepKind::Trace:
                os << "trace " << s.index << "\n";
                break;
            }
        }
        return os.str();
    }
};

/// Layers + 1 for layered topologies, N otherwise.
inline int default_max_active(const MapCircuit &c) {
    if (c.topology() == "brickwork" || c.topology() == "staircase") {
        return std::min(c.num_qubits(), std::max(2, c.num_layers() + 1));
    }
    return c.num_qubits();
}

namespace detail {

// Direct predecessors: the previous component touching each of c's qubits.
inline std::vector<std::vector<int>> predecessors(const MapCircuit &c) {
    std::vector<int> last(static_cast<std::size_t>(c.num_qubits()), -1);
    std::vector<std::vector<int>> pred(c.size());
    for (std::size_t i = 0; i < c.size(); ++i) {
        for (int q : c[i].qubits) {
            int p = last[static_cast<std::size_t>(q)];
            if (p >= 0 && std::find(pred[i].begin(), pred[i].end(), p) == pred[i].end()) {
                pred[i].push_back(p);
            }
            last[static_cast<std::size_t>(q)] = static_cast<int>(i);
        }
    }
    return pred;
}

}  // namespace detail

enum class TieBreak { LowestQubit, HighestQubit };

/// Greedy causal-cone schedule: repeatedly trace the qubit whose remaining past
/// cone needs the fewest simultaneously active qubits. max_active <= 0 means
/// default_max_active(circuit).
inline EvaluationSchedule schedule(const MapCircuit &circuit, int max_active = 0,
                                   TieBreak tie = TieBreak::LowestQubit) {
    const int n = circuit.num_qubits();
    if (max_active <= 0) {
        max_active = default_max_active(circuit);
    }
    const auto pred = detail::predecessors(circuit);
    std::vector<char> applied(circuit.size(), 0);
    std::vector<char> absorbed(static_cast<std::size_t>(n), 0);
    std::vector<char> traced(static_cast<std::size_t>(n), 0);
    std::vector<int> active;
    EvaluationSchedule sched;
    sched.num_qubits = n;
    sched.max_active = max_active;

    auto cone_of = [&](int q) {
        std::vector<char> in(circuit.size(), 0);
        std::vector<int> stack;
        for (std::size_t i = 0; i < circuit.size(); ++i) {
            const auto &qs = circuit[i].qubits;
            if (!applied[i] && std::find(qs.begin(), qs.end(), q) != qs.end()) {
                stack.push_back(static_cast<int>(i));
            }
        }
        while (!stack.empty()) {
            int i = stack.back();
            stack.pop_back();
            if (in[static_cast<std::size_t>(i)]) {
                continue;
            }
            in[static_cast<std::size_t>(i)] = 1;
            for (int p : pred[static_cast<std::size_t>(i)]) {
                if (!applied[static_cast<std::size_t>(p)]) {
                    stack.push_back(p);
                }
            }
        }
        std::vector<int> cone;
        for (std::size_t i = 0; i < circuit.size(); ++i) {
            if (in[i]) {
                cone.push_back(static_cast<int>(i));
            }
        }
        return cone;
    };

    auto absorb = [&](int q) {
        if (absorbed[static_cast<std::size_t>(q)]) {
            return;
        }
        absorbed[static_cast<std::size_t>(q)] = 1;
        active.insert(std::lower_bound(active.begin(), active.end(), q), q);
        sched.steps.push_back({StepKind::Absorb, q});
        sched.peak_active = std::max(sched.peak_active, static_cast<int>(active.size()));
    };

    for (int round = 0; round < n; ++round) {
        int best_q = -1;
        int best_size = 0;
        std::vector<int> best_cone;
        for (int t = 0; t < n; ++t) {
            const int q = tie == TieBreak::LowestQubit ? t : n - 1 - t;
            if (traced[static_cast<std::size_t>(q)]) {
                continue;
            }
            auto cone = cone_of(q);
            std::vector<int> f = active;
            f.push_back(q);
            for (int i : cone) {
                for (int x : circuit[static_cast<std::size_t>(i)].qubits) {
                    f.push_back(x);
                }
            }
            std::sort(f.begin(), f.end());
            f.erase(std::unique(f.begin(), f.end()), f.end());
            const int size = static_cast<int>(f.size());
            if (best_q < 0 || size < best_size) {
                best_q = q;
                best_size = size;
                best_cone = std::move(cone);
            }
        }
        if (best_size > max_active) {
            throw ScheduleError("no feasible schedule within max_active=" + std::to_string(max_active) +
                                    " (best found needs " + std::to_string(best_size) + " active qubits)",
                                best_size);
        }
        for (int i : best_cone) {
            auto qs = circuit[static_cast<std::size_t>(i)].qubits;
            std::sort(qs.begin(), qs.end());
            for (int x : qs) {
                absorb(x);
            }
            sched.steps.push_back({StepKind::Apply, i});
            applied[static_cast<std::size_t>(i)] = 1;
        }
        absorb(best_q);
        sched.steps.push_back({StepKind::Trace, best_q});
        traced[static_cast<std::size_t>(best_q)] = 1;
        active.erase(std::find(active.begin(), active.end(), best_q));
    }
    return sched;
}

/// Absorb everything, apply in circuit order, trace everything: the dense
/// evaluation order, valid for any circuit.
inline EvaluationSchedule dense_schedule(const MapCircuit &circuit) {
    EvaluationSchedule s;
    s.num_qubits = circuit.num_qubits();
    s.max_active = circuit.num_qubits();
    s.peak_active = circuit.num_qubits();
    for (int q = 0; q < circuit.num_qubits(); ++q) {
        s.steps.push_back({StepKind::Absorb, q});
    }
    for (std::size_t i = 0; i < circuit.size(); ++i) {
        s.steps.push_back({StepKind::Apply, static_cast<int>(i)});
    }
    for (int q = 0; q < circuit.num_qubits(); ++q) {
        s.steps.push_back({StepKind::Trace, q});
    }
    return s;
}

/// Checks the schedule invariants against the circuit's commutation structure.
inline void validate_schedule(const MapCircuit &circuit, const EvaluationSchedule &s) {
    const int n = circuit.num_qubits();
    const auto pred = detail::predecessors(circuit);
    std::vector<int> applied(circuit.size(), 0);
    std::vector<int> absorbed(static_cast<std::size_t>(n), 0);
    std::vector<int> traced(static_cast<std::size_t>(n), 0);
    int active = 0;
    for (const auto &st : s.steps) {
        switch (st.kind) {
        case StepKind::Absorb:
            require(st.index >= 0 && st.index < n && !absorbed[static_cast<std::size_t>(st.index)],
                    "schedule absorbs qubit " + std::to_string(st.index) + " twice or out of range");
            absorbed[static_cast<std::size_t>(st.index)] = 1;
            ++active;
            require(active <= s.max_active, "schedule exceeds max_active");
            break;
        case StepKind::Apply: {
            require(st.index >= 0 && static_cast<std::size_t>(st.index) < circuit.size(),
                    "schedule applies unknown component");
            auto i = static_cast<std::size_t>(st.index);
            require(!applied[i], "component " + std::to_string(i) + " applied twice");
            for (int q : circuit[i].qubits) {
                require(absorbed[static_cast<std::size_t>(q)] && !traced[static_cast<std::size_t>(q)],
                        "component " + std::to_string(i) + " applied on an inactive qubit");
            }
            for (int p : pred[i]) {
                require(applied[static_cast<std::size_t>(p)],
                        "component " + std::to_string(i) + " applied before its predecessor " + std::to_string(p));
            }
            applied[i] = 1;
            break;
        }
        case StepKind::Trace: {
            const auto q = static_cast<std::size_t>(st.index);
            require(absorbed[q] && !traced[q], "qubit " + std::to_string(q) + " traced while inactive");
            for (std::size_t i = 0; i < circuit.size(); ++i) {
                const auto &qs = circuit[i].qubits;
                if (std::find(qs.begin(), qs.end(), st.index) != qs.end()) {
                    require(applied[i], "qubit " + std::to_string(q) + " traced before component " +
                                            std::to_string(i) + " was applied");
                }
            }
            traced[q] = 1;
            --active;
            break;
        }
        }
    }
    for (std::size_t i = 0; i < circuit.size(); ++i) {
        require(applied[i], "component " + std::to_string(i) + " never applied");
    }
    for (int q = 0; q < n; ++q) {
        require(traced[static_cast<std::size_t>(q)], "qubit " + std::to_string(q) + " never traced");
    }
}

/// Operator on an ordered (ascending) set of active qubits.
struct ResidualOperator {
    std::vector<int> active;
    Matrix matrix = Matrix::Ones(1, 1);

    int size() const { return static_cast<int>(active.size()); }

    int position(int q) const {
        auto it = std::lower_bound(active.begin(), active.end(), q);
        require(it != active.end() && *it == q, "qubit " + std::to_string(q) + " is not active");
        return static_cast<int>(it - active.begin());
    }

    void absorb(int q, const Matrix2 &factor) {
        auto it = std::lower_bound(active.begin(), active.end(), q);
        const int pos = static_cast<int>(it - active.begin());
        matrix = kernels::insert_factor(matrix, size(), pos, factor);
        active.insert(it, q);
    }

    void trace(int q, const Matrix2 &factor) {
        const int pos = position(q);
        matrix = kernels::trace_with_factor(matrix, size(), pos, factor);
        active.erase(active.begin() + pos);
    }

    void apply(const Component &c, const Matrix &superop) {
        std::vector<int> pos;
        pos.reserve(c.qubits.size());
        for (int q : c.qubits) {
            pos.push_back(position(q));
        }
        matrix = kernels::apply_superop_at(matrix, size(), superop, pos);
    }
};

/// Circuit plus its schedule and per-component dual maps, reusable across many
/// (outcome, Pauli string) evaluations. Immutable; evaluate calls are reentrant.
class ConeEvaluator {
  public:
    explicit ConeEvaluator(MapCircuit circuit, int max_active = 0)
        : ConeEvaluator(circuit, schedule(circuit, max_active)) {}

    ConeEvaluator(MapCircuit circuit, EvaluationSchedule sched)
        : circuit_(std::move(circuit)), schedule_(std::move(sched)) {
        validate_schedule(circuit_, schedule_);
        for (const auto &c : circuit_.components()) {
            duals_.push_back(dual_map(c.map).superop());
        }
    }

    const MapCircuit &circuit() const { return circuit_; }
    const EvaluationSchedule &plan() const { return schedule_; }

    /// Tr[L(⊗ inputs) (⊗ multipliers)].
    cplx evaluate(const std::vector<Matrix2> &inputs, const std::vector<Matrix2> &multipliers) const {
        check_factors(inputs, multipliers);
        ResidualOperator r;
        run_forward(r, inputs, multipliers, 0, schedule_.steps.size());
        return r.matrix(0, 0);
    }

    cplx evaluate(const std::vector<Matrix2> &duals, const PauliString &pauli) const {
        return evaluate(duals, pauli_factors(pauli));
    }

    /// Forward residual just before Apply(component) and the adjoint residual
    /// of everything after it, on the same active qubits: the full value is
    /// Tr[(L_c ⊗ id)(forward) backward].
    std::pair<ResidualOperator, ResidualOperator> split(int component, const std::vector<Matrix2> &inputs,
                                                        const std::vector<Matrix2> &multipliers) const {
        check_factors(inputs, multipliers);
        const std::size_t at = schedule_.apply_position(component);
        ResidualOperator fwd;
        run_forward(fwd, inputs, multipliers, 0, at);
        ResidualOperator bwd;
        for (std::size_t t = schedule_.steps.size(); t-- > at + 1;) {
            const Step &st = schedule_.steps[t];
            switch (st.kind) {
            case StepKind::Trace:
                bwd.absorb(st.index, multipliers[static_cast<std::size_t>(st.index)]);
                break;
            case StepKind::Absorb:
                bwd.trace(st.index, inputs[static_cast<std::size_t>(st.index)]);
                break;
            case StepKind::Apply:
                bwd.apply(circuit_[static_cast<std::size_t>(st.index)], duals_[static_cast<std::size_t>(st.index)]);
                break;
            }
        }
        return {std::move(fwd), std::move(bwd)};
    }

    /// Pairs (R_a, Rbar_a) on the component's qubits (map order) with
    /// sum_a Tr[L_c(R_a) Rbar_a] equal to the full trace for any L_c.
    std::vector<std::pair<Matrix, Matrix>> split_pairs(int component, const std::vector<Matrix2> &inputs,
                                                       const std::vector<Matrix2> &multipliers) const {
        auto [fwd, bwd] = split(component, inputs, multipliers);
        const auto &comp = circuit_[static_cast<std::size_t>(component)];
        std::vector<int> kept;
        for (int q : comp.qubits) {
            kept.push_back(fwd.position(q));
        }
        auto rs = kernels::pauli_split(fwd.matrix, fwd.size(), kept);
        auto rbars = kernels::pauli_split(bwd.matrix, bwd.size(), kept);
        std::vector<std::pair<Matrix, Matrix>> out;
        out.reserve(rs.size());
        for (std::size_t a = 0; a < rs.size(); ++a) {
            out.emplace_back(std::move(rs[a]), std::move(rbars[a]));
        }
        return out;
    }

    static std::vector<Matrix2> pauli_factors(const PauliString &p) {
        std::vector<Matrix2> out;
        out.reserve(static_cast<std::size_t>(p.num_qubits()));
        for (int q = 0; q < p.num_qubits(); ++q) {
            out.push_back(p.factor(q));
        }
        return out;
    }

  private:
    void check_factors(const std::vector<Matrix2> &inputs, const std::vector<Matrix2> &multipliers) const {
        require(static_cast<int>(inputs.size()) == circuit_.num_qubits() &&
                    static_cast<int>(multipliers.size()) == circuit_.num_qubits(),
                "factor count does not match circuit width");
    }

    void run_forward(ResidualOperator &r, const std::vector<Matrix2> &inputs, const std::vector<Matrix2> &multipliers,
                     std::size_t begin, std::size_t end) const {
        for (std::size_t t = begin; t < end; ++t) {
            const Step &st = schedule_.steps[t];
            switch (st.kind) {
            case StepKind::Absorb:
                r.absorb(st.index, inputs[static_cast<std::size_t>(st.index)]);
                if (r.size() > schedule_.max_active) {
                    throw NumericalError("residual exceeded max_active");
                }
                break;
            case StepKind::Apply:
                r.apply(circuit_[static_cast<std::size_t>(st.index)],
                        circuit_[static_cast<std::size_t>(st.index)].map.superop());
                break;
            case StepKind::Trace:
                r.trace(st.index, multipliers[static_cast<std::size_t>(st.index)]);
                break;
            }
        }
    }

    MapCircuit circuit_;
    EvaluationSchedule schedule_;
    std::vector<Matrix> duals_;
};

/// Tr[L(⊗ D_i) P] by forward causal-cone evaluation.
inline cplx evaluate_trace(const MapCircuit &circuit, const std::vector<Matrix2> &duals, const PauliString &pauli,
                           int max_active = 0) {
    return ConeEvaluator(circuit, max_active).evaluate(duals, pauli);
}

/// Same trace computed as Tr[L^dagger(P) D] on the mirrored circuit of dual maps.
inline cplx evaluate_trace_backward(const MapCircuit &circuit, const std::vector<Matrix2> &duals,
                                    const PauliString &pauli, int max_active = 0) {
    MapCircuit m = mirror(circuit);
    if (max_active <= 0) {
        max_active = default_max_active(circuit);
    }
    return ConeEvaluator(m, max_active).evaluate(ConeEvaluator::pauli_factors(pauli), duals);
}

inline std::vector<std::pair<Matrix, Matrix>> split_evaluate(const MapCircuit &circuit, int singled,
                                                            const std::vector<Matrix2> &duals,
                                                            const PauliString &pauli, int max_active = 0) {
    return ConeEvaluator(circuit, max_active).split_pairs(singled, duals, ConeEvaluator::pauli_factors(pauli));
}

}  // namespace vilma

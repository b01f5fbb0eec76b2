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

// Command-line front end: sample, estimate, optimize, ansatz, oracle-check.

#include "vilma/vilma.hpp"

#include "CLI11.hpp"

#include <filesystem>
#include <iostream>
#include <sstream>

namespace {

using namespace vilma;

constexpr int kExitValidation = 2;
constexpr int kExitNumerical = 3;

struct Globals {
    std::uint64_t seed = 0;
    int threads = 1;
    std::string out = "-";
};

void emit(const std::string &path, const std::string &text) {
    if (path == "-") {
        std::cout << text;
    } else {
        write_text_file(path, text);
    }
}

std::string stem(const std::string &spec) {
    if (spec == "identity") {
        return spec;
    }
    return std::filesystem::path(spec).stem().string();
}

Observable load_observable(const std::string &spec, int n) {
    if (spec == "identity") {
        return Observable::identity(n);
    }
    Observable obs = parse_observable(read_text_file(spec));
    require(obs.num_qubits() == n, spec + ": observable acts on " + std::to_string(obs.num_qubits()) +
                                       " qubits, data has " + std::to_string(n));
    return obs;
}

MapCircuit load_circuit(const std::string &spec, int n) {
    if (spec == "identity") {
        return brickwork(n, 1);
    }
    MapCircuit c = parse_circuit(read_text_file(spec));
    require(c.num_qubits() == n, spec + ": circuit acts on " + std::to_string(c.num_qubits()) + " qubits, data has " +
                                     std::to_string(n));
    return c;
}

std::vector<SingleQubitPOVM> load_povms(const std::string &path, int n) {
    SingleQubitPOVM povm = path.empty() ? make_sic_povm() : povm_from_json(parse_json(read_text_file(path), path));
    return std::vector<SingleQubitPOVM>(static_cast<std::size_t>(n), povm);
}

std::vector<DualFrame> duals_of(const std::vector<SingleQubitPOVM> &povms) {
    std::vector<DualFrame> out;
    for (const auto &p : povms) {
        out.push_back(compute_duals(p));
    }
    return out;
}

std::string fmt(double x) {
    std::ostringstream os;
    os.precision(17);
    os << x;
    return os.str();
}

// ---------------------------------------------------------------------------
// Optimizer settings shared by optimize and ansatz
// ---------------------------------------------------------------------------

struct OptimizerFlags {
    std::string config;
    std::optional<int> rounds;
    std::string order;
    std::optional<int> sdp_max_iters;
    std::optional<double> sdp_step0;
    std::optional<double> sdp_tol;
    std::optional<double> accept_tol;
    std::optional<std::string> init;
    std::optional<std::uint64_t> init_seed;
    std::optional<std::string> holdout;
    int max_active = 0;
    bool strict = false;

    void attach(CLI::App *cmd) {
        cmd->add_option("--config", config, "optimizer config JSON");
        cmd->add_option("--rounds", rounds, "sweep rounds");
        cmd->add_option("--order", order, "comma-separated component order");
        cmd->add_option("--sdp-max-iters", sdp_max_iters);
        cmd->add_option("--sdp-step0", sdp_step0);
        cmd->add_option("--sdp-tol", sdp_tol);
        cmd->add_option("--accept-tol", accept_tol);
        cmd->add_option("--init", init, "identity | random_unitary");
        cmd->add_option("--init-seed", init_seed, "seed for random_unitary init (default: --seed)");
        cmd->add_option("--holdout", holdout, "held-out batch CSV");
        cmd->add_option("--max-active", max_active, "cap on active qubits (0: default)");
        cmd->add_flag("--strict", strict, "exit with status 3 if any SDP solve hits its iteration cap");
    }
};

// Config file values first, then explicit flags on top.
struct OptimizerConfig {
    SweepOptions sweep;
    std::string init = "keep";
    std::optional<std::uint64_t> seed;
    std::optional<std::string> holdout;
};

std::vector<int> parse_order(const std::string &text) {
    std::vector<int> out;
    std::stringstream ss(text);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        try {
            out.push_back(std::stoi(tok));
        } catch (const std::exception &) {
            throw ValidationError("bad component index '" + tok + "' in --order");
        }
    }
    return out;
}

OptimizerConfig resolve(const OptimizerFlags &f, const Globals &g) {
    OptimizerConfig c;
    c.sweep.threads = g.threads;
    c.sweep.max_active = f.max_active;
    if (!f.config.empty()) {
        json doc = parse_json(read_text_file(f.config), f.config);
        require(doc.is_object(), f.config + ": optimizer config must be an object");
        auto get = [&](const std::string &dotted) -> const json * {
            if (doc.contains(dotted)) {
                return &doc[dotted];
            }
            auto dot = dotted.find('.');
            if (dot != std::string::npos) {
                auto head = dotted.substr(0, dot), tail = dotted.substr(dot + 1);
                if (doc.contains(head) && doc[head].is_object() && doc[head].contains(tail)) {
                    return &doc[head][tail];
                }
            }
            return nullptr;
        };
        try {
            if (auto *v = get("rounds")) c.sweep.rounds = v->get<int>();
            if (auto *v = get("order")) c.sweep.order = v->get<std::vector<int>>();
            if (auto *v = get("sdp.max_iters")) c.sweep.sdp.max_iters = v->get<int>();
            if (auto *v = get("sdp.step0")) c.sweep.sdp.step0 = v->get<double>();
            if (auto *v = get("sdp.tol")) c.sweep.sdp.tol = v->get<double>();
            if (auto *v = get("accept_tol")) c.sweep.accept_tol = v->get<double>();
            if (auto *v = get("init")) c.init = v->get<std::string>();
            if (auto *v = get("seed")) c.seed = v->get<std::uint64_t>();
            if (auto *v = get("holdout_batch")) c.holdout = v->get<std::string>();
        } catch (const json::exception &e) {
            throw ValidationError(f.config + ": " + e.what());
        }
    }
    if (f.rounds) c.sweep.rounds = *f.rounds;
    if (!f.order.empty()) c.sweep.order = parse_order(f.order);
    if (f.sdp_max_iters) c.sweep.sdp.max_iters = *f.sdp_max_iters;
    if (f.sdp_step0) c.sweep.sdp.step0 = *f.sdp_step0;
    if (f.sdp_tol) c.sweep.sdp.tol = *f.sdp_tol;
    if (f.accept_tol) c.sweep.accept_tol = *f.accept_tol;
    if (f.init) c.init = *f.init;
    if (f.init_seed) c.seed = *f.init_seed;
    if (f.holdout) c.holdout = *f.holdout;
    if (!c.seed) c.seed = g.seed;
    require(c.sweep.rounds >= 1, "rounds must be >= 1");
    require(c.sweep.sdp.max_iters >= 1 && c.sweep.sdp.step0 > 0 && c.sweep.sdp.tol > 0, "SDP options must be positive");
    require(c.sweep.accept_tol >= 0, "accept_tol must be non-negative");
    return c;
}

json sweep_summary(const SweepResult &r) {
    int installed = 0;
    for (const auto &it : r.report.iterations) {
        installed += it.installed;
    }
    json j{{"initial_energy", r.report.initial_energy()},
           {"final_energy", r.report.final_energy()},
           {"iterations", r.report.iterations.size()},
           {"installed", installed},
           {"unconverged_solves", r.report.unconverged_solves},
           {"max_energy_increase", r.report.max_increase()}};
    if (r.report.ground_energy) {
        j["ground_energy"] = *r.report.ground_energy;
        j["final_relative_error"] = *r.report.relative_error(r.report.final_energy());
    }
    return j;
}

void add_holdout(json &summary, const std::optional<std::string> &holdout, const MapCircuit &circuit,
                 const Observable &obs, int threads) {
    if (!holdout) {
        return;
    }
    OutcomeBatch b = parse_batch_csv(read_text_file(*holdout));
    auto duals = duals_of(load_povms("", b.num_qubits));
    EstimateOptions eo;
    eo.keep_per_shot = false;
    eo.threads = threads;
    Estimate e = estimate(b, duals, circuit, obs, eo);
    summary["holdout"] = {{"batch", *holdout}, {"value", e.value}, {"sigma", e.sigma}, {"S", e.shots}};
}

int finish(const SweepResult &r, bool strict) {
    if (strict && r.report.unconverged_solves > 0) {
        std::cerr << "numerical failure: " << r.report.unconverged_solves << " SDP solve(s) did not converge\n";
        return kExitNumerical;
    }
    return 0;
}

void emit_summary(const std::string &path, const json &summary) {
    if (path.empty()) {
        std::cerr << summary.dump(2) << "\n";
    } else {
        emit(path, summary.dump(2) + "\n");
    }
}

// ---------------------------------------------------------------------------
// Commands
// ---------------------------------------------------------------------------

struct SampleArgs {
    std::string state;
    bool mixed = false;
    int n = 0;
    std::size_t shots = 0;
    std::optional<double> perturb;
    std::optional<std::uint64_t> perturb_seed;
    std::string povm;
};

int cmd_sample(const SampleArgs &a, const Globals &g) {
    require(a.state.empty() != !a.mixed, "sample: give exactly one of --state or --mixed");
    require(a.shots >= 1, "sample: --S must be positive");
    Matrix rho;
    if (a.mixed) {
        require(a.n >= 1 && a.n <= 12, "sample: --mixed needs --N in 1..12");
        rho = maximally_mixed(a.n);
    } else {
        rho = prepare_state(read_text_file(a.state), a.n);
    }
    const int n = qubits_of_dim(rho.rows());
    if (a.perturb) {
        rho = build_perturbed_state(rho, *a.perturb, a.perturb_seed.value_or(g.seed)).rho;
    }
    OutcomeBatch b = sample_outcomes(rho, load_povms(a.povm, n), a.shots, g.seed);
    emit(g.out, write_batch_csv(b));
    return 0;
}

struct EstimateArgs {
    std::string batch;
    std::string exact_state;
    std::string reference;
    std::vector<std::string> circuits;
    std::vector<std::string> observables;
    std::string povm;
    std::string format = "csv";
    int max_active = 0;
};

int cmd_estimate(const EstimateArgs &a, const Globals &g) {
    require(a.batch.empty() != a.exact_state.empty(), "estimate: give exactly one of --batch or --exact-state");
    require(a.format == "csv" || a.format == "json", "estimate: --format must be csv or json");
    std::optional<OutcomeBatch> batch;
    std::optional<Matrix> exact_rho, reference;
    int n = 0;
    if (!a.batch.empty()) {
        batch = parse_batch_csv(read_text_file(a.batch));
        n = batch->num_qubits;
    } else {
        exact_rho = prepare_state(read_text_file(a.exact_state));
        n = qubits_of_dim(exact_rho->rows());
    }
    if (!a.reference.empty()) {
        reference = prepare_state(read_text_file(a.reference), n);
        require(qubits_of_dim(reference->rows()) == n, "estimate: reference state width mismatch");
    }
    const auto povms = load_povms(a.povm, n);
    const auto duals = duals_of(povms);
    std::ostringstream csv;
    csv << "observable,map,value,sigma,exact\n";
    json reports = json::array();
    for (const auto &cspec : a.circuits) {
        const ConeEvaluator ev(load_circuit(cspec, n), a.max_active);
        for (const auto &ospec : a.observables) {
            const Observable obs = load_observable(ospec, n);
            Estimate e;
            std::optional<double> exact;
            if (batch) {
                EstimateOptions eo;
                eo.keep_per_shot = false;
                eo.threads = g.threads;
                e = estimate(*batch, duals, ev, obs, eo);
            } else {
                e.value = weighted_value(ev, data_from_state(*exact_rho, povms, duals), obs, g.threads);
                e.batch_id = "exact-state";
                exact = e.value;
            }
            if (reference) {
                exact = weighted_value(ev, data_from_state(*reference, povms, duals), obs, g.threads);
            }
            e.observable_id = stem(ospec);
            e.circuit_id = stem(cspec);
            json r = estimate_to_json(e);
            if (exact) {
                r["exact"] = *exact;
            }
            reports.push_back(r);
            csv << e.observable_id << "," << e.circuit_id << "," << fmt(e.value) << "," << fmt(e.sigma) << ","
                << (exact ? fmt(*exact) : std::string()) << "\n";
        }
    }
    emit(g.out, a.format == "csv" ? csv.str() : reports.dump(2) + "\n");
    return 0;
}

struct OptimizeArgs {
    std::string circuit;
    std::string observable;
    std::string batch;
    std::string exact_state;
    std::string out_circuit;
    std::string summary;
    std::optional<double> ground_energy;
    bool exact_ground = false;
    OptimizerFlags opt;
};

int cmd_optimize(const OptimizeArgs &a, const Globals &g) {
    require(a.batch.empty() != a.exact_state.empty(), "optimize: give exactly one of --batch or --exact-state");
    OptimizerConfig cfg = resolve(a.opt, g);
    InputData data;
    if (!a.batch.empty()) {
        OutcomeBatch b = parse_batch_csv(read_text_file(a.batch));
        data = data_from_batch(b, duals_of(load_povms("", b.num_qubits)));
    } else {
        Matrix rho = prepare_state(read_text_file(a.exact_state));
        const int n = qubits_of_dim(rho.rows());
        const auto povms = load_povms("", n);
        data = data_from_state(rho, povms, duals_of(povms));
    }
    MapCircuit circuit = load_circuit(a.circuit, data.num_qubits);
    if (cfg.init == "identity") {
        for (std::size_t i = 0; i < circuit.size(); ++i) {
            circuit.replace_map(i, LocalMap::identity(circuit[i].map.arity()));
        }
    } else if (cfg.init == "random_unitary") {
        std::mt19937_64 rng(*cfg.seed);
        for (std::size_t i = 0; i < circuit.size(); ++i) {
            circuit.replace_map(i, random_unitary_map(circuit[i].map.arity(), rng));
        }
    } else {
        require(cfg.init == "keep", "optimize: init must be keep, identity or random_unitary");
    }
    const Observable obs = load_observable(a.observable, data.num_qubits);
    if (a.ground_energy) {
        cfg.sweep.ground_energy = a.ground_energy;
    } else if (a.exact_ground) {
        cfg.sweep.ground_energy = exact_ground_energy(obs).energy;
    }
    SweepResult r = sweep(circuit, data, obs, cfg.sweep);
    emit(g.out, sweep_report_csv(r.report));
    if (!a.out_circuit.empty()) {
        write_text_file(a.out_circuit, circuit_to_json(r.circuit).dump(1) + "\n");
    }
    json summary = sweep_summary(r);
    add_holdout(summary, cfg.holdout, r.circuit, obs, g.threads);
    emit_summary(a.summary, summary);
    return finish(r, a.opt.strict);
}

struct AnsatzArgs {
    int n = 0;
    std::string observable;
    bool xx = false;
    double j = 1.0;
    double b = 0.0;
    bool open = false;
    int layers = 1;
    std::string out_circuit;
    std::string summary;
    OptimizerFlags opt;
};

int cmd_ansatz(const AnsatzArgs &a, const Globals &g) {
    require(a.n >= 2 && a.n <= 12, "ansatz: --N must lie in 2..12");
    require(a.observable.empty() != !a.xx, "ansatz: give exactly one of --observable or --xx");
    require(a.layers >= 1, "ansatz: --layers must be >= 1");
    OptimizerConfig cfg = resolve(a.opt, g);
    const Observable obs = a.xx ? xx_hamiltonian(a.n, a.j, a.b, !a.open) : load_observable(a.observable, a.n);
    AnsatzOptions ao;
    ao.layers = a.layers;
    ao.init = cfg.init == "keep" ? "identity" : cfg.init;
    ao.seed = *cfg.seed;
    ao.sweep = cfg.sweep;
    ao.sweep.ground_energy = exact_ground_energy(obs).energy;
    SweepResult r = classical_ansatz(a.n, obs, ao);
    emit(g.out, sweep_report_csv(r.report));
    if (!a.out_circuit.empty()) {
        write_text_file(a.out_circuit, circuit_to_json(r.circuit).dump(1) + "\n");
    }
    json summary = sweep_summary(r);
    add_holdout(summary, cfg.holdout, r.circuit, obs, g.threads);
    emit_summary(a.summary, summary);
    return finish(r, a.opt.strict);
}

struct OracleArgs {
    int n = 4;
    int instances = 20;
    int layers = 2;
    std::string circuit;
    double tol = 1e-10;
};

int cmd_oracle_check(const OracleArgs &a, const Globals &g) {
    std::optional<MapCircuit> fixed;
    int n = a.n;
    if (!a.circuit.empty()) {
        fixed = parse_circuit(read_text_file(a.circuit));
        n = fixed->num_qubits();
    }
    require(n <= 6, "oracle limited to N ≤ 6");
    require(n >= 2 && a.instances >= 1 && a.layers >= 1, "oracle-check: needs N >= 2, instances >= 1, layers >= 1");
    std::mt19937_64 rng(g.seed);
    std::uniform_int_distribution<int> outcome(0, 3), letter(0, 3);
    std::bernoulli_distribution coin(0.5);
    const DualFrame frame = compute_duals(make_sic_povm());
    double worst_dense = 0.0, worst_backward = 0.0, worst_split = 0.0;
    for (int i = 0; i < a.instances; ++i) {
        MapCircuit c = fixed ? *fixed : brickwork(n, a.layers);
        if (!fixed) {
            for (std::size_t k = 0; k < c.size(); ++k) {
                c.replace_map(k, coin(rng) ? random_cptp(2, rng) : random_tp_hermitian_map(2, rng));
            }
        }
        std::vector<Matrix2> d;
        PauliString p(n);
        for (int q = 0; q < n; ++q) {
            d.push_back(frame.duals[outcome(rng)]);
            p.set_letter(q, letter(rng));
        }
        const cplx dense = (dense_map_circuit_oracle(c, product_operator(d)) * p.dense()).trace();
        const cplx fwd = evaluate_trace(c, d, p);
        const cplx bwd = evaluate_trace_backward(c, d, p);
        const int s = static_cast<int>(i % static_cast<int>(c.size()));
        cplx split = 0.0;
        for (const auto &[r, rbar] : split_evaluate(c, s, d, p)) {
            split += (c[static_cast<std::size_t>(s)].map.apply(r) * rbar).trace();
        }
        const double scale = std::max(1.0, std::abs(dense));
        worst_dense = std::max(worst_dense, std::abs(fwd - dense) / scale);
        worst_backward = std::max(worst_backward, std::abs(bwd - fwd) / scale);
        worst_split = std::max(worst_split, std::abs(split - dense) / scale);
    }
    bool ok = true;
    auto line = [&](const std::string &name, double err) {
        const bool pass = err <= a.tol;
        ok = ok && pass;
        std::ostringstream os;
        os << (pass ? "PASS " : "FAIL ") << name << " N=" << n << " instances=" << a.instances
           << " max_rel_err=" << err << " tol=" << a.tol << "\n";
        return os.str();
    };
    std::string text = line("forward-vs-dense", worst_dense) + line("backward-vs-forward", worst_backward) +
                       line("split-vs-dense", worst_split);
    emit(g.out, text);
    return ok ? 0 : kExitNumerical;
}

}  // namespace

int main(int argc, char **argv) {
    CLI::App app{"Virtual linear map estimation and optimization from IC-POVM data"};
    app.require_subcommand(1);
    Globals g;
    auto add_globals = [&](CLI::App *cmd) {
        cmd->add_option("--seed", g.seed, "random seed");
        cmd->add_option("--threads", g.threads, "worker threads")->check(CLI::PositiveNumber);
        cmd->add_option("--out", g.out, "output path ('-' for stdout)");
    };
    add_globals(&app);

    SampleArgs sa;
    auto *sample = app.add_subcommand("sample", "draw IC-POVM outcomes from a prepared state");
    add_globals(sample);
    sample->add_option("--state", sa.state, "state-prep JSON");
    sample->add_flag("--mixed", sa.mixed, "maximally mixed state on --N qubits");
    sample->add_option("--N", sa.n, "qubit count");
    sample->add_option("--S", sa.shots, "shot count")->required();
    sample->add_option("--perturb", sa.perturb, "apply the random-channel perturbation layer with weight p");
    sample->add_option("--perturb-seed", sa.perturb_seed);
    sample->add_option("--povm", sa.povm, "POVM JSON (default: tetrahedral SIC)");

    EstimateArgs ea;
    auto *est = app.add_subcommand("estimate", "estimate Tr[L(rho) O] for circuit x observable pairs");
    add_globals(est);
    est->add_option("--batch", ea.batch, "outcome batch CSV");
    est->add_option("--exact-state", ea.exact_state, "state-prep JSON; use the exact outcome distribution");
    est->add_option("--reference", ea.reference, "state-prep JSON for the exact column");
    est->add_option("--circuit", ea.circuits, "circuit JSON or 'identity'")->required();
    est->add_option("--observable", ea.observables, "observable JSON or 'identity'")->required();
    est->add_option("--povm", ea.povm);
    est->add_option("--format", ea.format, "csv | json");
    est->add_option("--max-active", ea.max_active);

    OptimizeArgs oa;
    auto *opt = app.add_subcommand("optimize", "coordinate-descent sweeps of a circuit against data");
    add_globals(opt);
    opt->add_option("--circuit", oa.circuit, "initial circuit JSON")->required();
    opt->add_option("--observable", oa.observable, "observable JSON")->required();
    opt->add_option("--batch", oa.batch);
    opt->add_option("--exact-state", oa.exact_state);
    opt->add_option("--out-circuit", oa.out_circuit);
    opt->add_option("--summary", oa.summary, "summary JSON path (default: stderr)");
    opt->add_option("--ground-energy", oa.ground_energy);
    opt->add_flag("--exact-ground", oa.exact_ground, "compute the ground energy by diagonalization");
    oa.opt.attach(opt);

    AnsatzArgs aa;
    auto *ans = app.add_subcommand("ansatz", "optimize a staircase circuit on the |0...0> input");
    add_globals(ans);
    ans->add_option("--N", aa.n)->required();
    ans->add_option("--observable", aa.observable);
    ans->add_flag("--xx", aa.xx, "use the XX chain Hamiltonian");
    ans->add_option("--J", aa.j);
    ans->add_option("--B", aa.b);
    ans->add_flag("--open", aa.open, "open boundary (default periodic)");
    ans->add_option("--layers", aa.layers);
    ans->add_option("--out-circuit", aa.out_circuit);
    ans->add_option("--summary", aa.summary);
    aa.opt.attach(ans);

    OracleArgs ora;
    auto *orc = app.add_subcommand("oracle-check", "cone engine versus dense simulation");
    add_globals(orc);
    orc->add_option("--N", ora.n);
    orc->add_option("--instances", ora.instances);
    orc->add_option("--layers", ora.layers);
    orc->add_option("--circuit", ora.circuit);
    orc->add_option("--tol", ora.tol);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitValidation;
    }
    try {
        if (*sample) return cmd_sample(sa, g);
        if (*est) return cmd_estimate(ea, g);
        if (*opt) return cmd_optimize(oa, g);
        if (*ans) return cmd_ansatz(aa, g);
        if (*orc) return cmd_oracle_check(ora, g);
    } catch (const ValidationError &e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const NumericalError &e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return kExitNumerical;
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidation;
    }
    return 0;
}

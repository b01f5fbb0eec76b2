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

#include "vilma/json_io.hpp"
#include "vilma/maps.hpp"

#include <algorithm>
#include <random>
#include <regex>
#include <set>
#include <string>
#include <vector>

namespace vilma {

struct Component {
    int layer = 1;
    std::vector<int> qubits;  // map qubit t acts on register qubit qubits[t]
    LocalMap map;
};

/// Ordered composition of local maps: later components are applied later.
///
/// Topologies:
///   brickwork  alternating layers of disjoint nearest-neighbour pairs,
///              (0,1),(2,3),... then (1,2),(3,4),...
///   staircase  each layer is a sequential chain (0,1),(1,2),...,(N-2,N-1)
///   general    anything else
class MapCircuit {
  public:
    MapCircuit() = default;
    MapCircuit(int num_qubits, std::string topology) : num_qubits_(num_qubits), topology_(std::move(topology)) {
        require(num_qubits > 0, "circuit needs at least one qubit");
        require(topology_ == "brickwork" || topology_ == "staircase" || topology_ == "general",
                "unknown topology '" + topology_ + "'");
    }

    int num_qubits() const { return num_qubits_; }
    const std::string &topology() const { return topology_; }
    const std::vector<Component> &components() const { return components_; }
    std::size_t size() const { return components_.size(); }
    const Component &operator[](std::size_t i) const { return components_[i]; }

    void add(int layer, std::vector<int> qubits, LocalMap map) {
        require(static_cast<int>(qubits.size()) == map.arity(),
                "component arity " + std::to_string(map.arity()) + " does not match " +
                    std::to_string(qubits.size()) + " qubits");
        std::set<int> seen;
        for (int q : qubits) {
            require(q >= 0 && q < num_qubits_, "component qubit " + std::to_string(q) + " out of range");
            require(seen.insert(q).second, "component acts twice on qubit " + std::to_string(q));
        }
        if (topology_ == "brickwork") {
            for (const auto &c : components_) {
                if (c.layer != layer) {
                    continue;
                }
                for (int q : qubits) {
                    require(std::find(c.qubits.begin(), c.qubits.end(), q) == c.qubits.end(),
                            "brickwork layer " + std::to_string(layer) + " has overlapping supports on qubit " +
                                std::to_string(q));
                }
            }
        }
        components_.push_back({layer, std::move(qubits), std::move(map)});
    }

    void replace_map(std::size_t index, LocalMap map) {
        require(index < components_.size(), "component index out of range");
        require(map.arity() == components_[index].map.arity(), "replacement map arity mismatch");
        components_[index].map = std::move(map);
    }

    int num_layers() const {
        int l = 0;
        for (const auto &c : components_) {
            l = std::max(l, c.layer);
        }
        return l;
    }

  private:
    int num_qubits_ = 0;
    std::string topology_ = "general";
    std::vector<Component> components_;
};

/// Brickwork pairs of a given layer (1-based): odd layers start at qubit 0, even layers at 1.
inline std::vector<std::pair<int, int>> brickwork_pairs(int n, int layer) {
    std::vector<std::pair<int, int>> out;
    for (int i = (layer % 2 == 1) ? 0 : 1; i + 1 < n; i += 2) {
        out.emplace_back(i, i + 1);
    }
    return out;
}

inline MapCircuit brickwork(int n, int layers, const LocalMap &default_map = LocalMap::identity(2)) {
    require(n >= 2 && layers >= 1, "brickwork needs N >= 2 and layers >= 1");
    require(default_map.arity() == 2, "brickwork maps must be two-qubit");
    MapCircuit c(n, "brickwork");
    for (int l = 1; l <= layers; ++l) {
        for (auto [i, j] : brickwork_pairs(n, l)) {
            c.add(l, {i, j}, default_map);
        }
    }
    return c;
}

/// Map list consumed in component order.
inline MapCircuit brickwork(int n, int layers, const std::vector<LocalMap> &maps) {
    MapCircuit c = brickwork(n, layers);
    require(maps.size() == c.size(), "brickwork: expected " + std::to_string(c.size()) + " maps");
    for (std::size_t i = 0; i < maps.size(); ++i) {
        c.replace_map(i, maps[i]);
    }
    return c;
}

inline MapCircuit staircase(int n, int layers, const LocalMap &default_map = LocalMap::identity(2)) {
    require(n >= 2 && layers >= 1, "staircase needs N >= 2 and layers >= 1");
    require(default_map.arity() == 2, "staircase maps must be two-qubit");
    MapCircuit c(n, "staircase");
    for (int l = 1; l <= layers; ++l) {
        for (int i = 0; i + 1 < n; ++i) {
            c.add(l, {i, i + 1}, default_map);
        }
    }
    return c;
}

/// Reversed circuit of dual maps: Tr[L(A) B] = Tr[A L_mirror(B)].
inline MapCircuit mirror(const MapCircuit &c) {
    MapCircuit out(c.num_qubits(), "general");
    const int top = c.num_layers();
    for (auto it = c.components().rbegin(); it != c.components().rend(); ++it) {
        out.add(top + 1 - it->layer, it->qubits, dual_map(it->map));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Map payloads and circuit files
// ---------------------------------------------------------------------------

/// Presets: identity, cnot, zreset, noisy_cnot(theta,p), depolarizing(p),
/// random_unitary(seed), random_cptp(seed).
inline LocalMap map_from_preset(const std::string &spec, int arity) {
    static const std::regex call(R"(^\s*([a-z_]+)\s*(?:\(([^)]*)\))?\s*$)");
    std::smatch m;
    require(std::regex_match(spec, m, call), "malformed map preset '" + spec + "'");
    const std::string name = m[1];
    std::vector<double> args;
    if (m[2].matched) {
        std::string body = m[2];
        std::size_t start = 0;
        while (start <= body.size()) {
            std::size_t comma = body.find(',', start);
            std::string tok = body.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
            try {
                std::size_t used = 0;
                args.push_back(std::stod(tok, &used));
                require(tok.find_first_not_of(" \t", used) == std::string::npos, "");
            } catch (const std::exception &) {
                throw ValidationError("bad numeric argument '" + tok + "' in preset '" + spec + "'");
            }
            if (comma == std::string::npos) {
                break;
            }
            start = comma + 1;
        }
    }
    auto nargs = [&](std::size_t k) {
        require(args.size() == k, "preset '" + name + "' takes " + std::to_string(k) + " argument(s)");
    };
    if (name == "identity") {
        nargs(0);
        return LocalMap::identity(arity);
    }
    if (name == "cnot") {
        nargs(0);
        require(arity == 2, "cnot is a two-qubit map");
        return presets::cnot();
    }
    if (name == "noisy_cnot") {
        nargs(2);
        require(arity == 2, "noisy_cnot is a two-qubit map");
        return presets::noisy_cnot(args[0], args[1]);
    }
    if (name == "depolarizing") {
        nargs(1);
        return presets::depolarizing(arity, args[0]);
    }
    if (name == "zreset") {
        nargs(0);
        LocalMap z = presets::zreset();
        return arity == 1 ? z : tensor(z, z);
    }
    if (name == "random_unitary" || name == "random_cptp") {
        nargs(1);
        std::mt19937_64 rng(static_cast<std::uint64_t>(args[0]));
        return name == "random_unitary" ? random_unitary_map(arity, rng) : random_cptp(arity, rng);
    }
    throw ValidationError("unknown map preset '" + name + "'");
}

inline json map_to_json(const LocalMap &m) {
    return {{"convention", "col-vec"}, {"superop", matrix_to_json(m.superop())}};
}

inline LocalMap map_from_json(const json &j, int arity) {
    if (j.is_string()) {
        return map_from_preset(j.get<std::string>(), arity);
    }
    require(j.is_object() && j.contains("superop"), "map payload must be a preset name or {\"superop\": ...}");
    require(j.value("convention", std::string()) == "col-vec", "map payload must declare \"convention\": \"col-vec\"");
    return LocalMap(matrix_from_json(j["superop"], static_cast<Eigen::Index>(pow4(arity)), "superop"));
}

inline json circuit_to_json(const MapCircuit &c) {
    json comps = json::array();
    for (const auto &comp : c.components()) {
        comps.push_back({{"layer", comp.layer}, {"qubits", comp.qubits}, {"map", map_to_json(comp.map)}});
    }
    return {{"num_qubits", c.num_qubits()}, {"topology", c.topology()}, {"components", comps}};
}

inline MapCircuit circuit_from_json(const json &doc) {
    require(doc.is_object(), "circuit: document must be an object");
    require(doc.contains("num_qubits") && doc["num_qubits"].is_number_integer(), "circuit: missing num_qubits");
    MapCircuit c(doc["num_qubits"].get<int>(), doc.value("topology", std::string("general")));
    require(doc.contains("components") && doc["components"].is_array(), "circuit: missing components array");
    std::size_t idx = 0;
    for (const auto &comp : doc["components"]) {
        const std::string where = "circuit component " + std::to_string(idx++);
        require(comp.is_object() && comp.contains("qubits") && comp["qubits"].is_array() && comp.contains("map"),
                where + ": needs qubits and map");
        std::vector<int> qubits;
        for (const auto &q : comp["qubits"]) {
            require(q.is_number_integer(), where + ": qubit indices must be integers");
            qubits.push_back(q.get<int>());
        }
        require(!qubits.empty() && qubits.size() <= 2, where + ": components act on 1 or 2 qubits");
        try {
            c.add(comp.value("layer", 1), qubits, map_from_json(comp["map"], static_cast<int>(qubits.size())));
        } catch (const ValidationError &e) {
            throw ValidationError(where + ": " + e.what());
        }
    }
    return c;
}

inline MapCircuit parse_circuit(const std::string &text) { return circuit_from_json(parse_json(text, "circuit")); }

}  // namespace vilma

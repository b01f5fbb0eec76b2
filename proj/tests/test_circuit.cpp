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

TEST(Brickwork, PairingConvention) {
    auto c = brickwork(4, 2);
    ASSERT_EQ(c.size(), 3u);
    EXPECT_EQ(c[0].qubits, (std::vector<int>{0, 1}));
    EXPECT_EQ(c[1].qubits, (std::vector<int>{2, 3}));
    EXPECT_EQ(c[2].qubits, (std::vector<int>{1, 2}));
    EXPECT_EQ(c[2].layer, 2);
    EXPECT_EQ(brickwork(6, 1).size(), 3u);
    auto odd = brickwork(7, 1);
    EXPECT_EQ(odd.size(), 3u);
    for (const auto &comp : odd.components()) {
        EXPECT_NE(comp.qubits[1], 7);
        EXPECT_LT(comp.qubits[1], 6);
    }
}

TEST(Brickwork, RejectsOverlapWithinLayer) {
    MapCircuit c(4, "brickwork");
    c.add(1, {0, 1}, LocalMap::identity(2));
    EXPECT_THROW(c.add(1, {1, 2}, LocalMap::identity(2)), ValidationError);
    EXPECT_NO_THROW(c.add(2, {1, 2}, LocalMap::identity(2)));
    EXPECT_THROW(c.add(3, {2, 2}, LocalMap::identity(2)), ValidationError);
    EXPECT_THROW(c.add(3, {2, 4}, LocalMap::identity(2)), ValidationError);
    EXPECT_THROW(c.add(3, {2}, LocalMap::identity(2)), ValidationError);
}

TEST(Staircase, SequentialChain) {
    auto c = staircase(5, 2);
    ASSERT_EQ(c.size(), 8u);
    for (std::size_t i = 0; i < 4; ++i) {
        EXPECT_EQ(c[i].qubits, (std::vector<int>{static_cast<int>(i), static_cast<int>(i) + 1}));
        EXPECT_EQ(c[i].layer, 1);
        EXPECT_EQ(c[i + 4].layer, 2);
    }
}

TEST(CircuitJson, RoundTripWithMatrixPayloads) {
    std::mt19937_64 rng(1);
    auto c = random_brickwork(5, 2, rng);
    auto back = parse_circuit(circuit_to_json(c).dump());
    ASSERT_EQ(back.size(), c.size());
    EXPECT_EQ(back.topology(), "brickwork");
    for (std::size_t i = 0; i < c.size(); ++i) {
        EXPECT_EQ(back[i].qubits, c[i].qubits);
        EXPECT_EQ(back[i].layer, c[i].layer);
        EXPECT_EQ(back[i].map.superop(), c[i].map.superop());
    }
}

TEST(CircuitJson, Presets) {
    auto c = parse_circuit(R"json({"num_qubits": 3, "topology": "general", "components": [
        {"layer": 1, "qubits": [0, 1], "map": "cnot"},
        {"layer": 1, "qubits": [2], "map": "depolarizing(0.25)"},
        {"layer": 2, "qubits": [1, 2], "map": "noisy_cnot(0.05, 0.001)"},
        {"layer": 3, "qubits": [0, 2], "map": "random_cptp(4)"},
        {"layer": 3, "qubits": [1], "map": "zreset"},
        {"layer": 4, "qubits": [0, 1], "map": "random_unitary(7)"}]})json");
    ASSERT_EQ(c.size(), 6u);
    EXPECT_EQ(c[0].map.superop(), presets::cnot().superop());
    EXPECT_EQ(c[1].map.superop(), presets::depolarizing(1, 0.25).superop());
    EXPECT_EQ(c[1].map.arity(), 1);
    EXPECT_TRUE(c[3].map.flags().cp && c[3].map.flags().tp);
    std::mt19937_64 rng(4);
    EXPECT_EQ(c[3].map.superop(), random_cptp(2, rng).superop());
}

TEST(CircuitJson, ErrorsCarryContext) {
    auto expect_message = [](const std::string &doc, const std::string &needle) {
        try {
            parse_circuit(doc);
            ADD_FAILURE() << "expected ValidationError for " << doc;
        } catch (const ValidationError &e) {
            EXPECT_NE(std::string(e.what()).find(needle), std::string::npos) << e.what();
        }
    };
    expect_message(R"({"num_qubits": 2, "components": [{"qubits": [0, 1], "map": "swirl"}]})", "component 0");
    expect_message(R"({"num_qubits": 2, "components": [{"qubits": [0, 1], "map": "cnot"}, {"qubits": [0, 5], "map": "cnot"}]})",
                   "component 1");
    expect_message(R"({"num_qubits": 2, "components": [{"qubits": [0, 1], "map": {"superop": [[1]]}}]})",
                   "col-vec");
    expect_message("{\"num_qubits\": 2,\n\"components\": [\n{\"qubits\": [0, 1] \"map\": 1}]}", "line 3");
}

TEST(Mirror, ReversesAndDualizes) {
    std::mt19937_64 rng(2);
    auto c = random_brickwork(4, 2, rng);
    auto m = mirror(c);
    ASSERT_EQ(m.size(), c.size());
    for (std::size_t i = 0; i < c.size(); ++i) {
        const auto &orig = c[c.size() - 1 - i];
        EXPECT_EQ(m[i].qubits, orig.qubits);
        EXPECT_LT(max_abs(m[i].map.superop() - dual_map(orig.map).superop()), 1e-15);
    }
}

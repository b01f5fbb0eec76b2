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

#include "vilma/vilma.hpp"

#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

namespace {

namespace fs = std::filesystem;
using vilma::read_text_file;

const std::string kCli = VILMA_CLI_PATH;
const std::string kData = VILMA_DATA_DIR;

struct CliRun {
    int code;
    std::string out;
    std::string err;
};

class CliTest : public ::testing::Test {
  protected:
    void SetUp() override {
        const auto *info = ::testing::UnitTest::GetInstance()->current_test_info();
        dir_ = fs::temp_directory_path() / ("vilma_cli_" + std::string(info->name()) + "_" + std::to_string(::getpid()));
        fs::create_directories(dir_);
    }
    void TearDown() override { fs::remove_all(dir_); }

    std::string path(const std::string &name) const { return (dir_ / name).string(); }
    static std::string data(const std::string &name) { return kData + "/" + name; }

    CliRun run(const std::string &args) const {
        const std::string out = path("stdout.txt"), err = path("stderr.txt");
        const int status = std::system((kCli + " " + args + " >" + out + " 2>" + err).c_str());
        CliRun r;
        r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
        r.out = read_text_file(out);
        r.err = read_text_file(err);
        return r;
    }

    std::string write(const std::string &name, const std::string &text) const {
        std::ofstream(path(name)) << text;
        return path(name);
    }

    fs::path dir_;
};

std::vector<std::vector<std::string>> csv_rows(const std::string &text) {
    std::vector<std::vector<std::string>> rows;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        std::vector<std::string> cells;
        std::string cell;
        std::istringstream ls(line);
        while (std::getline(ls, cell, ',')) {
            cells.push_back(cell);
        }
        if (!line.empty() && line.back() == ',') {
            cells.emplace_back();
        }
        rows.push_back(cells);
    }
    return rows;
}

TEST_F(CliTest, SampleIsByteIdenticalOnRerun) {
    const std::string args = "sample --state " + data("prep_w4.json") + " --S 500 --seed 9 --perturb 0.05 --out ";
    ASSERT_EQ(run(args + path("a.csv")).code, 0);
    ASSERT_EQ(run(args + path("b.csv")).code, 0);
    EXPECT_EQ(read_text_file(path("a.csv")), read_text_file(path("b.csv")));
    const auto batch = vilma::parse_batch_csv(read_text_file(path("a.csv")));
    EXPECT_EQ(batch.shots(), 500u);
    EXPECT_EQ(batch.num_qubits, 4);
    EXPECT_EQ(batch.seed, 9u);
}

TEST_F(CliTest, DifferentSeedsGiveDifferentBatches) {
    ASSERT_EQ(run("sample --mixed --N 3 --S 200 --seed 1 --out " + path("a.csv")).code, 0);
    ASSERT_EQ(run("sample --mixed --N 3 --S 200 --seed 2 --out " + path("b.csv")).code, 0);
    EXPECT_NE(read_text_file(path("a.csv")), read_text_file(path("b.csv")));
}

TEST_F(CliTest, EstimateGridHasOneRowPerPair) {
    ASSERT_EQ(run("sample --state " + data("prep_w4.json") + " --S 1000 --seed 3 --out " + path("b.csv")).code, 0);
    const CliRun r = run("estimate --batch " + path("b.csv") + " --reference " + data("prep_w4.json") +
                      " --circuit identity --circuit " + data("circuit_depol4.json") + " --circuit " +
                      data("circuit_rand4.json") + " --observable identity --observable " + data("obs_zz4.json") +
                      " --observable " + data("obs_x0.json"));
    ASSERT_EQ(r.code, 0) << r.err;
    const auto rows = csv_rows(r.out);
    ASSERT_EQ(rows.size(), 10u);
    EXPECT_EQ(rows[0], (std::vector<std::string>{"observable", "map", "value", "sigma", "exact"}));
    for (std::size_t i = 1; i < rows.size(); ++i) {
        ASSERT_EQ(rows[i].size(), 5u);
        const double value = std::stod(rows[i][2]), sigma = std::stod(rows[i][3]), exact = std::stod(rows[i][4]);
        EXPECT_LE(std::abs(value - exact), 5.0 * sigma + 1e-12) << r.out;
    }
}

TEST_F(CliTest, IdentityPairGivesOneWithZeroSigma) {
    ASSERT_EQ(run("sample --mixed --N 4 --S 300 --seed 4 --out " + path("b.csv")).code, 0);
    const CliRun r = run("estimate --batch " + path("b.csv") + " --circuit identity --observable identity");
    ASSERT_EQ(r.code, 0) << r.err;
    const auto rows = csv_rows(r.out);
    ASSERT_EQ(rows.size(), 2u);
    EXPECT_NEAR(std::stod(rows[1][2]), 1.0, 1e-12);
    EXPECT_LE(std::stod(rows[1][3]), 1e-12);
    EXPECT_EQ(rows[1][4], "");
}

TEST_F(CliTest, EstimateJsonReport) {
    const CliRun r = run("estimate --exact-state " + data("prep_w4.json") + " --circuit " + data("circuit_rand4.json") +
                      " --observable " + data("obs_zz4.json") + " --format json");
    ASSERT_EQ(r.code, 0) << r.err;
    const auto doc = vilma::parse_json(r.out, "stdout");
    ASSERT_TRUE(doc.is_array());
    ASSERT_EQ(doc.size(), 1u);
    EXPECT_EQ(doc[0]["circuit"], "circuit_rand4");
    EXPECT_EQ(doc[0]["observable"], "obs_zz4");
    EXPECT_DOUBLE_EQ(doc[0]["value"].get<double>(), doc[0]["exact"].get<double>());
}

TEST_F(CliTest, OracleCheckPassesAndRefusesLargeN) {
    const CliRun ok = run("oracle-check --N 4 --instances 5 --seed 2");
    EXPECT_EQ(ok.code, 0) << ok.out << ok.err;
    EXPECT_NE(ok.out.find("PASS forward-vs-dense"), std::string::npos);
    EXPECT_EQ(ok.out.find("FAIL"), std::string::npos);
    const CliRun big = run("oracle-check --N 7");
    EXPECT_EQ(big.code, 2);
    EXPECT_NE(big.err.find("oracle limited to N ≤ 6"), std::string::npos);
}

TEST_F(CliTest, CorruptCircuitReportsLocation) {
    const std::string bad = write("bad.json", "{\n  \"num_qubits\": 4,\n  \"components\": [\n    {\"qubits\": [0, 1],\n");
    const CliRun r = run("oracle-check --circuit " + bad);
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.err.find("line"), std::string::npos) << r.err;
}

TEST_F(CliTest, ValidationFailuresExitWithTwo) {
    EXPECT_EQ(run("").code, 2);
    EXPECT_EQ(run("sample --mixed --N 3").code, 2);
    EXPECT_EQ(run("sample --mixed --state x.json --N 3 --S 10").code, 2);
    EXPECT_EQ(run("estimate --batch missing.csv --circuit identity --observable identity").code, 2);
    const std::string bad = write("bad.csv", "# povm=sic seed=1 N=2 S=2\n0,1\n0,7\n");
    EXPECT_EQ(run("estimate --batch " + bad + " --circuit identity --observable identity").code, 2);
    const std::string cfg = write("cfg.json", "{\"rounds\": 0}");
    EXPECT_EQ(run("ansatz --N 3 --xx --config " + cfg).code, 2);
}

TEST_F(CliTest, NonTracePreservingPrepIsNumericalFailure) {
    const std::string prep = write("prep.json", R"([{"qubits": [0], "map": {"convention": "col-vec", "superop": )"
                                                R"([[2,0,0,0],[0,0,0,0],[0,0,0,0],[0,0,0,0]]}}])");
    const CliRun r = run("sample --state " + prep + " --N 2 --S 10");
    EXPECT_EQ(r.code, 3);
}

TEST_F(CliTest, OptimizeWritesReportCircuitAndHoldout) {
    ASSERT_EQ(run("sample --state " + data("prep_ghz4.json") + " --S 400 --seed 6 --out " + path("h.csv")).code, 0);
    const CliRun r = run("optimize --circuit " + data("circuit_staircase4.json") + " --observable " +
                      data("obs_xx4.json") + " --exact-state " + data("prep_ghz4.json") + " --config " +
                      data("optimizer.json") + " --rounds 2 --exact-ground --holdout " + path("h.csv") +
                      " --out-circuit " + path("c.json") + " --summary " + path("s.json") + " --out " +
                      path("r.csv"));
    ASSERT_EQ(r.code, 0) << r.err;
    const auto rows = csv_rows(read_text_file(path("r.csv")));
    ASSERT_GE(rows.size(), 2u);
    EXPECT_EQ(rows[0], (std::vector<std::string>{"iteration", "component", "energy", "relative_error"}));
    for (std::size_t i = 2; i < rows.size(); ++i) {
        EXPECT_LE(std::stod(rows[i][2]), std::stod(rows[i - 1][2]) + 1e-6);
    }
    const auto circuit = vilma::parse_circuit(read_text_file(path("c.json")));
    EXPECT_EQ(circuit.num_qubits(), 4);
    EXPECT_EQ(circuit.size(), 3u);
    const auto summary = vilma::parse_json(read_text_file(path("s.json")), "summary");
    EXPECT_TRUE(summary.contains("holdout"));
    EXPECT_EQ(summary["holdout"]["S"], 400);
    EXPECT_DOUBLE_EQ(summary["ground_energy"].get<double>(), -5.9);
}

TEST_F(CliTest, AnsatzIsDeterministic) {
    const std::string args = "ansatz --N 3 --xx --B 0.5 --init random_unitary --seed 4 --rounds 2 --summary " +
                             path("s.json") + " --out ";
    ASSERT_EQ(run(args + path("a.csv")).code, 0);
    ASSERT_EQ(run(args + path("b.csv")).code, 0);
    EXPECT_EQ(read_text_file(path("a.csv")), read_text_file(path("b.csv")));
    const auto summary = vilma::parse_json(read_text_file(path("s.json")), "summary");
    EXPECT_LE(summary["final_energy"].get<double>(), summary["initial_energy"].get<double>());
    EXPECT_GE(summary["final_energy"].get<double>(), summary["ground_energy"].get<double>() - 1e-6);
}

}  // namespace

namespace {

TEST_F(CliTest, StrictModeFailsOnIterationCap) {
    const std::string args = "ansatz --N 3 --xx --B 0.5 --init random_unitary --seed 4 --rounds 1 --sdp-max-iters 2 "
                             "--summary " + path("s.json") + " --out " + path("r.csv");
    EXPECT_EQ(run(args).code, 0);
    EXPECT_EQ(run(args + " --strict").code, 3);
}

}  // namespace

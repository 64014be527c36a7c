// Copyright 2026 The qigeo Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <catch_amalgamated.hpp>

#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <sstream>
#include <string>
#include <vector>

#include "qigeo/io.hpp"

using Catch::Matchers::WithinAbs;
namespace fs = std::filesystem;

namespace {

struct Run {
    int status = -1;
    std::string out;
};

Run run(const std::string& args) {
    const std::string cmd = std::string(QIGEO_CLI_PATH) + " " + args + " 2>/dev/null";
    Run r;
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    std::array<char, 4096> buf{};
    std::size_t n = 0;
    while ((n = std::fread(buf.data(), 1, buf.size(), pipe)) > 0) {
        r.out.append(buf.data(), n);
    }
    const int raw = pclose(pipe);
    r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
    return r;
}

std::vector<std::vector<std::string>> csv_rows(const std::string& text) {
    std::vector<std::vector<std::string>> rows;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') {
            continue;
        }
        std::vector<std::string> fields;
        std::istringstream ls(line);
        std::string f;
        while (std::getline(ls, f, ',')) {
            fields.push_back(f);
        }
        rows.push_back(fields);
    }
    return rows;
}

fs::path scratch() {
    const fs::path dir = fs::temp_directory_path() / "qigeo_cli_test";
    fs::create_directories(dir);
    return dir;
}

} // namespace

TEST_CASE("violation prints the four edges and V", "[cli]") {
    const Run r = run("violation --state bell --theta 0.3927");
    REQUIRE(r.status == 0);
    CHECK(r.out.rfind("# qigeo quadrilateral v1\n", 0) == 0);
    const auto rows = csv_rows(r.out);
    REQUIRE(rows.size() == 2);
    CHECK(rows[0] == std::vector<std::string>{"theta", "d_a1b1", "d_a2b1", "d_a2b2", "d_a1b2", "v"});
    CHECK_THAT(std::stod(rows[1][1]), WithinAbs(0.4667, 5e-4));
    CHECK_THAT(std::stod(rows[1][4]), WithinAbs(1.7832, 5e-4));
    CHECK_THAT(std::stod(rows[1][5]), WithinAbs(0.3832, 1e-3));
}

TEST_CASE("violation edge cases", "[cli]") {
    const auto mixed = csv_rows(run("violation --state werner:0,0 --theta 0.3927").out);
    CHECK(mixed[1][5] == "-4");
    const auto zero = csv_rows(run("violation --state bell --theta 0").out);
    for (std::size_t k = 1; k < 6; ++k) {
        CHECK(zero[1][k] == "0");
    }
    const Run json = run("violation --state bell --theta 0.3927 --format json");
    REQUIRE(json.status == 0);
    CHECK_THAT(qigeo::io::Json::parse(json.out)["v"].get<double>(), WithinAbs(0.3832, 1e-3));
}

TEST_CASE("usage errors exit with 2", "[cli]") {
    CHECK(run("violation --state ghz --theta 0.1").status == 2);
    CHECK(run("violation --state bell").status == 2);
    CHECK(run("nonsense").status == 2);
    CHECK(run("").status == 2);
    CHECK(run("sweep --state bell --paper-grid --range 0:1:0.1").status == 2);
    CHECK(run("sweep --state bell").status == 2);
    CHECK(run("sweep --state bell --format xml --paper-grid").status == 2);
    CHECK(run("reactivity --lambdas 0 --samples 10").status == 2);  // seed is required
    CHECK(run("fit --curve /nonexistent.csv").status == 2);
    CHECK(run("--help").status == 0);
}

TEST_CASE("sweep on the experimental grid is deterministic", "[cli][determinism]") {
    const Run a = run("sweep --state bell --paper-grid");
    const Run b = run("sweep --state bell --paper-grid");
    REQUIRE(a.status == 0);
    CHECK(a.out == b.out);
    const auto rows = csv_rows(a.out);
    REQUIRE(rows.size() == 9);
    CHECK(rows[1][0] == "0.175");
}

TEST_CASE("sweep over a range locates the maximum", "[cli]") {
    const auto rows = csv_rows(run("sweep --state bell --range 0.1:0.6:0.005").out);
    REQUIRE(rows.size() == 102);
    double best_theta = 0.0;
    double best_v = -1e9;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const double v = std::stod(rows[i][1]);
        if (v > best_v) {
            best_v = v;
            best_theta = std::stod(rows[i][0]);
        }
    }
    CHECK_THAT(best_theta, WithinAbs(0.305, 0.0051));
}

TEST_CASE("chsh", "[cli]") {
    const auto rows = csv_rows(run("chsh --state bell --optimal").out);
    REQUIRE(rows.size() == 2);
    CHECK(rows[1][1] == "2.82843");
    const auto listed = csv_rows(run("chsh --state bell --search-listed --unit physical").out);
    CHECK(listed[1][1] == "2.82843");
    const auto explicit_angles = csv_rows(run("chsh --state werner:0,0 --angles 0,1,2,3").out);
    CHECK(explicit_angles[1][1] == "0");
    CHECK(run("chsh --state bell --angles 0,1").status == 2);
}

TEST_CASE("reactivity of the maximally mixed state", "[cli]") {
    const Run r = run("reactivity --lambdas 0 --samples 100 --seed 1");
    REQUIRE(r.status == 0);
    const auto rows = csv_rows(r.out);
    REQUIRE(rows.size() == 2);
    CHECK(rows[1] == std::vector<std::string>{"0", "3", "4", "0.75"});
    CHECK(run("reactivity --lambdas 0.3,0.6 --samples 50 --seed 9").out ==
          run("reactivity --lambdas 0.3,0.6 --samples 50 --seed 9").out);
}

TEST_CASE("simulate, then fit the result", "[cli]") {
    const fs::path dir = scratch();
    const fs::path config = dir / "config.json";
    qigeo::io::write_file_atomic(config, R"({"state": {"lambda": 0.998, "phase": 0.225},
        "thetas": [0.175, 0.227, 0.279, 0.328, 0.393, 0.436, 0.471, 0.503],
        "counts_per_mode": 350, "accidental_mean": 6, "angle_sigma": 0.003, "seed": 1})");
    const fs::path curve = dir / "sim.csv";
    REQUIRE(run("simulate --config " + config.string() + " -o " + curve.string()).status == 0);
    const std::string text = qigeo::io::read_file(curve);
    CHECK(text.rfind("# qigeo simulated-sweep v1\ntheta,d_a1b1,d_a2b1,d_a2b2,d_a1b2,v,dv\n", 0) == 0);
    CHECK(csv_rows(text).size() == 9);
    CHECK(run("simulate --config " + config.string()).out == text);

    const Run fit = run("fit --curve " + curve.string() + " --weighted");
    REQUIRE(fit.status == 0);
    const auto j = qigeo::io::Json::parse(fit.out);
    CHECK(j["residuals"].size() == 8);
    CHECK(j["lambda"].get<double>() >= 0.0);
    CHECK(j["lambda"].get<double>() <= 1.0);

    qigeo::io::write_file_atomic(config, R"({"state": {"lambda": 0.998, "phase": 0.225}, "thetas": [0.3],
        "counts_per_mode": 350})");
    CHECK(run("simulate --config " + config.string()).status == 2);
    fs::remove_all(dir);
}

TEST_CASE("fit recovers a model-generated curve", "[cli]") {
    const fs::path dir = scratch();
    const fs::path curve = dir / "model.csv";
    REQUIRE(run("sweep --state werner:0.998,0.225 --paper-grid -o " + curve.string()).status == 0);
    const auto j = qigeo::io::Json::parse(run("fit --curve " + curve.string()).out);
    CHECK_THAT(j["lambda"].get<double>(), WithinAbs(0.998, 1e-3));
    CHECK_THAT(j["phase"].get<double>(), WithinAbs(0.225, 1e-3));
    fs::remove_all(dir);
}

TEST_CASE("tomo reconstructs from a counts file", "[cli]") {
    const fs::path dir = scratch();
    const fs::path counts = dir / "counts.csv";
    qigeo::io::write_file_atomic(
        counts, qigeo::io::tomo_dataset_to_csv(qigeo::expected_tomo_counts(
                    qigeo::DensityMatrix::from_pure(qigeo::bell_state(qigeo::BellKind::PhiPlus)), 1e5)));
    const Run r = run("tomo --counts " + counts.string());
    REQUIRE(r.status == 0);
    const auto j = qigeo::io::Json::parse(r.out);
    CHECK(j["fidelity"].get<double>() >= 0.999);
    CHECK(j["diagnostics"]["converged"] == true);

    const Run stuck = run("tomo --counts " + counts.string() + " --max-iterations 1");
    CHECK(stuck.status == 3);
    fs::remove_all(dir);
}

TEST_CASE("failed commands leave no output file", "[cli]") {
    const fs::path dir = scratch();
    const fs::path out = dir / "never.csv";
    CHECK(run("violation --state bogus --theta 0.1 -o " + out.string()).status == 2);
    CHECK_FALSE(fs::exists(out));
    fs::remove_all(dir);
}

TEST_CASE("visibility", "[cli]") {
    const auto rows = csv_rows(run("visibility --state werner:0.998,0.225 --basis da").out);
    REQUIRE(rows.size() == 2);
    CHECK_THAT(std::stod(rows[1][1]), WithinAbs(0.998 * std::cos(0.225), 1e-5));
}

TEST_CASE("reproduce-paper writes a results directory", "[cli]") {
    const fs::path dir = scratch() / "results";
    const Run r = run("reproduce-paper --out " + dir.string() + " --reactivity-samples 100");
    REQUIRE(r.status == 0);
    for (const char* name : {"quadrilateral_bell.csv", "sweep_bell.csv", "sweep_werner.csv", "simulated.csv",
                             "fit.json", "sweep_fit_line.csv", "chsh.csv", "reactivity.csv", "summary.md"}) {
        CHECK(fs::exists(dir / name));
    }
    fs::remove_all(scratch());
}

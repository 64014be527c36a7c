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

#include "qigeo/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <optional>
#include <sstream>
#include <system_error>

#include <fmt/format.h>

#include "qigeo/error.hpp"

namespace qigeo::io {

namespace {

std::string trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split(std::string_view line, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = line.find(sep, start);
        out.push_back(trim(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
        if (pos == std::string_view::npos) {
            break;
        }
        start = pos + 1;
    }
    return out;
}

std::optional<double> parse_double(const std::string& text) {
    if (text.empty()) {
        return std::nullopt;
    }
    std::size_t used = 0;
    double value = 0.0;
    try {
        value = std::stod(text, &used);
    } catch (const std::exception&) {
        return std::nullopt;
    }
    if (used != text.size()) {
        return std::nullopt;
    }
    return value;
}

double require_double(const std::string& text, std::string_view what) {
    const auto value = parse_double(text);
    if (!value || !std::isfinite(*value)) {
        throw DomainError(fmt::format("{}: not a finite number: '{}'", what, text));
    }
    return *value;
}

// Non-comment, non-blank lines.
std::vector<std::string> data_lines(std::istream& in) {
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) {
        const std::string t = trim(line);
        if (t.empty() || t.front() == '#') {
            continue;
        }
        lines.push_back(t);
    }
    return lines;
}

Json matrix_part(const ComplexMatrix& m, bool imaginary) {
    Json rows = Json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        Json row = Json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
            row.push_back(imaginary ? m(r, c).imag() : m(r, c).real());
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

Json number_or_null(double v) {
    if (std::isfinite(v)) {
        return v;
    }
    return nullptr;
}

} // namespace

std::string format_number(double value) {
    if (std::isnan(value)) {
        return "nan";
    }
    if (std::isinf(value)) {
        return value > 0 ? "inf" : "-inf";
    }
    if (value == 0.0) {
        return "0";  // avoids "-0"
    }
    return fmt::format("{:.6g}", value);
}

DensityMatrix parse_state_spec(std::string_view spec) {
    const std::string s = trim(spec);
    if (s == "bell") {
        return DensityMatrix::from_pure(bell_state(BellKind::PhiPlus));
    }
    constexpr std::string_view prefix = "werner:";
    if (s.rfind(prefix, 0) == 0) {
        const auto parts = split(std::string_view(s).substr(prefix.size()), ',');
        if (parts.size() != 2) {
            throw DomainError(fmt::format("state spec '{}': expected werner:LAMBDA,PHASE", s));
        }
        const double lambda = require_double(parts[0], "werner lambda");
        const double phase = require_double(parts[1], "werner phase");
        return modified_werner(lambda, phase);
    }
    throw DomainError(fmt::format("unknown state spec '{}' (expected 'bell' or 'werner:LAMBDA,PHASE')", s));
}

Json density_matrix_to_json(const ComplexMatrix& rho) {
    const auto dim = rho.rows();
    int n = 0;
    while ((Eigen::Index{1} << n) < dim) {
        ++n;
    }
    Json j;
    j["n_qubits"] = n;
    j["re"] = matrix_part(rho, false);
    j["im"] = matrix_part(rho, true);
    return j;
}

DensityMatrix density_matrix_from_json(const Json& j) {
    try {
        const int n = j.at("n_qubits").get<int>();
        if (n < 1 || n > kMaxQubits) {
            throw DomainError(fmt::format("density matrix: n_qubits {} out of range", n));
        }
        const Eigen::Index dim = Eigen::Index{1} << n;
        const auto& re = j.at("re");
        const auto& im = j.at("im");
        if (re.size() != static_cast<std::size_t>(dim) || im.size() != static_cast<std::size_t>(dim)) {
            throw DomainError("density matrix: row count does not match n_qubits");
        }
        ComplexMatrix m(dim, dim);
        for (Eigen::Index r = 0; r < dim; ++r) {
            const auto ur = static_cast<std::size_t>(r);
            if (re[ur].size() != static_cast<std::size_t>(dim) || im[ur].size() != static_cast<std::size_t>(dim)) {
                throw DomainError("density matrix: column count does not match n_qubits");
            }
            for (Eigen::Index c = 0; c < dim; ++c) {
                const auto uc = static_cast<std::size_t>(c);
                m(r, c) = Complex(re[ur][uc].get<double>(), im[ur][uc].get<double>());
            }
        }
        return DensityMatrix(m);
    } catch (const nlohmann::json::exception& e) {
        throw DomainError(fmt::format("density matrix JSON: {}", e.what()));
    }
}

std::string curve_to_csv(const ViolationCurve& curve) {
    std::string out = "# qigeo violation-curve v1\ntheta,v,dv\n";
    for (const auto& p : curve.points()) {
        out += fmt::format("{},{},{}\n", format_number(p.theta), format_number(p.v),
                           p.dv ? format_number(*p.dv) : std::string());
    }
    return out;
}

ViolationCurve curve_from_csv(std::istream& in) {
    const auto lines = data_lines(in);
    if (lines.empty()) {
        throw DomainError("curve CSV: no header");
    }
    const auto header = split(lines.front(), ',');
    auto column = [&](std::string_view name) -> std::optional<std::size_t> {
        for (std::size_t i = 0; i < header.size(); ++i) {
            if (header[i] == name) {
                return i;
            }
        }
        return std::nullopt;
    };
    const auto theta_col = column("theta");
    const auto v_col = column("v");
    const auto dv_col = column("dv");
    if (!theta_col || !v_col) {
        throw DomainError("curve CSV: header must name 'theta' and 'v' columns");
    }
    std::vector<ViolationPoint> points;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        const auto fields = split(lines[i], ',');
        if (fields.size() != header.size()) {
            throw DomainError(fmt::format("curve CSV line {}: expected {} fields, got {}", i + 1, header.size(),
                                          fields.size()));
        }
        ViolationPoint p;
        p.theta = require_double(fields[*theta_col], "curve CSV theta");
        p.v = require_double(fields[*v_col], "curve CSV v");
        if (dv_col && !fields[*dv_col].empty()) {
            p.dv = require_double(fields[*dv_col], "curve CSV dv");
        }
        points.push_back(p);
    }
    return ViolationCurve(std::move(points));
}

std::string simulated_sweep_to_csv(const SimulatedSweep& sweep) {
    std::string out = "# qigeo simulated-sweep v1\ntheta,d_a1b1,d_a2b1,d_a2b2,d_a1b2,v,dv\n";
    for (const auto& run : sweep.runs) {
        const auto& g = run.geometry;
        out += fmt::format("{},{},{},{},{},{},{}\n", format_number(run.theta), format_number(g.d_a1b1),
                           format_number(g.d_a2b1), format_number(g.d_a2b2), format_number(g.d_a1b2),
                           format_number(run.violation()), format_number(run.violation_uncertainty()));
    }
    return out;
}

Json quadrilateral_to_json(const QuadrilateralGeometry& g) {
    Json j;
    j["d_a1b1"] = g.d_a1b1;
    j["d_a2b1"] = g.d_a2b1;
    j["d_a2b2"] = g.d_a2b2;
    j["d_a1b2"] = g.d_a1b2;
    if (g.uncertainties) {
        j["uncertainties"] = *g.uncertainties;
    }
    j["v"] = g.violation();
    return j;
}

Json curve_to_json(const ViolationCurve& curve) {
    Json j;
    j["format"] = "qigeo violation-curve v1";
    Json points = Json::array();
    for (const auto& p : curve.points()) {
        Json row;
        row["theta"] = p.theta;
        row["v"] = p.v;
        row["dv"] = p.dv ? Json(*p.dv) : Json(nullptr);
        points.push_back(std::move(row));
    }
    j["points"] = std::move(points);
    return j;
}

Json simulated_sweep_to_json(const SimulatedSweep& sweep) {
    Json j;
    j["format"] = "qigeo simulated-sweep v1";
    Json runs = Json::array();
    for (const auto& run : sweep.runs) {
        Json row = quadrilateral_to_json(run.geometry);
        row["theta"] = run.theta;
        row["dv"] = run.violation_uncertainty();
        runs.push_back(std::move(row));
    }
    j["runs"] = std::move(runs);
    return j;
}

SimulationConfig SimulationConfig::from_json(const Json& j) {
    try {
        SimulationConfig c;
        const auto& state = j.at("state");
        c.lambda = state.at("lambda").get<double>();
        c.phase = state.at("phase").get<double>();
        c.thetas = j.at("thetas").get<std::vector<double>>();
        c.counts_per_mode = j.at("counts_per_mode").get<std::int64_t>();
        if (!j.contains("seed")) {
            throw DomainError("simulation config: 'seed' is required");
        }
        c.noise.seed = j.at("seed").get<std::uint64_t>();
        c.noise.accidental_mean = j.value("accidental_mean", c.noise.accidental_mean);
        c.noise.angle_sigma = j.value("angle_sigma", c.noise.angle_sigma);
        c.noise.validate();
        if (c.counts_per_mode < 1) {
            throw DomainError("simulation config: counts_per_mode must be >= 1");
        }
        if (c.thetas.empty()) {
            throw DomainError("simulation config: thetas is empty");
        }
        return c;
    } catch (const nlohmann::json::exception& e) {
        throw DomainError(fmt::format("simulation config: {}", e.what()));
    }
}

Json fit_to_json(const WernerFit& fit) {
    Json j;
    j["format"] = "qigeo werner-fit v1";
    j["lambda"] = fit.lambda;
    j["phase"] = fit.phase;
    j["residual_sum"] = fit.residual_sum;
    j["residuals"] = fit.residuals;
    return j;
}

TomoDataset tomo_dataset_from_csv(std::istream& in) {
    std::vector<std::pair<std::string, std::int64_t>> rows;
    const auto lines = data_lines(in);
    for (std::size_t i = 0; i < lines.size(); ++i) {
        const auto fields = split(lines[i], ',');
        if (fields.size() != 2) {
            throw DomainError(fmt::format("tomography CSV: expected 'label,counts', got '{}'", lines[i]));
        }
        if (i == 0 && fields[0] == "label") {
            continue;
        }
        std::int64_t count = 0;
        const auto& text = fields[1];
        const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), count);
        if (ec != std::errc() || ptr != text.data() + text.size()) {
            throw DomainError(fmt::format("tomography CSV: bad count '{}' for {}", text, fields[0]));
        }
        rows.emplace_back(fields[0], count);
    }
    return TomoDataset(rows);
}

std::string tomo_dataset_to_csv(const TomoDataset& data) {
    std::string out = "# qigeo tomo-counts v1\nlabel,counts\n";
    const auto& modes = tomo_modes();
    for (std::size_t i = 0; i < kTomoModeCount; ++i) {
        out += fmt::format("{},{}\n", modes[i].label, data.counts()[i]);
    }
    return out;
}

Json tomography_to_json(const TomographyResult& r) {
    Json j;
    j["format"] = "qigeo tomography v1";
    j["rho_mle"] = density_matrix_to_json(r.rho_mle.matrix());
    j["rho_linear"] = density_matrix_to_json(r.rho_linear);
    j["fidelity"] = r.report.fidelity;
    j["tangle"] = r.report.tangle;
    j["concurrence"] = r.report.concurrence;
    j["linear_entropy"] = r.report.linear_entropy;
    j["purity"] = r.report.purity;
    j["log_likelihood"] = number_or_null(r.log_likelihood);
    Json d;
    d["converged"] = r.diagnostics.converged;
    d["iterations"] = r.diagnostics.iterations;
    d["function_evaluations"] = r.diagnostics.function_evaluations;
    d["last_delta"] = r.diagnostics.last_delta;
    d["gradient_norm"] = r.diagnostics.gradient_norm;
    j["diagnostics"] = std::move(d);
    return j;
}

std::string reactivity_to_csv(std::span<const ReactivityScanPoint> scan) {
    std::string out = "# qigeo reactivity-scan v1\nlambda,area,volume,reactivity\n";
    for (const auto& p : scan) {
        out += fmt::format("{},{},{},{}\n", format_number(p.lambda), format_number(p.result.mean_area),
                           format_number(p.result.mean_volume),
                           format_number(p.result.infinite ? std::numeric_limits<double>::infinity()
                                                           : p.result.reactivity));
    }
    return out;
}

Json reactivity_to_json(std::span<const ReactivityScanPoint> scan) {
    Json j;
    j["format"] = "qigeo reactivity-scan v1";
    Json rows = Json::array();
    for (const auto& p : scan) {
        Json row;
        row["lambda"] = p.lambda;
        row["area"] = p.result.mean_area;
        row["volume"] = p.result.mean_volume;
        row["reactivity"] = p.result.infinite ? Json("inf") : Json(p.result.reactivity);
        row["samples"] = p.result.n_samples;
        row["seed"] = p.result.seed;
        rows.push_back(std::move(row));
    }
    j["points"] = std::move(rows);
    return j;
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw DomainError(fmt::format("cannot open '{}'", path.string()));
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

void write_file_atomic(const std::filesystem::path& path, std::string_view content) {
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw DomainError(fmt::format("cannot write '{}'", tmp.string()));
        }
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        out.flush();
        if (!out) {
            std::error_code ignored;
            std::filesystem::remove(tmp, ignored);
            throw DomainError(fmt::format("write to '{}' failed", tmp.string()));
        }
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp, ec);
        throw DomainError(fmt::format("cannot rename onto '{}'", path.string()));
    }
}

} // namespace qigeo::io

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

// qigeo: command-line front end.
//
// Exit codes: 0 success, 2 usage or input error, 3 numerical failure.

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "qigeo/error.hpp"
#include "qigeo/expsim.hpp"
#include "qigeo/fitting.hpp"
#include "qigeo/infogeo.hpp"
#include "qigeo/io.hpp"
#include "qigeo/qstate.hpp"
#include "qigeo/tomography.hpp"

namespace {

using namespace qigeo;

constexpr int kExitUsage = 2;
constexpr int kExitNumerical = 3;

struct Output {
    std::string format = "csv";
    std::string path;

    void add_to(CLI::App* cmd, const std::string& default_format) {
        format = default_format;
        cmd->add_option("--format", format, "Output format")->check(CLI::IsMember({"csv", "json"}))->capture_default_str();
        cmd->add_option("-o,--output", path, "Write to this file instead of stdout");
    }

    [[nodiscard]] bool json() const { return format == "json"; }

    void emit(const std::string& content) const {
        if (path.empty()) {
            std::cout << content;
            std::cout.flush();
        } else {
            io::write_file_atomic(path, content);
        }
    }

    void emit(const io::Json& j) const { emit(j.dump(2) + "\n"); }
};

std::vector<double> parse_range(const std::string& text) {
    std::vector<std::string> parts;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ':')) {
        parts.push_back(item);
    }
    if (parts.size() != 3) {
        throw DomainError(fmt::format("range '{}': expected START:STOP:STEP", text));
    }
    double lo = 0.0;
    double hi = 0.0;
    double step = 0.0;
    try {
        lo = std::stod(parts[0]);
        hi = std::stod(parts[1]);
        step = std::stod(parts[2]);
    } catch (const std::exception&) {
        throw DomainError(fmt::format("range '{}': not numeric", text));
    }
    if (!(step > 0.0) || !(hi >= lo)) {
        throw DomainError(fmt::format("range '{}': need STOP >= START and STEP > 0", text));
    }
    std::vector<double> out;
    const auto n = static_cast<long>(std::floor((hi - lo) / step + 1e-9));
    for (long i = 0; i <= n; ++i) {
        out.push_back(lo + static_cast<double>(i) * step);
    }
    return out;
}

MeasurementSetting setting_in_unit(double angle, const std::string& unit) {
    if (unit == "physical") {
        return MeasurementSetting::from_physical(angle);
    }
    if (unit == "hwp") {
        return MeasurementSetting::from_hwp(angle);
    }
    return MeasurementSetting::from_stokes(angle);
}

std::string quadrilateral_csv(double theta, const QuadrilateralGeometry& g) {
    return fmt::format("# qigeo quadrilateral v1\ntheta,d_a1b1,d_a2b1,d_a2b2,d_a1b2,v\n{},{},{},{},{},{}\n",
                       io::format_number(theta), io::format_number(g.d_a1b1), io::format_number(g.d_a2b1),
                       io::format_number(g.d_a2b2), io::format_number(g.d_a1b2), io::format_number(g.violation()));
}

std::string chsh_csv_header() { return "# qigeo chsh v1\nlabel,s,a1,a2,b1,b2\n"; }

std::string chsh_csv_row(const std::string& label, double s, const ChshSettings& st) {
    return fmt::format("{},{},{},{},{},{}\n", label, io::format_number(s), io::format_number(st.a1.stokes_angle),
                       io::format_number(st.a2.stokes_angle), io::format_number(st.b1.stokes_angle),
                       io::format_number(st.b2.stokes_angle));
}

io::Json chsh_json(double s, const ChshSettings& st) {
    io::Json j;
    j["format"] = "qigeo chsh v1";
    j["s"] = s;
    j["stokes"] = {st.a1.stokes_angle, st.a2.stokes_angle, st.b1.stokes_angle, st.b2.stokes_angle};
    return j;
}

std::vector<io::ReactivityScanPoint> reactivity_scan(const std::vector<double>& lambdas, int samples,
                                                     std::uint64_t seed) {
    std::vector<io::ReactivityScanPoint> scan;
    for (double lambda : lambdas) {
        scan.push_back({lambda, reactivity(modified_werner(lambda, 0.0, 4), samples, seed)});
    }
    return scan;
}

// ---------------------------------------------------------------------------

struct ReproduceOptions {
    std::string out_dir;
    std::uint64_t seed = 1;
    int reactivity_samples = 2000;
};

void reproduce(const ReproduceOptions& opt) {
    namespace fs = std::filesystem;
    const fs::path dir(opt.out_dir);
    fs::create_directories(dir);

    const DensityMatrix bell = DensityMatrix::from_pure(bell_state(BellKind::PhiPlus));
    const DensityMatrix werner = modified_werner(0.998, 0.225);
    const std::vector<double> grid = experimental_theta_grid();

    const double theta0 = std::numbers::pi / 8.0;
    const QuadrilateralGeometry eq = quadrilateral(bell, theta0);
    io::write_file_atomic(dir / "quadrilateral_bell.csv", quadrilateral_csv(theta0, eq));

    const ViolationCurve bell_curve = sweep(bell, grid);
    const ViolationCurve werner_curve = sweep(werner, grid);
    io::write_file_atomic(dir / "sweep_bell.csv", io::curve_to_csv(bell_curve));
    io::write_file_atomic(dir / "sweep_werner.csv", io::curve_to_csv(werner_curve));
    const ViolationMaximum peak = find_max_violation(bell, 0.1, 0.6);

    NoiseConfig noise;
    noise.seed = opt.seed;
    const SimulatedSweep simulated = simulate_sweep(werner, grid, 350, noise);
    io::write_file_atomic(dir / "simulated.csv", io::simulated_sweep_to_csv(simulated));

    const WernerFit fit = fit_werner(simulated.curve());
    io::write_file_atomic(dir / "fit.json", io::fit_to_json(fit).dump(2) + "\n");
    const std::vector<double> dense = parse_range("0.15:0.55:0.005");
    io::write_file_atomic(dir / "sweep_fit_line.csv",
                          io::curve_to_csv(sweep(modified_werner(fit.lambda, fit.phase), dense)));

    const ChshSettings optimal = optimal_chsh_settings();
    const double s_bell = chsh(bell, optimal.a1, optimal.a2, optimal.b1, optimal.b2);
    const double s_werner = chsh(werner, optimal.a1, optimal.a2, optimal.b1, optimal.b2);
    std::vector<MeasurementSetting> candidates;
    for (double a : chsh_candidate_angles()) {
        candidates.push_back(MeasurementSetting::from_physical(a));
    }
    const ChshSearchResult listed = chsh_search(werner, candidates);
    io::write_file_atomic(dir / "chsh.csv", chsh_csv_header() + chsh_csv_row("bell_optimal", s_bell, optimal) +
                                                chsh_csv_row("werner_optimal", s_werner, optimal) +
                                                chsh_csv_row("werner_listed_angles", listed.s, listed.settings));

    const auto scan = reactivity_scan({0.0, 0.2, 0.4, 0.6, 0.8, 1.0}, opt.reactivity_samples, opt.seed);
    io::write_file_atomic(dir / "reactivity.csv", io::reactivity_to_csv(scan));

    const MeasuredQuadrilateral& at393 = simulated.runs[4];
    std::string summary;
    summary += "# qigeo reproduction summary v1\n\n";
    summary += "| quantity | value |\n|---|---|\n";
    summary += fmt::format("| Bell edges at theta = pi/8 (a1b1, a2b1, a2b2, a1b2) | {}, {}, {}, {} |\n",
                           io::format_number(eq.d_a1b1), io::format_number(eq.d_a2b1), io::format_number(eq.d_a2b2),
                           io::format_number(eq.d_a1b2));
    summary += fmt::format("| Bell V(pi/8) | {} |\n", io::format_number(eq.violation()));
    summary += fmt::format("| Bell argmax of V on [0.1, 0.6] | theta = {}, V = {} |\n", io::format_number(peak.theta),
                           io::format_number(peak.v));
    summary += fmt::format("| Simulated Werner(0.998, 0.225) base edge at theta = {} | {} +- {} |\n",
                           io::format_number(at393.theta), io::format_number(at393.geometry.d_a1b2),
                           io::format_number(at393.errors[3].total));
    summary += fmt::format("| Werner fit to the simulated sweep (lambda, phase) | {}, {} |\n",
                           io::format_number(fit.lambda), io::format_number(fit.phase));
    summary += fmt::format("| CHSH S, Bell, optimal settings | {} |\n", io::format_number(s_bell));
    summary += fmt::format("| CHSH S, Werner(0.998, 0.225), optimal settings | {} |\n", io::format_number(s_werner));
    summary += fmt::format("| CHSH S, Werner(0.998, 0.225), best over listed angles | {} |\n",
                           io::format_number(listed.s));
    for (const auto& p : scan) {
        summary += fmt::format("| Reactivity, 4-qubit GHZ-Werner lambda = {} | {} |\n", io::format_number(p.lambda),
                               p.result.infinite ? std::string("inf") : io::format_number(p.result.reactivity));
    }
    io::write_file_atomic(dir / "summary.md", summary);
    std::cout << summary;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Information-distance Bell tests on two-photon polarization states"};
    app.require_subcommand(1);

    // violation
    std::string state_spec;
    double theta = 0.0;
    Output violation_out;
    auto* cmd_violation = app.add_subcommand("violation", "Four edge distances and V at one theta");
    cmd_violation->add_option("--state", state_spec, "bell | werner:LAMBDA,PHASE")->required();
    cmd_violation->add_option("--theta", theta, "Stokes angle theta (radians)")->required();
    violation_out.add_to(cmd_violation, "csv");

    // sweep
    std::string sweep_state;
    bool experimental_grid = false;
    std::string range;
    std::vector<double> thetas;
    Output sweep_out;
    auto* cmd_sweep = app.add_subcommand("sweep", "V over a theta grid");
    cmd_sweep->add_option("--state", sweep_state, "bell | werner:LAMBDA,PHASE")->required();
    auto* grid_flag = cmd_sweep->add_flag("--paper-grid", experimental_grid, "The eight experimental angles");
    auto* range_opt = cmd_sweep->add_option("--range", range, "START:STOP:STEP");
    auto* thetas_opt = cmd_sweep->add_option("--thetas", thetas, "Explicit comma-separated angles")->delimiter(',');
    grid_flag->excludes(range_opt)->excludes(thetas_opt);
    range_opt->excludes(thetas_opt);
    sweep_out.add_to(cmd_sweep, "csv");

    // simulate
    std::string config_path;
    Output simulate_out;
    auto* cmd_simulate = app.add_subcommand("simulate", "Finite-count simulation of a sweep");
    cmd_simulate->add_option("--config", config_path, "JSON run configuration")->required()->check(CLI::ExistingFile);
    simulate_out.add_to(cmd_simulate, "csv");

    // tomo
    std::string counts_path;
    MleOptions mle_options;
    Output tomo_out;
    auto* cmd_tomo = app.add_subcommand("tomo", "Maximum-likelihood tomography from 16 mode counts");
    cmd_tomo->add_option("--counts", counts_path, "CSV of label,counts")->required()->check(CLI::ExistingFile);
    cmd_tomo->add_option("--max-iterations", mle_options.max_iterations)->capture_default_str();
    tomo_out.add_to(cmd_tomo, "json");

    // chsh
    std::string chsh_state;
    bool chsh_optimal = false;
    std::vector<double> chsh_angles;
    bool chsh_search_listed = false;
    std::string chsh_unit = "stokes";
    Output chsh_out;
    auto* cmd_chsh = app.add_subcommand("chsh", "CHSH parameter S");
    cmd_chsh->add_option("--state", chsh_state, "bell | werner:LAMBDA,PHASE")->required();
    auto* optimal_flag = cmd_chsh->add_flag("--optimal", chsh_optimal, "Settings reaching 2 sqrt(2) on |Phi+>");
    auto* angles_opt =
        cmd_chsh->add_option("--angles", chsh_angles, "a1,a2,b1,b2")->delimiter(',')->expected(4);
    auto* listed_flag = cmd_chsh->add_flag("--search-listed", chsh_search_listed,
                                           "Best |S| over the angles 0, pi/8, ..., 7pi/8");
    cmd_chsh->add_option("--unit", chsh_unit, "Angle unit for --angles and --search-listed")
        ->check(CLI::IsMember({"stokes", "physical", "hwp"}))
        ->capture_default_str();
    optimal_flag->excludes(angles_opt)->excludes(listed_flag);
    angles_opt->excludes(listed_flag);
    chsh_out.add_to(cmd_chsh, "csv");

    // fit
    std::string curve_path;
    FitOptions fit_options;
    Output fit_out;
    auto* cmd_fit = app.add_subcommand("fit", "Least-squares Werner fit to a violation curve");
    cmd_fit->add_option("--curve", curve_path, "Curve CSV (theta,v[,dv])")->required()->check(CLI::ExistingFile);
    cmd_fit->add_flag("--weighted", fit_options.weighted, "Weight residuals by 1/dv^2");
    fit_out.add_to(cmd_fit, "json");

    // reactivity
    std::vector<double> lambdas;
    int samples = 2000;
    std::uint64_t seed = 0;
    Output reactivity_out;
    auto* cmd_reactivity = app.add_subcommand("reactivity", "Area/volume ratio of 4-qubit GHZ-Werner states");
    cmd_reactivity->add_option("--lambdas", lambdas, "Comma-separated lambda values")->required()->delimiter(',');
    cmd_reactivity->add_option("--samples", samples)->check(CLI::PositiveNumber)->capture_default_str();
    cmd_reactivity->add_option("--seed", seed)->required();
    reactivity_out.add_to(cmd_reactivity, "csv");

    // visibility
    std::string vis_state;
    std::string vis_basis = "da";
    Output vis_out;
    auto* cmd_vis = app.add_subcommand("visibility", "Polarization-correlation fringe visibility");
    cmd_vis->add_option("--state", vis_state, "bell | werner:LAMBDA,PHASE")->required();
    cmd_vis->add_option("--basis", vis_basis)->check(CLI::IsMember({"hv", "da"}))->capture_default_str();
    vis_out.add_to(cmd_vis, "csv");

    // reproduce-paper
    ReproduceOptions repro;
    auto* cmd_repro = app.add_subcommand("reproduce-paper", "Run every pipeline and write a results directory");
    cmd_repro->add_option("--out", repro.out_dir, "Results directory")->required();
    cmd_repro->add_option("--seed", repro.seed)->capture_default_str();
    cmd_repro->add_option("--reactivity-samples", repro.reactivity_samples)
        ->check(CLI::PositiveNumber)
        ->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitUsage;
    }

    try {
        if (cmd_violation->parsed()) {
            const DensityMatrix rho = io::parse_state_spec(state_spec);
            const QuadrilateralGeometry g = quadrilateral(rho, theta);
            if (violation_out.json()) {
                io::Json j = io::quadrilateral_to_json(g);
                j["theta"] = theta;
                violation_out.emit(j);
            } else {
                violation_out.emit(quadrilateral_csv(theta, g));
            }
        } else if (cmd_sweep->parsed()) {
            const DensityMatrix rho = io::parse_state_spec(sweep_state);
            std::vector<double> grid;
            if (experimental_grid) {
                grid = experimental_theta_grid();
            } else if (!range.empty()) {
                grid = parse_range(range);
            } else if (!thetas.empty()) {
                grid = thetas;
            } else {
                throw DomainError("sweep: give one of --paper-grid, --range or --thetas");
            }
            const ViolationCurve curve = sweep(rho, grid);
            sweep_out.json() ? sweep_out.emit(io::curve_to_json(curve)) : sweep_out.emit(io::curve_to_csv(curve));
        } else if (cmd_simulate->parsed()) {
            const auto config = io::SimulationConfig::from_json(io::Json::parse(io::read_file(config_path)));
            const SimulatedSweep result = simulate_sweep(modified_werner(config.lambda, config.phase), config.thetas,
                                                         config.counts_per_mode, config.noise);
            simulate_out.json() ? simulate_out.emit(io::simulated_sweep_to_json(result))
                                : simulate_out.emit(io::simulated_sweep_to_csv(result));
        } else if (cmd_tomo->parsed()) {
            std::istringstream in(io::read_file(counts_path));
            const TomographyResult result = mle_reconstruct(io::tomo_dataset_from_csv(in), mle_options);
            tomo_out.emit(io::tomography_to_json(result));
            if (!result.diagnostics.converged) {
                std::cerr << fmt::format("tomo: MLE did not converge in {} iterations (last delta {:.3g})\n",
                                         result.diagnostics.iterations, result.diagnostics.last_delta);
                return kExitNumerical;
            }
        } else if (cmd_chsh->parsed()) {
            const DensityMatrix rho = io::parse_state_spec(chsh_state);
            double s = 0.0;
            ChshSettings st{};
            if (chsh_search_listed) {
                std::vector<MeasurementSetting> candidates;
                for (double a : chsh_candidate_angles()) {
                    candidates.push_back(setting_in_unit(a, chsh_unit));
                }
                const ChshSearchResult r = chsh_search(rho, candidates);
                s = r.s;
                st = r.settings;
            } else {
                if (chsh_optimal) {
                    st = optimal_chsh_settings();
                } else if (chsh_angles.size() == 4) {
                    st = {setting_in_unit(chsh_angles[0], chsh_unit), setting_in_unit(chsh_angles[1], chsh_unit),
                          setting_in_unit(chsh_angles[2], chsh_unit), setting_in_unit(chsh_angles[3], chsh_unit)};
                } else {
                    throw DomainError("chsh: give one of --optimal, --angles or --search-listed");
                }
                s = chsh(rho, st.a1, st.a2, st.b1, st.b2);
            }
            chsh_out.json() ? chsh_out.emit(chsh_json(s, st))
                            : chsh_out.emit(chsh_csv_header() + chsh_csv_row("s", s, st));
        } else if (cmd_fit->parsed()) {
            std::istringstream in(io::read_file(curve_path));
            fit_out.emit(io::fit_to_json(fit_werner(io::curve_from_csv(in), fit_options)));
        } else if (cmd_reactivity->parsed()) {
            const auto scan = reactivity_scan(lambdas, samples, seed);
            reactivity_out.json() ? reactivity_out.emit(io::reactivity_to_json(scan))
                                  : reactivity_out.emit(io::reactivity_to_csv(scan));
        } else if (cmd_vis->parsed()) {
            const DensityMatrix rho = io::parse_state_spec(vis_state);
            const double v = visibility(rho, vis_basis == "hv" ? VisibilityBasis::HV : VisibilityBasis::DA);
            if (vis_out.json()) {
                io::Json j;
                j["format"] = "qigeo visibility v1";
                j["basis"] = vis_basis;
                j["visibility"] = v;
                vis_out.emit(j);
            } else {
                vis_out.emit(fmt::format("# qigeo visibility v1\nbasis,visibility\n{},{}\n", vis_basis,
                                         io::format_number(v)));
            }
        } else if (cmd_repro->parsed()) {
            reproduce(repro);
        }
    } catch (const DomainError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const io::Json::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::runtime_error& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return kExitNumerical;
    }
    return 0;
}

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

#pragma once

// File formats shared by the command-line tool and the tests.
//
// Every text format starts with a versioned comment line such as
//   # qigeo violation-curve v1
// Readers skip lines beginning with '#'. CSV numbers are printed with six
// significant digits.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "qigeo/expsim.hpp"
#include "qigeo/fitting.hpp"
#include "qigeo/infogeo.hpp"
#include "qigeo/qstate.hpp"
#include "qigeo/tomography.hpp"

namespace qigeo::io {

using Json = nlohmann::ordered_json;

/// Six significant digits, shortest form ("{:.6g}").
std::string format_number(double value);

// ---------------------------------------------------------------------------
// States

/// "bell" for |Phi+>, or "werner:LAMBDA,PHASE". Throws DomainError.
DensityMatrix parse_state_spec(std::string_view spec);

/// {n_qubits, re[][], im[][]}
Json density_matrix_to_json(const ComplexMatrix& rho);
DensityMatrix density_matrix_from_json(const Json& j);

// ---------------------------------------------------------------------------
// Violation curves and simulated sweeps

/// Columns theta,v,dv; dv is empty when unknown.
std::string curve_to_csv(const ViolationCurve& curve);

/// Reads the curve CSV or the simulated-sweep CSV (columns located by
/// header name). Throws DomainError on malformed input.
ViolationCurve curve_from_csv(std::istream& in);

/// Columns theta,d_a1b1,d_a2b1,d_a2b2,d_a1b2,v,dv.
std::string simulated_sweep_to_csv(const SimulatedSweep& sweep);

Json quadrilateral_to_json(const QuadrilateralGeometry& geometry);
Json curve_to_json(const ViolationCurve& curve);
Json simulated_sweep_to_json(const SimulatedSweep& sweep);

/// Parsed simulation config:
///   {state: {lambda, phase}, thetas: [...], counts_per_mode,
///    accidental_mean, angle_sigma, seed}
/// `seed` is required; the noise fields default to NoiseConfig.
struct SimulationConfig {
    double lambda = 1.0;
    double phase = 0.0;
    std::vector<double> thetas;
    std::int64_t counts_per_mode = 350;
    NoiseConfig noise;

    static SimulationConfig from_json(const Json& j);
};

// ---------------------------------------------------------------------------
// Fitting, tomography, reactivity

/// {lambda, phase, residual_sum, residuals}
Json fit_to_json(const WernerFit& fit);

/// Rows "label,counts" in any order, optional "label,counts" header.
TomoDataset tomo_dataset_from_csv(std::istream& in);
std::string tomo_dataset_to_csv(const TomoDataset& data);

/// {rho_mle, rho_linear, fidelity, tangle, concurrence, linear_entropy,
///  purity, log_likelihood, diagnostics}
Json tomography_to_json(const TomographyResult& result);

struct ReactivityScanPoint {
    double lambda = 0.0;
    ReactivityResult result;
};

/// Columns lambda,area,volume,reactivity; an infinite reactivity prints "inf".
std::string reactivity_to_csv(std::span<const ReactivityScanPoint> scan);
Json reactivity_to_json(std::span<const ReactivityScanPoint> scan);

// ---------------------------------------------------------------------------
// Files

std::string read_file(const std::filesystem::path& path);

/// Writes to a sibling temporary file and renames it over `path`, so a
/// failure never leaves a partial file behind.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

} // namespace qigeo::io

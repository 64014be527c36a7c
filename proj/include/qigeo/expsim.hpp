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

// Finite-statistics simulation of the four-edge coincidence experiment:
// multinomial coincidence sampling, Poissonian accidental counts, estimation
// of outcome probabilities from counts, and quadrature error propagation.

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "qigeo/distribution.hpp"
#include "qigeo/infogeo.hpp"
#include "qigeo/qstate.hpp"

namespace qigeo {

struct NoiseConfig {
    double accidental_mean = 6.0;  // accidental coincidences added per outcome bin
    double angle_sigma = 0.0030;   // half-wave-plate calibration error, radians
    std::uint64_t seed = 1;

    /// Throws DomainError on negative or non-finite fields.
    void validate() const;
};

/// Integer coincidence counts for one detector configuration.
struct CoincidenceRecord {
    std::vector<MeasurementSetting> settings;
    std::vector<std::int64_t> counts;        // indexed like JointDistribution
    std::vector<double> accidental_estimate; // expected accidental counts per bin
    std::int64_t total_trials = 0;           // == sum(counts)

    /// Throws DomainError if sizes disagree, a count is negative or the
    /// total does not match.
    void validate() const;
};

/// Multinomial draw of n_trials outcomes. Deterministic for a given
/// (seed, stream).
CoincidenceRecord sample_counts(const JointDistribution& dist, std::int64_t n_trials, std::uint64_t seed,
                                std::uint64_t stream = 0);

/// Adds an independent Poisson(accidental_mean) count to each bin and
/// accumulates the mean into accidental_estimate. Uses noise.seed.
CoincidenceRecord add_accidentals(CoincidenceRecord record, const NoiseConfig& noise, std::uint64_t stream = 0);

/// max(0, count - accidental_estimate) per bin, renormalized. Throws
/// EstimationError if nothing survives the subtraction.
JointDistribution estimate_distribution(const CoincidenceRecord& record);

/// Contributions to one edge's uncertainty, in bits.
struct EdgeUncertainty {
    double angle_a = 0.0;  // |dD/d alpha| * angle_sigma
    double angle_b = 0.0;  // |dD/d beta| * angle_sigma
    double counts = 0.0;   // sqrt(sum_j (dD/dN_j sqrt(N_j))^2)
    double total = 0.0;    // all three in quadrature
};

struct MeasuredQuadrilateral {
    double theta = 0.0;
    QuadrilateralGeometry geometry;           // uncertainties always populated
    std::array<EdgeUncertainty, 4> errors{};  // edge order of QuadrilateralGeometry::edges()

    [[nodiscard]] double violation() const { return geometry.violation(); }

    /// Edge uncertainties combined in quadrature (edges are measured
    /// independently).
    [[nodiscard]] double violation_uncertainty() const;
};

/// Quadrature error budget for every edge, evaluated on the exact model.
/// counts_per_mode is the number of coincidences recorded for each edge.
MeasuredQuadrilateral propagate_error(const DensityMatrix& rho_model, double theta, std::int64_t counts_per_mode,
                                      const NoiseConfig& noise);

/// One simulated measurement of all four edges at `theta`: counts are
/// sampled, accidentals added and subtracted, distances estimated; the
/// uncertainties come from propagate_error. `run_index` separates the random
/// streams of runs that share noise.seed.
MeasuredQuadrilateral simulate_schumacher_run(const DensityMatrix& rho, double theta, std::int64_t counts_per_mode,
                                              const NoiseConfig& noise, std::uint64_t run_index = 0);

struct SimulatedSweep {
    std::vector<MeasuredQuadrilateral> runs;

    [[nodiscard]] ViolationCurve curve() const;
};

SimulatedSweep simulate_sweep(const DensityMatrix& rho, std::span<const double> thetas,
                              std::int64_t counts_per_mode, const NoiseConfig& noise);

} // namespace qigeo

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

// Shannon-entropy machinery over measurement outcomes, the information
// distance D_AB = 2 H_AB - H_A - H_B, the four-detector quadrilateral and its
// triangle-violation functional, and the multipartite area/volume/reactivity
// generalization. All entropies are in bits.

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "qigeo/distribution.hpp"
#include "qigeo/qstate.hpp"

namespace qigeo {

// ---------------------------------------------------------------------------
// Entropies

/// -sum p log2 p with 0 log 0 = 0. Entries below 1e-15 count as zero.
double shannon_entropy(std::span<const double> probabilities);

double joint_entropy(const JointDistribution& dist);

/// Entropy of the marginal over `parties`.
double marginal_entropy(const JointDistribution& dist, std::span<const int> parties);

/// H(target | given), evaluated directly as -sum p(t, g) log2 p(t | g).
double conditional_entropy(const JointDistribution& dist, std::span<const int> target,
                           std::span<const int> given);

/// Entropy of every other party conditioned on party `given`.
double conditional_entropy(const JointDistribution& dist, int given);

/// Information distance between the two parties of a two-party table.
double info_distance(const JointDistribution& dist);

/// Information distance between parties a and b of a multiparty table.
double info_distance(const JointDistribution& dist, int a, int b);

// ---------------------------------------------------------------------------
// Quadrilateral

/// Detector settings for Alice (a1, a2) and Bob (b1, b2).
struct QuadrilateralSettings {
    MeasurementSetting a1, a2, b1, b2;

    /// Every Stokes angle shifted by `offset`.
    [[nodiscard]] QuadrilateralSettings rotated(double offset) const;
};

/// Stokes angles {a1 = 0, a2 = 2 theta, b1 = theta, b2 = 3 theta}.
QuadrilateralSettings schumacher_settings(double theta);

struct QuadrilateralGeometry {
    double d_a1b1 = 0.0;
    double d_a2b1 = 0.0;
    double d_a2b2 = 0.0;
    double d_a1b2 = 0.0;  // the base: direct route A1 -> B2
    std::optional<std::array<double, 4>> uncertainties;  // same edge order

    [[nodiscard]] std::array<double, 4> edges() const { return {d_a1b1, d_a2b1, d_a2b2, d_a1b2}; }
    [[nodiscard]] double indirect_route() const { return d_a1b1 + d_a2b1 + d_a2b2; }

    /// base - (sum of the three sides); positive means the triangle
    /// inequality is violated.
    [[nodiscard]] double violation() const { return d_a1b2 - indirect_route(); }
};

QuadrilateralGeometry quadrilateral(const DensityMatrix& rho, const QuadrilateralSettings& settings);
QuadrilateralGeometry quadrilateral(const DensityMatrix& rho, double theta);
double violation(const DensityMatrix& rho, double theta);

struct ViolationPoint {
    double theta = 0.0;
    double v = 0.0;
    std::optional<double> dv;
};

/// Violation values over strictly increasing theta.
class ViolationCurve {
  public:
    /// Throws DomainError unless thetas are finite and strictly increasing.
    explicit ViolationCurve(std::vector<ViolationPoint> points);

    [[nodiscard]] const std::vector<ViolationPoint>& points() const noexcept { return points_; }
    [[nodiscard]] std::size_t size() const noexcept { return points_.size(); }
    [[nodiscard]] std::vector<double> thetas() const;
    [[nodiscard]] std::vector<double> values() const;
    [[nodiscard]] bool has_uncertainties() const;

  private:
    std::vector<ViolationPoint> points_;
};

ViolationCurve sweep(const DensityMatrix& rho, std::span<const double> thetas);

/// The eight Stokes angles (radians) measured in the published experiment.
std::vector<double> experimental_theta_grid();

struct ViolationMaximum {
    double theta = 0.0;
    double v = 0.0;
};

/// Dense scan of [lo, hi] with `step`, refined by golden-section search to
/// `tolerance` around the best scan point.
ViolationMaximum find_max_violation(const DensityMatrix& rho, double lo, double hi, double step = 1e-4,
                                    double tolerance = 1e-6);

// ---------------------------------------------------------------------------
// Metric axioms

struct MetricAxiomsReport {
    double d_ab = 0.0, d_ba = 0.0, d_ac = 0.0, d_ca = 0.0, d_bc = 0.0, d_cb = 0.0;
    double symmetry_residual = 0.0;        // max |D_xy - D_yx|
    double min_distance = 0.0;             // nonnegativity check
    std::array<double, 3> triangle_residuals{};  // rhs - lhs for D_AB, D_AC, D_BC as the long side
    double max_bound_excess = 0.0;         // max over pairs of D_xy - (H_x + H_y)

    [[nodiscard]] double min_triangle_residual() const;
    [[nodiscard]] bool holds(double tolerance = 1e-9) const;
};

MetricAxiomsReport metric_axioms_check(const JointDistribution& dist);

// ---------------------------------------------------------------------------
// Multipartite area, volume, reactivity

/// H_{A|BC} H_{B|CA} + H_{B|CA} H_{C|AB} + H_{C|AB} H_{A|BC} for a
/// three-party table.
double info_area(const JointDistribution& dist);

/// Sum of the four triple products of {H_{A|BCE}, H_{B|CEA}, H_{C|EAB},
/// H_{E|ABC}} for a four-party table.
double info_volume(const JointDistribution& dist);

struct ReactivityResult {
    double mean_area = 0.0;    // bits^2, averaged over the four faces and all samples
    double mean_volume = 0.0;  // bits^3
    double reactivity = 0.0;   // mean_area / mean_volume; +inf when infinite is set
    bool infinite = false;     // mean_volume == 0
    int n_samples = 0;
    std::uint64_t seed = 0;
};

/// Monte Carlo average over local projective measurements drawn uniformly
/// (rotation invariant) per qubit. Sample i uses CounterStream(seed, i), so
/// results are bit-identical for a fixed seed.
ReactivityResult reactivity(const DensityMatrix& rho, int n_samples, std::uint64_t seed);

/// Uniformly random single-qubit measurement basis (column 0 is a
/// uniformly distributed pure state, column 1 its orthogonal complement).
Eigen::Matrix2cd random_measurement_basis(double u1, double u2);

} // namespace qigeo

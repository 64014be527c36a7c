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

#include "qigeo/infogeo.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

#include <fmt/format.h>

#include "qigeo/error.hpp"

namespace qigeo {

namespace {

constexpr double kZeroProbability = 1e-15;

void require_parties(const JointDistribution& dist, int n, const char* what) {
    if (dist.n_parties() != n) {
        throw DomainError(fmt::format("{}: requires a {}-party distribution, got {}", what, n, dist.n_parties()));
    }
}

void require_two_qubits(const DensityMatrix& rho, const char* what) {
    if (rho.n_qubits() != 2) {
        throw DomainError(fmt::format("{}: requires a 2-qubit state", what));
    }
}

double edge_distance(const DensityMatrix& rho, MeasurementSetting a, MeasurementSetting b) {
    const std::array<MeasurementSetting, 2> settings{a, b};
    return info_distance(joint_probabilities(rho, settings));
}

} // namespace

// ---------------------------------------------------------------------------
// Entropies

double shannon_entropy(std::span<const double> probabilities) {
    // Summing in sorted order makes the result independent of outcome
    // labeling, so party swaps give bit-identical entropies.
    std::vector<double> sorted(probabilities.begin(), probabilities.end());
    std::sort(sorted.begin(), sorted.end());
    double h = 0.0;
    for (double p : sorted) {
        if (p > kZeroProbability) {
            h -= p * std::log2(p);
        }
    }
    return std::max(h, 0.0);
}

double joint_entropy(const JointDistribution& dist) { return shannon_entropy(dist.probabilities()); }

double marginal_entropy(const JointDistribution& dist, std::span<const int> parties) {
    return shannon_entropy(dist.marginal(parties).probabilities());
}

double conditional_entropy(const JointDistribution& dist, std::span<const int> target,
                           std::span<const int> given) {
    if (target.empty()) {
        throw DomainError("conditional_entropy: target set is empty");
    }
    if (given.empty()) {
        return marginal_entropy(dist, target);
    }
    std::vector<int> both(target.begin(), target.end());
    both.insert(both.end(), given.begin(), given.end());
    const JointDistribution joint = dist.marginal(both);  // also rejects overlap
    const JointDistribution cond = dist.marginal(given);

    // Target bits are the high bits of the joint index, given bits the low.
    const std::size_t given_size = cond.size();
    std::vector<double> terms;
    terms.reserve(joint.size());
    for (std::size_t outcome = 0; outcome < joint.size(); ++outcome) {
        const double p_joint = joint[outcome];
        const double p_given = cond[outcome % given_size];
        if (p_joint > kZeroProbability && p_given > 0.0) {
            terms.push_back(-p_joint * std::log2(p_joint / p_given));
        }
    }
    std::sort(terms.begin(), terms.end());
    double h = 0.0;
    for (double t : terms) {
        h += t;
    }
    return std::max(h, 0.0);
}

double conditional_entropy(const JointDistribution& dist, int given) {
    std::vector<int> target;
    for (int p = 0; p < dist.n_parties(); ++p) {
        if (p != given) {
            target.push_back(p);
        }
    }
    if (given < 0 || given >= dist.n_parties()) {
        throw DomainError(fmt::format("conditional_entropy: invalid party index {}", given));
    }
    const std::array<int, 1> g{given};
    return conditional_entropy(dist, target, g);
}

double info_distance(const JointDistribution& dist) {
    require_parties(dist, 2, "info_distance");
    const double h_ab = joint_entropy(dist);
    const std::array<int, 1> a{0};
    const std::array<int, 1> b{1};
    const double h_a = marginal_entropy(dist, a);
    const double h_b = marginal_entropy(dist, b);
    // h_a + h_b is commutative in floating point, so swapping the parties
    // gives a bit-identical D. Exact arithmetic keeps D in [0, H_A + H_B];
    // clamp the round-off.
    const double h_sum = h_a + h_b;
    return std::clamp(2.0 * h_ab - h_sum, 0.0, h_sum);
}

double info_distance(const JointDistribution& dist, int a, int b) {
    const std::array<int, 2> pair{a, b};
    return info_distance(dist.marginal(pair));
}

// ---------------------------------------------------------------------------
// Quadrilateral

QuadrilateralSettings QuadrilateralSettings::rotated(double offset) const {
    return {MeasurementSetting::from_stokes(a1.stokes_angle + offset),
            MeasurementSetting::from_stokes(a2.stokes_angle + offset),
            MeasurementSetting::from_stokes(b1.stokes_angle + offset),
            MeasurementSetting::from_stokes(b2.stokes_angle + offset)};
}

QuadrilateralSettings schumacher_settings(double theta) {
    return {MeasurementSetting::from_stokes(0.0), MeasurementSetting::from_stokes(2.0 * theta),
            MeasurementSetting::from_stokes(theta), MeasurementSetting::from_stokes(3.0 * theta)};
}

QuadrilateralGeometry quadrilateral(const DensityMatrix& rho, const QuadrilateralSettings& s) {
    require_two_qubits(rho, "quadrilateral");
    QuadrilateralGeometry g;
    g.d_a1b1 = edge_distance(rho, s.a1, s.b1);
    g.d_a2b1 = edge_distance(rho, s.a2, s.b1);
    g.d_a2b2 = edge_distance(rho, s.a2, s.b2);
    g.d_a1b2 = edge_distance(rho, s.a1, s.b2);
    return g;
}

QuadrilateralGeometry quadrilateral(const DensityMatrix& rho, double theta) {
    return quadrilateral(rho, schumacher_settings(theta));
}

double violation(const DensityMatrix& rho, double theta) { return quadrilateral(rho, theta).violation(); }

ViolationCurve::ViolationCurve(std::vector<ViolationPoint> points) : points_(std::move(points)) {
    for (std::size_t i = 0; i < points_.size(); ++i) {
        if (!std::isfinite(points_[i].theta)) {
            throw DomainError("violation curve: non-finite theta");
        }
        if (i > 0 && !(points_[i].theta > points_[i - 1].theta)) {
            throw DomainError(fmt::format("violation curve: thetas must be strictly increasing (index {})", i));
        }
    }
}

std::vector<double> ViolationCurve::thetas() const {
    std::vector<double> out;
    out.reserve(points_.size());
    for (const auto& p : points_) {
        out.push_back(p.theta);
    }
    return out;
}

std::vector<double> ViolationCurve::values() const {
    std::vector<double> out;
    out.reserve(points_.size());
    for (const auto& p : points_) {
        out.push_back(p.v);
    }
    return out;
}

bool ViolationCurve::has_uncertainties() const {
    return !points_.empty() && std::all_of(points_.begin(), points_.end(), [](const auto& p) {
        return p.dv.has_value();
    });
}

ViolationCurve sweep(const DensityMatrix& rho, std::span<const double> thetas) {
    for (std::size_t i = 1; i < thetas.size(); ++i) {
        if (!(thetas[i] > thetas[i - 1])) {
            throw DomainError("sweep: thetas must be strictly increasing");
        }
    }
    std::vector<ViolationPoint> points;
    points.reserve(thetas.size());
    for (double theta : thetas) {
        points.push_back({theta, violation(rho, theta), std::nullopt});
    }
    return ViolationCurve(std::move(points));
}

std::vector<double> experimental_theta_grid() {
    return {0.175, 0.227, 0.279, 0.328, 0.393, 0.436, 0.471, 0.503};
}

ViolationMaximum find_max_violation(const DensityMatrix& rho, double lo, double hi, double step,
                                    double tolerance) {
    if (!(hi > lo) || !(step > 0.0) || !(tolerance > 0.0)) {
        throw DomainError("find_max_violation: need lo < hi and positive step/tolerance");
    }
    const auto n_steps = static_cast<long>(std::floor((hi - lo) / step + 1e-9));
    ViolationMaximum best{lo, violation(rho, lo)};
    for (long k = 1; k <= n_steps; ++k) {
        const double theta = lo + static_cast<double>(k) * step;
        const double v = violation(rho, theta);
        if (v > best.v) {
            best = {theta, v};
        }
    }

    double a = std::max(lo, best.theta - step);
    double b = std::min(hi, best.theta + step);
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = b - inv_phi * (b - a);
    double d = a + inv_phi * (b - a);
    double vc = violation(rho, c);
    double vd = violation(rho, d);
    while (b - a > tolerance) {
        if (vc > vd) {
            b = d;
            d = c;
            vd = vc;
            c = b - inv_phi * (b - a);
            vc = violation(rho, c);
        } else {
            a = c;
            c = d;
            vc = vd;
            d = a + inv_phi * (b - a);
            vd = violation(rho, d);
        }
    }
    const double theta = 0.5 * (a + b);
    const double v = violation(rho, theta);
    if (v > best.v) {
        best = {theta, v};
    }
    return best;
}

// ---------------------------------------------------------------------------
// Metric axioms

double MetricAxiomsReport::min_triangle_residual() const {
    return *std::min_element(triangle_residuals.begin(), triangle_residuals.end());
}

bool MetricAxiomsReport::holds(double tolerance) const {
    return symmetry_residual == 0.0 && min_distance >= -tolerance && min_triangle_residual() >= -tolerance &&
           max_bound_excess <= tolerance;
}

MetricAxiomsReport metric_axioms_check(const JointDistribution& dist) {
    require_parties(dist, 3, "metric_axioms_check");
    MetricAxiomsReport r;
    r.d_ab = info_distance(dist, 0, 1);
    r.d_ba = info_distance(dist, 1, 0);
    r.d_ac = info_distance(dist, 0, 2);
    r.d_ca = info_distance(dist, 2, 0);
    r.d_bc = info_distance(dist, 1, 2);
    r.d_cb = info_distance(dist, 2, 1);
    r.symmetry_residual =
        std::max({std::abs(r.d_ab - r.d_ba), std::abs(r.d_ac - r.d_ca), std::abs(r.d_bc - r.d_cb)});
    r.min_distance = std::min({r.d_ab, r.d_ba, r.d_ac, r.d_ca, r.d_bc, r.d_cb});
    r.triangle_residuals = {r.d_ac + r.d_cb - r.d_ab, r.d_ab + r.d_bc - r.d_ac, r.d_ba + r.d_ac - r.d_bc};

    std::array<double, 3> h{};
    for (int p = 0; p < 3; ++p) {
        const std::array<int, 1> one{p};
        h[static_cast<std::size_t>(p)] = marginal_entropy(dist, one);
    }
    r.max_bound_excess = std::max({r.d_ab - (h[0] + h[1]), r.d_ac - (h[0] + h[2]), r.d_bc - (h[1] + h[2]),
                                   h[0] + h[1] - 2.0, h[0] + h[2] - 2.0, h[1] + h[2] - 2.0});
    return r;
}

// ---------------------------------------------------------------------------
// Area and volume

double info_area(const JointDistribution& dist) {
    require_parties(dist, 3, "info_area");
    const std::array<int, 1> a{0}, b{1}, c{2};
    const std::array<int, 2> bc{1, 2}, ca{2, 0}, ab{0, 1};
    const double h_a = conditional_entropy(dist, a, bc);
    const double h_b = conditional_entropy(dist, b, ca);
    const double h_c = conditional_entropy(dist, c, ab);
    return h_a * h_b + h_b * h_c + h_c * h_a;
}

double info_volume(const JointDistribution& dist) {
    require_parties(dist, 4, "info_volume");
    const std::array<int, 1> a{0}, b{1}, c{2}, e{3};
    const std::array<int, 3> bce{1, 2, 3}, cea{2, 3, 0}, eab{3, 0, 1}, abc{0, 1, 2};
    const double h_a = conditional_entropy(dist, a, bce);
    const double h_b = conditional_entropy(dist, b, cea);
    const double h_c = conditional_entropy(dist, c, eab);
    const double h_e = conditional_entropy(dist, e, abc);
    return h_a * h_b * h_c + h_b * h_c * h_e + h_c * h_e * h_a + h_e * h_a * h_b;
}

} // namespace qigeo

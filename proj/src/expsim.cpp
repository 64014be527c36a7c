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

#include "qigeo/expsim.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <boost/random/binomial_distribution.hpp>
#include <boost/random/poisson_distribution.hpp>
#include <fmt/format.h>

#include "qigeo/error.hpp"
#include "qigeo/random.hpp"

namespace qigeo {

namespace {

constexpr double kAngleStep = 1e-5;
constexpr double kRelativeCountStep = 1e-4;

// Streams per simulated run: two per edge (sampling, accidentals).
constexpr std::uint64_t kStreamsPerRun = 8;

int parties_for_size(std::size_t size) {
    int n = 0;
    while ((std::size_t{1} << n) < size) {
        ++n;
    }
    if ((std::size_t{1} << n) != size || n < 1) {
        throw DomainError(fmt::format("coincidence record: {} bins is not a power of two", size));
    }
    return n;
}

struct EdgeAngles {
    MeasurementSetting a;
    MeasurementSetting b;
};

std::array<EdgeAngles, 4> edge_angles(const QuadrilateralSettings& s) {
    return {{{s.a1, s.b1}, {s.a2, s.b1}, {s.a2, s.b2}, {s.a1, s.b2}}};
}

double model_distance(const DensityMatrix& rho, double alpha, double beta) {
    const std::array<MeasurementSetting, 2> settings{MeasurementSetting::from_stokes(alpha),
                                                     MeasurementSetting::from_stokes(beta)};
    return info_distance(joint_probabilities(rho, settings));
}

// Distance obtained from raw (possibly fractional) bin counts through the
// same accidental-subtraction estimator used on data.
double distance_from_counts(std::span<const double> raw, double accidental) {
    std::vector<double> p(raw.size());
    for (std::size_t j = 0; j < raw.size(); ++j) {
        p[j] = std::max(0.0, raw[j] - accidental);
    }
    const double total = std::accumulate(p.begin(), p.end(), 0.0);
    for (double& x : p) {
        x /= total;
    }
    return info_distance(JointDistribution(2, std::move(p)));
}

EdgeUncertainty edge_uncertainty(const DensityMatrix& rho, EdgeAngles edge, std::int64_t n,
                                 const NoiseConfig& noise) {
    const double alpha = edge.a.stokes_angle;
    const double beta = edge.b.stokes_angle;
    EdgeUncertainty u;
    const double dd_dalpha =
        (model_distance(rho, alpha + kAngleStep, beta) - model_distance(rho, alpha - kAngleStep, beta)) /
        (2.0 * kAngleStep);
    const double dd_dbeta =
        (model_distance(rho, alpha, beta + kAngleStep) - model_distance(rho, alpha, beta - kAngleStep)) /
        (2.0 * kAngleStep);
    u.angle_a = std::abs(dd_dalpha) * noise.angle_sigma;
    u.angle_b = std::abs(dd_dbeta) * noise.angle_sigma;

    const std::array<MeasurementSetting, 2> settings{edge.a, edge.b};
    const JointDistribution p = joint_probabilities(rho, settings);
    std::vector<double> expected(p.size());
    for (std::size_t j = 0; j < p.size(); ++j) {
        expected[j] = static_cast<double>(n) * p[j] + noise.accidental_mean;
    }

    double variance = 0.0;
    for (std::size_t j = 0; j < expected.size(); ++j) {
        const double delta_n = std::sqrt(expected[j]);
        if (delta_n == 0.0) {
            continue;
        }
        const double h = kRelativeCountStep * (expected[j] + 1.0);
        std::vector<double> plus = expected;
        std::vector<double> minus = expected;
        plus[j] += h;
        minus[j] = std::max(0.0, minus[j] - h);
        const double derivative = (distance_from_counts(plus, noise.accidental_mean) -
                                   distance_from_counts(minus, noise.accidental_mean)) /
                                  (plus[j] - minus[j]);
        variance += std::pow(derivative * delta_n, 2);
    }
    u.counts = std::sqrt(variance);
    u.total = std::sqrt(u.angle_a * u.angle_a + u.angle_b * u.angle_b + variance);
    return u;
}

} // namespace

void NoiseConfig::validate() const {
    if (!(std::isfinite(accidental_mean) && accidental_mean >= 0.0)) {
        throw DomainError("noise config: accidental_mean must be finite and >= 0");
    }
    if (!(std::isfinite(angle_sigma) && angle_sigma >= 0.0)) {
        throw DomainError("noise config: angle_sigma must be finite and >= 0");
    }
}

void CoincidenceRecord::validate() const {
    parties_for_size(counts.size());
    if (accidental_estimate.size() != counts.size()) {
        throw DomainError("coincidence record: accidental_estimate size mismatch");
    }
    if (!settings.empty() && (std::size_t{1} << settings.size()) != counts.size()) {
        throw DomainError("coincidence record: settings do not match the number of bins");
    }
    std::int64_t sum = 0;
    for (std::size_t j = 0; j < counts.size(); ++j) {
        if (counts[j] < 0) {
            throw DomainError("coincidence record: negative count");
        }
        if (!(accidental_estimate[j] >= 0.0)) {
            throw DomainError("coincidence record: negative accidental estimate");
        }
        sum += counts[j];
    }
    if (sum != total_trials) {
        throw DomainError(fmt::format("coincidence record: counts sum to {} but total_trials is {}", sum,
                                      total_trials));
    }
}

CoincidenceRecord sample_counts(const JointDistribution& dist, std::int64_t n_trials, std::uint64_t seed,
                                std::uint64_t stream) {
    if (n_trials < 1) {
        throw DomainError("sample_counts: n_trials must be >= 1");
    }
    CounterStream rng(seed, stream);
    CoincidenceRecord record;
    record.counts.assign(dist.size(), 0);
    record.accidental_estimate.assign(dist.size(), 0.0);
    record.total_trials = n_trials;

    // Sequential conditional binomials.
    std::int64_t remaining = n_trials;
    double mass_left = 1.0;
    for (std::size_t j = 0; j < dist.size() && remaining > 0; ++j) {
        if (j + 1 == dist.size()) {
            record.counts[j] = remaining;
            break;
        }
        const double p = mass_left > 0.0 ? std::clamp(dist[j] / mass_left, 0.0, 1.0) : 1.0;
        std::int64_t k = 0;
        if (p >= 1.0) {
            k = remaining;
        } else if (p > 0.0) {
            boost::random::binomial_distribution<std::int64_t, double> binomial(remaining, p);
            k = binomial(rng);
        }
        record.counts[j] = k;
        remaining -= k;
        mass_left -= dist[j];
    }
    return record;
}

CoincidenceRecord add_accidentals(CoincidenceRecord record, const NoiseConfig& noise, std::uint64_t stream) {
    noise.validate();
    if (noise.accidental_mean == 0.0) {
        return record;
    }
    CounterStream rng(noise.seed, stream);
    boost::random::poisson_distribution<std::int64_t, double> poisson(noise.accidental_mean);
    for (std::size_t j = 0; j < record.counts.size(); ++j) {
        const std::int64_t extra = poisson(rng);
        record.counts[j] += extra;
        record.total_trials += extra;
        record.accidental_estimate[j] += noise.accidental_mean;
    }
    return record;
}

JointDistribution estimate_distribution(const CoincidenceRecord& record) {
    record.validate();
    const int n_parties = parties_for_size(record.counts.size());
    std::vector<double> p(record.counts.size());
    for (std::size_t j = 0; j < p.size(); ++j) {
        p[j] = std::max(0.0, static_cast<double>(record.counts[j]) - record.accidental_estimate[j]);
    }
    const double total = std::accumulate(p.begin(), p.end(), 0.0);
    if (!(total > 0.0)) {
        throw EstimationError("estimate_distribution: no counts remain after accidental subtraction");
    }
    for (double& x : p) {
        x /= total;
    }
    return {n_parties, std::move(p)};
}

double MeasuredQuadrilateral::violation_uncertainty() const {
    double sum = 0.0;
    for (const auto& e : errors) {
        sum += e.total * e.total;
    }
    return std::sqrt(sum);
}

MeasuredQuadrilateral propagate_error(const DensityMatrix& rho_model, double theta, std::int64_t counts_per_mode,
                                      const NoiseConfig& noise) {
    if (counts_per_mode < 1) {
        throw DomainError("propagate_error: counts_per_mode must be >= 1");
    }
    noise.validate();
    MeasuredQuadrilateral out;
    out.theta = theta;
    out.geometry = quadrilateral(rho_model, theta);
    const auto edges = edge_angles(schumacher_settings(theta));
    std::array<double, 4> sigma{};
    for (std::size_t e = 0; e < edges.size(); ++e) {
        out.errors[e] = edge_uncertainty(rho_model, edges[e], counts_per_mode, noise);
        sigma[e] = out.errors[e].total;
    }
    out.geometry.uncertainties = sigma;
    return out;
}

MeasuredQuadrilateral simulate_schumacher_run(const DensityMatrix& rho, double theta, std::int64_t counts_per_mode,
                                              const NoiseConfig& noise, std::uint64_t run_index) {
    MeasuredQuadrilateral out = propagate_error(rho, theta, counts_per_mode, noise);
    const auto edges = edge_angles(schumacher_settings(theta));
    std::array<double, 4> measured{};
    for (std::size_t e = 0; e < edges.size(); ++e) {
        const std::array<MeasurementSetting, 2> settings{edges[e].a, edges[e].b};
        const JointDistribution truth = joint_probabilities(rho, settings);
        const std::uint64_t stream = run_index * kStreamsPerRun + 2 * e;
        CoincidenceRecord record = sample_counts(truth, counts_per_mode, noise.seed, stream);
        record.settings.assign(settings.begin(), settings.end());
        record = add_accidentals(std::move(record), noise, stream + 1);
        measured[e] = info_distance(estimate_distribution(record));
    }
    out.geometry.d_a1b1 = measured[0];
    out.geometry.d_a2b1 = measured[1];
    out.geometry.d_a2b2 = measured[2];
    out.geometry.d_a1b2 = measured[3];
    return out;
}

ViolationCurve SimulatedSweep::curve() const {
    std::vector<ViolationPoint> points;
    points.reserve(runs.size());
    for (const auto& run : runs) {
        points.push_back({run.theta, run.violation(), run.violation_uncertainty()});
    }
    return ViolationCurve(std::move(points));
}

SimulatedSweep simulate_sweep(const DensityMatrix& rho, std::span<const double> thetas,
                              std::int64_t counts_per_mode, const NoiseConfig& noise) {
    for (std::size_t i = 1; i < thetas.size(); ++i) {
        if (!(thetas[i] > thetas[i - 1])) {
            throw DomainError("simulate_sweep: thetas must be strictly increasing");
        }
    }
    SimulatedSweep sweep;
    sweep.runs.reserve(thetas.size());
    for (std::size_t i = 0; i < thetas.size(); ++i) {
        sweep.runs.push_back(simulate_schumacher_run(rho, thetas[i], counts_per_mode, noise, i));
    }
    return sweep;
}

} // namespace qigeo

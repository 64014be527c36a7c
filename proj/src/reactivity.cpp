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

#include <array>
#include <cmath>
#include <limits>
#include <numbers>

#include "qigeo/error.hpp"
#include "qigeo/infogeo.hpp"
#include "qigeo/random.hpp"

namespace qigeo {

Eigen::Matrix2cd random_measurement_basis(double u1, double u2) {
    // z = cos(polar angle) uniform in [-1, 1] and a uniform azimuth give the
    // rotation-invariant measure on the Bloch sphere.
    const double z = 1.0 - 2.0 * u1;
    const double azimuth = 2.0 * std::numbers::pi * u2;
    const double c = std::sqrt(std::max(0.0, 0.5 * (1.0 + z)));
    const double s = std::sqrt(std::max(0.0, 0.5 * (1.0 - z)));
    const Complex phase = std::polar(1.0, azimuth);
    Eigen::Matrix2cd basis;
    basis(0, 0) = c;
    basis(1, 0) = phase * s;
    basis(0, 1) = -std::conj(phase) * s;
    basis(1, 1) = c;
    return basis;
}

ReactivityResult reactivity(const DensityMatrix& rho, int n_samples, std::uint64_t seed) {
    if (rho.n_qubits() != 4) {
        throw DomainError("reactivity: requires a 4-qubit state");
    }
    if (n_samples < 1) {
        throw DomainError("reactivity: n_samples must be >= 1");
    }

    static constexpr std::array<std::array<int, 3>, 4> kFaces{{{0, 1, 2}, {0, 1, 3}, {0, 2, 3}, {1, 2, 3}}};

    double area_sum = 0.0;
    double volume_sum = 0.0;
    for (int sample = 0; sample < n_samples; ++sample) {
        CounterStream rng(seed, static_cast<std::uint64_t>(sample));
        std::array<Eigen::Matrix2cd, 4> bases;
        for (auto& basis : bases) {
            const double u1 = rng.uniform();
            const double u2 = rng.uniform();
            basis = random_measurement_basis(u1, u2);
        }
        const JointDistribution dist = joint_probabilities_in_bases(rho, bases);

        double face_area = 0.0;
        for (const auto& face : kFaces) {
            face_area += info_area(dist.marginal(face));
        }
        area_sum += face_area / 4.0;
        volume_sum += info_volume(dist);
    }

    ReactivityResult result;
    result.n_samples = n_samples;
    result.seed = seed;
    result.mean_area = area_sum / n_samples;
    result.mean_volume = volume_sum / n_samples;
    if (result.mean_volume > 0.0) {
        result.reactivity = result.mean_area / result.mean_volume;
    } else {
        result.infinite = true;
        result.reactivity = std::numeric_limits<double>::infinity();
    }
    return result;
}

} // namespace qigeo

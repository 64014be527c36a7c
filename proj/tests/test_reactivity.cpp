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

#include <array>
#include <cmath>
#include <vector>

#include "qigeo/error.hpp"
#include "qigeo/infogeo.hpp"
#include "qigeo/random.hpp"
#include "test_support.hpp"

using namespace qigeo;
using Catch::Matchers::WithinAbs;

namespace {

// H(all) - H(all but one), each from a summed marginal.
double cond_given_rest(const std::vector<double>& p, int n, int party) {
    std::vector<double> rest(p.size() / 2, 0.0);
    for (std::size_t idx = 0; idx < p.size(); ++idx) {
        std::size_t sub = 0;
        for (int q = 0; q < n; ++q) {
            if (q != party) {
                sub = (sub << 1) | ((idx >> (n - 1 - q)) & 1u);
            }
        }
        rest[sub] += p[idx];
    }
    auto h = [](const std::vector<double>& v) {
        double s = 0.0;
        for (double x : v) {
            if (x > 1e-15) {
                s -= x * std::log2(x);
            }
        }
        return s;
    };
    return h(p) - h(rest);
}

std::vector<double> face_marginal(const JointDistribution& dist, const std::array<int, 3>& face) {
    std::vector<double> out(8, 0.0);
    for (std::size_t idx = 0; idx < 16; ++idx) {
        std::size_t sub = 0;
        for (int q : face) {
            sub = (sub << 1) | ((idx >> (3 - q)) & 1u);
        }
        out[sub] += dist[idx];
    }
    return out;
}

} // namespace

TEST_CASE("Maximally mixed four-qubit state has reactivity 3/4 for any seed", "[reactivity]") {
    const DensityMatrix mixed = DensityMatrix::maximally_mixed(4);
    for (std::uint64_t seed : {1ULL, 2ULL, 99ULL, 123456789ULL}) {
        const ReactivityResult r = reactivity(mixed, 50, seed);
        CHECK_THAT(r.mean_area, WithinAbs(3.0, 1e-12));
        CHECK_THAT(r.mean_volume, WithinAbs(4.0, 1e-12));
        CHECK_THAT(r.reactivity, WithinAbs(0.75, 1e-12));
        CHECK_FALSE(r.infinite);
        CHECK(r.n_samples == 50);
        CHECK(r.seed == seed);
    }
}

TEST_CASE("Reactivity is bit-stable for a fixed seed", "[reactivity][determinism]") {
    const DensityMatrix rho = modified_werner(0.6, 0.0, 4);
    const ReactivityResult a = reactivity(rho, 200, 7);
    const ReactivityResult b = reactivity(rho, 200, 7);
    CHECK(a.mean_area == b.mean_area);
    CHECK(a.mean_volume == b.mean_volume);
    CHECK(a.reactivity == b.reactivity);
    const ReactivityResult c = reactivity(rho, 200, 8);
    CHECK(c.mean_area != a.mean_area);
}

TEST_CASE("Reactivity averages faces and volumes as defined", "[reactivity][oracle]") {
    const DensityMatrix rho = modified_werner(0.8, 0.3, 4);
    const int n = 40;
    const std::uint64_t seed = 5;
    double area = 0.0;
    double volume = 0.0;
    static constexpr std::array<std::array<int, 3>, 4> faces{{{0, 1, 2}, {0, 1, 3}, {0, 2, 3}, {1, 2, 3}}};
    for (int i = 0; i < n; ++i) {
        CounterStream rng(seed, static_cast<std::uint64_t>(i));
        std::array<Eigen::Matrix2cd, 4> bases;
        for (auto& b : bases) {
            const double u1 = rng.uniform();
            const double u2 = rng.uniform();
            b = random_measurement_basis(u1, u2);
        }
        const JointDistribution dist = joint_probabilities_in_bases(rho, bases);
        std::vector<double> p(dist.probabilities().begin(), dist.probabilities().end());
        double face_sum = 0.0;
        for (const auto& face : faces) {
            const auto m = face_marginal(dist, face);
            const double x = cond_given_rest(m, 3, 0);
            const double y = cond_given_rest(m, 3, 1);
            const double z = cond_given_rest(m, 3, 2);
            face_sum += x * y + y * z + z * x;
        }
        area += face_sum / 4.0;
        const double a = cond_given_rest(p, 4, 0);
        const double b = cond_given_rest(p, 4, 1);
        const double c = cond_given_rest(p, 4, 2);
        const double e = cond_given_rest(p, 4, 3);
        volume += a * b * c + b * c * e + c * e * a + e * a * b;
    }
    const ReactivityResult r = reactivity(rho, n, seed);
    CHECK_THAT(r.mean_area, WithinAbs(area / n, 1e-10));
    CHECK_THAT(r.mean_volume, WithinAbs(volume / n, 1e-10));
}

TEST_CASE("Random measurement bases are unitary and isotropic", "[reactivity][property]") {
    CounterStream rng(11, 0);
    const int n = 20000;
    double mean_z = 0.0;
    double mean_z2 = 0.0;
    double mean_x2 = 0.0;
    for (int i = 0; i < n; ++i) {
        const double u1 = rng.uniform();
        const double u2 = rng.uniform();
        const Eigen::Matrix2cd u = random_measurement_basis(u1, u2);
        REQUIRE((u.adjoint() * u - Eigen::Matrix2cd::Identity()).norm() < 1e-13);
        const Eigen::Vector2cd v = u.col(0);
        const double z = std::norm(v(0)) - std::norm(v(1));
        const double x = 2.0 * (std::conj(v(0)) * v(1)).real();
        mean_z += z;
        mean_z2 += z * z;
        mean_x2 += x * x;
    }
    mean_z /= n;
    mean_z2 /= n;
    mean_x2 /= n;
    // Uniform on the sphere: E[z] = 0 (sd 1/sqrt(3n)), E[z^2] = E[x^2] = 1/3
    // (sd sqrt(4/45/n)).
    CHECK(std::abs(mean_z) < 5.0 / std::sqrt(3.0 * n));
    CHECK(std::abs(mean_z2 - 1.0 / 3.0) < 5.0 * std::sqrt(4.0 / 45.0 / n));
    CHECK(std::abs(mean_x2 - 1.0 / 3.0) < 5.0 * std::sqrt(4.0 / 45.0 / n));
}

TEST_CASE("Reactivity grows with the GHZ weight", "[reactivity]") {
    double previous = 0.0;
    for (double lambda : {0.0, 0.5, 1.0}) {
        const ReactivityResult r = reactivity(modified_werner(lambda, 0.0, 4), 400, 3);
        CHECK(r.reactivity > previous);
        previous = r.reactivity;
    }
}

TEST_CASE("Reactivity input validation", "[reactivity]") {
    CHECK_THROWS_AS(reactivity(qigeo::testing::bell(), 10, 1), DomainError);
    CHECK_THROWS_AS(reactivity(DensityMatrix::maximally_mixed(4), 0, 1), DomainError);
}

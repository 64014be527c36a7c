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

#include <cmath>
#include <numbers>

#include "qigeo/error.hpp"
#include "qigeo/qstate.hpp"
#include "test_support.hpp"

using namespace qigeo;
using qigeo::testing::Gen;
using Catch::Matchers::WithinAbs;

namespace {

constexpr double kPi = std::numbers::pi;

// p_k = Tr(rho (P_a (x) P_b)) with the Kronecker product spelled out.
double two_party_born(const ComplexMatrix& rho, const Eigen::Vector2cd& a, const Eigen::Vector2cd& b) {
    Eigen::Vector4cd v;
    for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) {
            v(2 * i + j) = a(i) * b(j);
        }
    }
    return (v.adjoint() * rho * v)(0, 0).real();
}

ComplexMatrix trace_out_second(const ComplexMatrix& rho) {
    ComplexMatrix out = ComplexMatrix::Zero(2, 2);
    for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) {
            for (int k = 0; k < 2; ++k) {
                out(i, j) += rho(2 * i + k, 2 * j + k);
            }
        }
    }
    return out;
}

} // namespace

TEST_CASE("PureState validates length and norm", "[qstate]") {
    CHECK_THROWS_AS(PureState(ComplexVector::Zero(3)), DomainError);
    CHECK_THROWS_AS(PureState(ComplexVector::Ones(2)), DomainError);
    CHECK_THROWS_AS(PureState(ComplexVector::Zero(32)), DomainError);
    ComplexVector v = ComplexVector::Zero(4);
    v(0) = 1.0;
    CHECK(PureState(v).n_qubits() == 2);
}

TEST_CASE("DensityMatrix rejects non-Hermitian, unnormalized and negative input", "[qstate]") {
    ComplexMatrix m = ComplexMatrix::Identity(2, 2) / 2.0;
    CHECK_NOTHROW(DensityMatrix(m));

    ComplexMatrix skew = m;
    skew(0, 1) = Complex(0.1, 0.0);
    CHECK_THROWS_AS(DensityMatrix(skew), DomainError);

    CHECK_THROWS_AS(DensityMatrix(ComplexMatrix::Identity(2, 2)), DomainError);

    ComplexMatrix negative = ComplexMatrix::Zero(2, 2);
    negative(0, 0) = 1.5;
    negative(1, 1) = -0.5;
    CHECK_THROWS_AS(DensityMatrix(negative), DomainError);

    CHECK_THROWS_AS(DensityMatrix(ComplexMatrix::Identity(3, 3) / 3.0), DomainError);
}

TEST_CASE("MeasurementSetting unit conversions", "[qstate]") {
    const auto s = MeasurementSetting::from_hwp(0.1);
    CHECK_THAT(s.stokes_angle, WithinAbs(0.4, 1e-15));
    CHECK_THAT(s.physical_angle(), WithinAbs(0.2, 1e-15));
    CHECK_THAT(MeasurementSetting::from_physical(0.3).hwp_angle(), WithinAbs(0.15, 1e-15));
}

TEST_CASE("Polarizer states and projectors", "[qstate]") {
    Gen gen(11);
    for (int trial = 0; trial < 50; ++trial) {
        const auto s = gen.setting();
        const Eigen::Matrix2cd u = polarizer_basis(s);
        CHECK((u.adjoint() * u - Eigen::Matrix2cd::Identity()).norm() < 1e-14);
        const Eigen::Matrix2cd p = polarizer_projector(s);
        CHECK((p * p - p).norm() < 1e-14);
        CHECK(std::abs(polarizer_pass_state(s).dot(polarizer_block_state(s))) < 1e-15);
    }
    // Stokes 0 passes vertical (|0>), Stokes pi passes horizontal (|1>).
    CHECK(std::abs(polarizer_pass_state(MeasurementSetting::from_stokes(0.0))(0) - 1.0) < 1e-15);
    CHECK(std::abs(std::abs(polarizer_pass_state(MeasurementSetting::from_stokes(kPi))(1)) - 1.0) < 1e-15);
}

TEST_CASE("Bell state Born rule matches the closed form", "[qstate][oracle]") {
    // For |Phi+> and real polarizers: p(pass, pass) = cos^2((a - b)/2)/2 and
    // p(pass, block) = sin^2((a - b)/2)/2.
    const DensityMatrix rho = qigeo::testing::bell();
    Gen gen(3);
    for (int trial = 0; trial < 200; ++trial) {
        const MeasurementSetting settings[2] = {gen.setting(), gen.setting()};
        const JointDistribution p = joint_probabilities(rho, settings);
        const double half = (settings[0].stokes_angle - settings[1].stokes_angle) / 2.0;
        const double c2 = std::cos(half) * std::cos(half);
        CHECK_THAT(p[0], WithinAbs(c2 / 2.0, 1e-13));
        CHECK_THAT(p[1], WithinAbs((1.0 - c2) / 2.0, 1e-13));
        CHECK_THAT(p[2], WithinAbs((1.0 - c2) / 2.0, 1e-13));
        CHECK_THAT(p[3], WithinAbs(c2 / 2.0, 1e-13));
    }
}

TEST_CASE("Born rule agrees with an explicit Kronecker oracle on random states", "[qstate][property]") {
    Gen gen(5);
    for (int trial = 0; trial < 100; ++trial) {
        const DensityMatrix rho = gen.density_matrix(2, gen.integer(1, 4));
        const MeasurementSetting settings[2] = {gen.setting(), gen.setting()};
        const JointDistribution p = joint_probabilities(rho, settings);
        for (int a = 0; a < 2; ++a) {
            for (int b = 0; b < 2; ++b) {
                const Eigen::Vector2cd va =
                    a == 0 ? polarizer_pass_state(settings[0]) : polarizer_block_state(settings[0]);
                const Eigen::Vector2cd vb =
                    b == 0 ? polarizer_pass_state(settings[1]) : polarizer_block_state(settings[1]);
                CHECK_THAT(p[static_cast<std::size_t>(2 * a + b)],
                           WithinAbs(two_party_born(rho.matrix(), va, vb), 1e-13));
            }
        }
    }
}

TEST_CASE("Outcome statistics ignore a global phase", "[qstate][property]") {
    Gen gen(7);
    for (int trial = 0; trial < 50; ++trial) {
        const PureState psi = gen.pure_state(2);
        const PureState shifted = psi.with_global_phase(gen.uniform(0.0, 2.0 * kPi));
        const MeasurementSetting settings[2] = {gen.setting(), gen.setting()};
        const auto p = joint_probabilities(DensityMatrix::from_pure(psi), settings);
        const auto q = joint_probabilities(DensityMatrix::from_pure(shifted), settings);
        for (std::size_t k = 0; k < 4; ++k) {
            CHECK_THAT(p[k], WithinAbs(q[k], 1e-13));
        }
    }
}

TEST_CASE("Single-party marginal equals the reduced-state Born rule", "[qstate][property]") {
    Gen gen(9);
    for (int trial = 0; trial < 50; ++trial) {
        const DensityMatrix rho = gen.density_matrix(2);
        const MeasurementSetting settings[2] = {gen.setting(), gen.setting()};
        const auto joint = joint_probabilities(rho, settings);
        const int keep_a[] = {0};
        const auto marginal = joint.marginal(keep_a);
        const ComplexMatrix reduced = trace_out_second(rho.matrix());
        const Eigen::Vector2cd pass = polarizer_pass_state(settings[0]);
        CHECK_THAT(marginal[0], WithinAbs((pass.adjoint() * reduced * pass)(0, 0).real(), 1e-13));
    }
}

TEST_CASE("joint_probabilities validates its inputs", "[qstate]") {
    const MeasurementSetting one[1] = {MeasurementSetting::from_stokes(0.0)};
    CHECK_THROWS_AS(joint_probabilities(qigeo::testing::bell(), one), DomainError);
    Eigen::Matrix2cd not_unitary = Eigen::Matrix2cd::Identity();
    not_unitary(0, 1) = 0.5;
    const Eigen::Matrix2cd bases[2] = {not_unitary, Eigen::Matrix2cd::Identity()};
    CHECK_THROWS_AS(joint_probabilities_in_bases(qigeo::testing::bell(), bases), DomainError);
}

TEST_CASE("Partial trace matches a loop oracle", "[qstate][property]") {
    Gen gen(13);
    for (int trial = 0; trial < 30; ++trial) {
        const DensityMatrix rho = gen.density_matrix(2);
        const int keep[] = {0};
        CHECK((partial_trace(rho, keep).matrix() - trace_out_second(rho.matrix())).norm() < 1e-13);
    }
    const int keep[] = {1};
    CHECK((partial_trace(qigeo::testing::bell(), keep).matrix() - ComplexMatrix::Identity(2, 2) / 2.0).norm() <
          1e-15);

    // Tracing a product state returns its factor.
    const DensityMatrix a = gen.density_matrix(1);
    const DensityMatrix b = gen.density_matrix(2);
    const int keep_b[] = {1, 2};
    CHECK((partial_trace(tensor_product(a, b), keep_b).matrix() - b.matrix()).norm() < 1e-13);
}

TEST_CASE("Werner family structure", "[qstate]") {
    const DensityMatrix w1 = modified_werner(1.0, 0.4);
    const PureState psi = ghz_state(2, 0.4);
    CHECK((w1.matrix() - psi.projector()).norm() < 1e-14);
    CHECK((modified_werner(0.0, 1.0).matrix() - ComplexMatrix::Identity(4, 4) / 4.0).norm() < 1e-15);
    CHECK((modified_werner(0.3, 0.0, 4).matrix().diagonal().sum() - Complex(1.0, 0.0)).real() < 1e-14);
    CHECK_THROWS_AS(modified_werner(1.2, 0.0), DomainError);
    CHECK_THROWS_AS(modified_werner(-0.1, 0.0), DomainError);
    CHECK_THROWS_AS(modified_werner(0.5, 0.0, 3), DomainError);
    CHECK((modified_werner(0.0, 0.0, 4).matrix() - ComplexMatrix::Identity(16, 16) / 16.0).norm() < 1e-15);

    const double lambda = 0.7;
    const DensityMatrix w = modified_werner(lambda, 0.0);
    CHECK_THAT(purity(w), WithinAbs(lambda * lambda + (1.0 - lambda * lambda) / 4.0, 1e-14));
    CHECK_THAT(fidelity(w, bell_state(BellKind::PhiPlus)), WithinAbs((3.0 * lambda + 1.0) / 4.0, 1e-12));
}

TEST_CASE("Bell and GHZ states", "[qstate]") {
    const auto phi_minus = bell_state(BellKind::PhiMinus).amplitudes();
    CHECK(std::abs(phi_minus(3) + std::sqrt(0.5)) < 1e-15);
    const auto psi_plus = bell_state(BellKind::PsiPlus).amplitudes();
    CHECK(std::abs(psi_plus(1) - std::sqrt(0.5)) < 1e-15);
    const auto ghz = ghz_state(4, 0.0).amplitudes();
    CHECK(std::abs(ghz(0) - std::sqrt(0.5)) < 1e-15);
    CHECK(std::abs(ghz(15) - std::sqrt(0.5)) < 1e-15);
    CHECK(std::abs(ghz_state(2, 0.0).amplitudes()(3) - bell_state(BellKind::PhiPlus).amplitudes()(3)) < 1e-15);
}

TEST_CASE("Concurrence matches closed forms", "[qstate][oracle]") {
    CHECK_THAT(concurrence(qigeo::testing::bell()), WithinAbs(1.0, 1e-7));
    CHECK_THAT(concurrence(DensityMatrix::maximally_mixed(2)), WithinAbs(0.0, 1e-9));

    // Werner family: max(0, (3 lambda - 1)/2) for any phase.
    Gen gen(17);
    for (int trial = 0; trial < 40; ++trial) {
        const double lambda = gen.uniform();
        const double phase = gen.uniform(0.0, 2.0 * kPi);
        CHECK_THAT(concurrence(modified_werner(lambda, phase)),
                   WithinAbs(std::max(0.0, (3.0 * lambda - 1.0) / 2.0), 1e-6));
    }
    // Pure states: 2 |a d - b c|.
    for (int trial = 0; trial < 40; ++trial) {
        const PureState psi = gen.pure_state(2);
        const auto& v = psi.amplitudes();
        CHECK_THAT(concurrence(DensityMatrix::from_pure(psi)), WithinAbs(2.0 * std::abs(v(0) * v(3) - v(1) * v(2)), 1e-6));
    }
    CHECK_THAT(concurrence(modified_werner(0.998, 0.225)), WithinAbs(0.997, 1e-6));
}

TEST_CASE("Concurrence stays in [0, 1] on random states", "[qstate][property]") {
    Gen gen(19);
    for (int trial = 0; trial < 100; ++trial) {
        const double c = concurrence(gen.density_matrix(2, gen.integer(1, 4)));
        CHECK(c >= 0.0);
        CHECK(c <= 1.0 + 1e-9);
    }
}

TEST_CASE("Entanglement report of the target state", "[qstate]") {
    const auto report = entanglement_report(qigeo::testing::bell(), bell_state(BellKind::PhiPlus));
    CHECK_THAT(report.fidelity, WithinAbs(1.0, 1e-12));
    CHECK_THAT(report.tangle, WithinAbs(1.0, 1e-6));
    CHECK_THAT(report.purity, WithinAbs(1.0, 1e-12));
    CHECK_THAT(report.linear_entropy, WithinAbs(0.0, 1e-12));
    CHECK_THAT(linear_entropy(DensityMatrix::maximally_mixed(2)), WithinAbs(1.0, 1e-12));
}

TEST_CASE("Visibility matches a numerical fringe scan", "[qstate][oracle]") {
    Gen gen(23);
    auto scan = [](const DensityMatrix& rho, double a_stokes) {
        double lo = 1.0;
        double hi = 0.0;
        for (int k = 0; k < 7200; ++k) {
            const MeasurementSetting settings[2] = {MeasurementSetting::from_stokes(a_stokes),
                                                    MeasurementSetting::from_stokes(2.0 * kPi * k / 7200.0)};
            const double p = joint_probabilities(rho, settings)[0];
            lo = std::min(lo, p);
            hi = std::max(hi, p);
        }
        return (hi - lo) / (hi + lo);
    };
    for (int trial = 0; trial < 10; ++trial) {
        const DensityMatrix rho = gen.density_matrix(2);
        CHECK_THAT(visibility(rho, VisibilityBasis::HV), WithinAbs(scan(rho, 0.0), 1e-5));
        CHECK_THAT(visibility(rho, VisibilityBasis::DA), WithinAbs(scan(rho, kPi / 2.0), 1e-5));
    }
    // Werner closed forms.
    const double lambda = 0.998;
    const double phase = 0.225;
    CHECK_THAT(visibility(modified_werner(lambda, phase), VisibilityBasis::DA),
               WithinAbs(lambda * std::cos(phase), 1e-12));
    CHECK_THAT(visibility(modified_werner(lambda, phase), VisibilityBasis::HV),
               WithinAbs(lambda, 1e-12));
    CHECK_THAT(visibility(qigeo::testing::bell(), VisibilityBasis::DA), WithinAbs(1.0, 1e-12));
}

TEST_CASE("Trace distance", "[qstate]") {
    CHECK_THAT(trace_distance(qigeo::testing::bell().matrix(), DensityMatrix::maximally_mixed(2).matrix()),
               WithinAbs(0.75, 1e-12));
    Gen gen(29);
    const DensityMatrix rho = gen.density_matrix(2);
    CHECK_THAT(trace_distance(rho.matrix(), rho.matrix()), WithinAbs(0.0, 1e-14));
}

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

#include "qigeo/qstate.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include <fmt/format.h>

#include "qigeo/error.hpp"

namespace qigeo {

namespace {

constexpr double kNormTolerance = 1e-12;
constexpr double kHermitianTolerance = 1e-10;
constexpr double kTraceTolerance = 1e-10;
constexpr double kPsdTolerance = -1e-9;
constexpr double kUnitaryTolerance = 1e-10;

int qubits_for_dim(Eigen::Index dim, const char* what) {
    for (int n = 1; n <= kMaxQubits; ++n) {
        if (dim == (Eigen::Index{1} << n)) {
            return n;
        }
    }
    throw DomainError(fmt::format("{}: dimension {} is not 2^n with n in [1, {}]", what, dim, kMaxQubits));
}

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
    ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
        }
    }
    return out;
}

Eigen::Matrix4cd spin_flip() {
    Eigen::Matrix2cd sigma_y;
    sigma_y << 0.0, Complex(0.0, -1.0), Complex(0.0, 1.0), 0.0;
    Eigen::Matrix4cd out = kron(sigma_y, sigma_y);
    return out;
}

void require_two_qubits(const DensityMatrix& rho, const char* what) {
    if (rho.n_qubits() != 2) {
        throw DomainError(fmt::format("{}: requires a 2-qubit state, got {} qubits", what, rho.n_qubits()));
    }
}

} // namespace

// ---------------------------------------------------------------------------
// PureState / DensityMatrix

PureState::PureState(ComplexVector amplitudes)
    : amplitudes_(std::move(amplitudes)), n_qubits_(qubits_for_dim(amplitudes_.size(), "pure state")) {
    const double norm2 = amplitudes_.squaredNorm();
    if (!std::isfinite(norm2) || std::abs(norm2 - 1.0) > kNormTolerance) {
        throw DomainError(fmt::format("pure state: squared norm {} is not 1", norm2));
    }
}

ComplexMatrix PureState::projector() const { return amplitudes_ * amplitudes_.adjoint(); }

PureState PureState::with_global_phase(double phase) const {
    return PureState(amplitudes_ * std::polar(1.0, phase));
}

DensityMatrix::DensityMatrix(const ComplexMatrix& matrix) {
    if (matrix.rows() != matrix.cols()) {
        throw DomainError("density matrix: not square");
    }
    n_qubits_ = qubits_for_dim(matrix.rows(), "density matrix");
    if (!matrix.allFinite()) {
        throw DomainError("density matrix: non-finite entries");
    }
    const double asym = (matrix - matrix.adjoint()).cwiseAbs().maxCoeff();
    if (asym > kHermitianTolerance) {
        throw DomainError(fmt::format("density matrix: not Hermitian (max |rho - rho^dagger| = {:.3e})", asym));
    }
    matrix_ = 0.5 * (matrix + matrix.adjoint());
    const double trace = matrix_.trace().real();
    if (std::abs(trace - 1.0) > kTraceTolerance) {
        throw DomainError(fmt::format("density matrix: trace {} is not 1", trace));
    }
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(matrix_, Eigen::EigenvaluesOnly);
    const double min_eigenvalue = solver.eigenvalues().minCoeff();
    if (min_eigenvalue < kPsdTolerance) {
        throw DomainError(fmt::format("density matrix: negative eigenvalue {:.3e}", min_eigenvalue));
    }
}

DensityMatrix DensityMatrix::from_pure(const PureState& state) { return DensityMatrix(state.projector()); }

DensityMatrix DensityMatrix::maximally_mixed(int n_qubits) {
    if (n_qubits < 1 || n_qubits > kMaxQubits) {
        throw DomainError("maximally_mixed: qubit count out of range");
    }
    const Eigen::Index dim = Eigen::Index{1} << n_qubits;
    return DensityMatrix(ComplexMatrix::Identity(dim, dim) / static_cast<double>(dim));
}

// ---------------------------------------------------------------------------
// State constructors

PureState bell_state(BellKind kind) {
    const double r = std::numbers::sqrt2 / 2.0;
    ComplexVector v = ComplexVector::Zero(4);
    switch (kind) {
    case BellKind::PhiPlus:
        v << r, 0.0, 0.0, r;
        break;
    case BellKind::PhiMinus:
        v << r, 0.0, 0.0, -r;
        break;
    case BellKind::PsiPlus:
        v << 0.0, r, r, 0.0;
        break;
    case BellKind::PsiMinus:
        v << 0.0, r, -r, 0.0;
        break;
    }
    return PureState(std::move(v));
}

PureState ghz_state(int n_qubits, double phase) {
    if (n_qubits < 1 || n_qubits > kMaxQubits) {
        throw DomainError("ghz_state: qubit count out of range");
    }
    const Eigen::Index dim = Eigen::Index{1} << n_qubits;
    ComplexVector v = ComplexVector::Zero(dim);
    const double r = std::numbers::sqrt2 / 2.0;
    v(0) = r;
    v(dim - 1) = std::polar(r, phase);
    return PureState(std::move(v));
}

DensityMatrix modified_werner(double lambda, double phase, int n_qubits) {
    if (!(lambda >= 0.0 && lambda <= 1.0)) {
        throw DomainError(fmt::format("modified_werner: lambda {} outside [0, 1]", lambda));
    }
    if (n_qubits != 2 && n_qubits != 4) {
        throw DomainError(fmt::format("modified_werner: n_qubits must be 2 or 4, got {}", n_qubits));
    }
    const Eigen::Index dim = Eigen::Index{1} << n_qubits;
    const ComplexMatrix mixed = ComplexMatrix::Identity(dim, dim) / static_cast<double>(dim);
    return DensityMatrix(lambda * ghz_state(n_qubits, phase).projector() + (1.0 - lambda) * mixed);
}

DensityMatrix tensor_product(const DensityMatrix& a, const DensityMatrix& b) {
    if (a.n_qubits() + b.n_qubits() > kMaxQubits) {
        throw DomainError("tensor_product: result exceeds the supported qubit count");
    }
    return DensityMatrix(kron(a.matrix(), b.matrix()));
}

// ---------------------------------------------------------------------------
// Measurements

Eigen::Vector2cd polarizer_pass_state(MeasurementSetting setting) {
    const double half = setting.stokes_angle / 2.0;
    return {std::cos(half), std::sin(half)};
}

Eigen::Vector2cd polarizer_block_state(MeasurementSetting setting) {
    const double half = setting.stokes_angle / 2.0;
    return {-std::sin(half), std::cos(half)};
}

Eigen::Matrix2cd polarizer_projector(MeasurementSetting setting) {
    const Eigen::Vector2cd pass = polarizer_pass_state(setting);
    return pass * pass.adjoint();
}

Eigen::Matrix2cd polarizer_basis(MeasurementSetting setting) {
    Eigen::Matrix2cd basis;
    basis.col(0) = polarizer_pass_state(setting);
    basis.col(1) = polarizer_block_state(setting);
    return basis;
}

JointDistribution joint_probabilities_in_bases(const DensityMatrix& rho,
                                               std::span<const Eigen::Matrix2cd> bases) {
    const int n = rho.n_qubits();
    if (static_cast<int>(bases.size()) != n) {
        throw DomainError(fmt::format("joint_probabilities: {} measurement bases for {} qubits",
                                      bases.size(), n));
    }
    ComplexMatrix frame = ComplexMatrix::Identity(1, 1);
    for (const Eigen::Matrix2cd& basis : bases) {
        const double err = (basis.adjoint() * basis - Eigen::Matrix2cd::Identity()).cwiseAbs().maxCoeff();
        if (err > kUnitaryTolerance) {
            throw DomainError("joint_probabilities: measurement basis is not orthonormal");
        }
        frame = kron(frame, basis);
    }
    const ComplexMatrix rotated = rho.matrix() * frame;
    std::vector<double> probabilities(static_cast<std::size_t>(frame.cols()));
    for (Eigen::Index k = 0; k < frame.cols(); ++k) {
        probabilities[static_cast<std::size_t>(k)] = frame.col(k).dot(rotated.col(k)).real();
    }
    return {n, std::move(probabilities)};
}

JointDistribution joint_probabilities(const DensityMatrix& rho, std::span<const MeasurementSetting> settings) {
    if (static_cast<int>(settings.size()) != rho.n_qubits()) {
        throw DomainError(fmt::format("joint_probabilities: {} settings for {} qubits", settings.size(),
                                      rho.n_qubits()));
    }
    std::vector<Eigen::Matrix2cd> bases;
    bases.reserve(settings.size());
    for (const MeasurementSetting& s : settings) {
        bases.push_back(polarizer_basis(s));
    }
    return joint_probabilities_in_bases(rho, bases);
}

DensityMatrix partial_trace(const DensityMatrix& rho, std::span<const int> keep) {
    const int n = rho.n_qubits();
    if (keep.empty()) {
        throw DomainError("partial_trace: keep set is empty");
    }
    std::vector<bool> kept(static_cast<std::size_t>(n), false);
    for (int q : keep) {
        if (q < 0 || q >= n || kept[static_cast<std::size_t>(q)]) {
            throw DomainError(fmt::format("partial_trace: invalid or repeated qubit index {}", q));
        }
        kept[static_cast<std::size_t>(q)] = true;
    }
    std::vector<int> kept_qubits;
    std::vector<int> traced_qubits;
    for (int q = 0; q < n; ++q) {
        (kept[static_cast<std::size_t>(q)] ? kept_qubits : traced_qubits).push_back(q);
    }

    // Places the bits of `value` onto the listed qubit positions of a full index.
    auto scatter = [n](std::size_t value, const std::vector<int>& qubits) {
        std::size_t index = 0;
        const int m = static_cast<int>(qubits.size());
        for (int k = 0; k < m; ++k) {
            const std::size_t bit = (value >> (m - 1 - k)) & 1U;
            index |= bit << (n - 1 - qubits[static_cast<std::size_t>(k)]);
        }
        return index;
    };

    const Eigen::Index kept_dim = Eigen::Index{1} << kept_qubits.size();
    const std::size_t traced_dim = std::size_t{1} << traced_qubits.size();
    ComplexMatrix reduced = ComplexMatrix::Zero(kept_dim, kept_dim);
    for (Eigen::Index i = 0; i < kept_dim; ++i) {
        const std::size_t row_base = scatter(static_cast<std::size_t>(i), kept_qubits);
        for (Eigen::Index j = 0; j < kept_dim; ++j) {
            const std::size_t col_base = scatter(static_cast<std::size_t>(j), kept_qubits);
            Complex sum = 0.0;
            for (std::size_t t = 0; t < traced_dim; ++t) {
                const std::size_t offset = scatter(t, traced_qubits);
                sum += rho.matrix()(static_cast<Eigen::Index>(row_base | offset),
                                    static_cast<Eigen::Index>(col_base | offset));
            }
            reduced(i, j) = sum;
        }
    }
    return DensityMatrix(reduced);
}

// ---------------------------------------------------------------------------
// Metrics

double fidelity(const DensityMatrix& rho, const PureState& target) {
    if (target.dim() != rho.dim()) {
        throw DomainError("fidelity: target dimension does not match the state");
    }
    const double f = target.amplitudes().dot(rho.matrix() * target.amplitudes()).real();
    return std::clamp(f, 0.0, 1.0);
}

double purity(const DensityMatrix& rho) {
    // Tr(rho^2) = sum |rho_ij|^2 for Hermitian rho.
    return std::clamp(rho.matrix().squaredNorm(), 0.0, 1.0);
}

double linear_entropy(const DensityMatrix& rho) {
    const auto d = static_cast<double>(rho.dim());
    return std::clamp(d / (d - 1.0) * (1.0 - purity(rho)), 0.0, 1.0);
}

double concurrence(const DensityMatrix& rho) {
    require_two_qubits(rho, "concurrence");
    // The eigenvalues of rho * rho_tilde equal those of the Hermitian
    // sqrt(rho) rho_tilde sqrt(rho), which is better conditioned.
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> rho_solver(rho.matrix());
    const Eigen::VectorXd root = rho_solver.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    const ComplexMatrix sqrt_rho =
        rho_solver.eigenvectors() * root.cast<Complex>().asDiagonal() * rho_solver.eigenvectors().adjoint();
    const Eigen::Matrix4cd flip = spin_flip();
    const ComplexMatrix rho_tilde = flip * rho.matrix().conjugate() * flip;
    ComplexMatrix m = sqrt_rho * rho_tilde * sqrt_rho;
    m = 0.5 * (m + m.adjoint()).eval();
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(m, Eigen::EigenvaluesOnly);
    std::vector<double> lambdas(4);
    for (int k = 0; k < 4; ++k) {
        lambdas[static_cast<std::size_t>(k)] = std::sqrt(std::max(0.0, solver.eigenvalues()(k)));
    }
    std::sort(lambdas.begin(), lambdas.end(), std::greater<>());
    const double c = lambdas[0] - lambdas[1] - lambdas[2] - lambdas[3];
    return std::clamp(c, 0.0, 1.0);
}

EntanglementReport entanglement_report(const DensityMatrix& rho, const PureState& target) {
    require_two_qubits(rho, "entanglement_report");
    EntanglementReport report;
    report.fidelity = fidelity(rho, target);
    report.concurrence = concurrence(rho);
    report.tangle = report.concurrence * report.concurrence;
    report.purity = purity(rho);
    report.linear_entropy = linear_entropy(rho);
    return report;
}

double visibility(const DensityMatrix& rho, VisibilityBasis basis) {
    require_two_qubits(rho, "visibility");
    const double a_angle = basis == VisibilityBasis::HV ? 0.0 : std::numbers::pi / 2.0;
    const Eigen::Matrix2cd pa = polarizer_projector(MeasurementSetting::from_stokes(a_angle));

    // p(beta) = c0 + c1 cos(beta) + c2 sin(beta), because the projector for
    // Stokes angle beta is (I + cos(beta) Z + sin(beta) X)/2.
    Eigen::Matrix2cd z;
    z << 1.0, 0.0, 0.0, -1.0;
    Eigen::Matrix2cd x;
    x << 0.0, 1.0, 1.0, 0.0;
    auto expectation = [&](const Eigen::Matrix2cd& b_op) {
        return 0.5 * (rho.matrix() * kron(pa, b_op)).trace().real();
    };
    const double c0 = expectation(Eigen::Matrix2cd::Identity());
    const double amplitude = std::hypot(expectation(z), expectation(x));
    if (c0 <= 0.0) {
        return 0.0;
    }
    return std::clamp(amplitude / c0, 0.0, 1.0);
}

} // namespace qigeo

namespace qigeo {

double trace_distance(const ComplexMatrix& a, const ComplexMatrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) {
        throw DomainError("trace_distance: shape mismatch");
    }
    const ComplexMatrix diff = a - b;
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(0.5 * (diff + diff.adjoint()), Eigen::EigenvaluesOnly);
    return 0.5 * solver.eigenvalues().cwiseAbs().sum();
}

} // namespace qigeo

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

// Complex-matrix core: states, polarizer projectors, Born-rule outcome
// statistics and two-qubit entanglement metrics.
//
// Basis convention: |0> is vertical polarization, |1> is horizontal. A
// polarizer with Stokes angle a transmits cos(a/2)|0> + sin(a/2)|1>. Qubit 0
// is the most significant factor of every tensor product.

#include <complex>
#include <span>

#include <Eigen/Dense>

#include "qigeo/distribution.hpp"

namespace qigeo {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;

inline constexpr int kMaxQubits = 4;

/// Normalized state vector on 1..4 qubits.
class PureState {
  public:
    /// Throws DomainError unless the length is 2^n (n in [1, 4]) and the
    /// norm is one within 1e-12.
    explicit PureState(ComplexVector amplitudes);

    [[nodiscard]] int n_qubits() const noexcept { return n_qubits_; }
    [[nodiscard]] Eigen::Index dim() const noexcept { return amplitudes_.size(); }
    [[nodiscard]] const ComplexVector& amplitudes() const noexcept { return amplitudes_; }
    [[nodiscard]] ComplexMatrix projector() const;
    [[nodiscard]] PureState with_global_phase(double phase) const;

  private:
    ComplexVector amplitudes_;
    int n_qubits_;
};

/// Hermitian, unit-trace, positive-semidefinite matrix on 1..4 qubits.
class DensityMatrix {
  public:
    /// Validates Hermiticity (1e-10), trace (1e-10) and the minimum
    /// eigenvalue (>= -1e-9). The stored matrix is the Hermitian part of
    /// the input.
    explicit DensityMatrix(const ComplexMatrix& matrix);

    static DensityMatrix from_pure(const PureState& state);
    static DensityMatrix maximally_mixed(int n_qubits);

    [[nodiscard]] int n_qubits() const noexcept { return n_qubits_; }
    [[nodiscard]] Eigen::Index dim() const noexcept { return matrix_.rows(); }
    [[nodiscard]] const ComplexMatrix& matrix() const noexcept { return matrix_; }

  private:
    ComplexMatrix matrix_;
    int n_qubits_;
};

/// One party's linear-polarizer orientation, stored as a Stokes angle.
/// Physical rotation is half of it and the half-wave-plate setting a quarter.
struct MeasurementSetting {
    double stokes_angle = 0.0;

    static constexpr MeasurementSetting from_stokes(double angle) { return {angle}; }
    static constexpr MeasurementSetting from_physical(double angle) { return {2.0 * angle}; }
    static constexpr MeasurementSetting from_hwp(double angle) { return {4.0 * angle}; }

    [[nodiscard]] constexpr double physical_angle() const { return stokes_angle / 2.0; }
    [[nodiscard]] constexpr double hwp_angle() const { return stokes_angle / 4.0; }
};

enum class BellKind { PhiPlus, PhiMinus, PsiPlus, PsiMinus };

struct EntanglementReport {
    double fidelity = 0.0;
    double tangle = 0.0;
    double concurrence = 0.0;
    double linear_entropy = 0.0;  // normalized, d/(d-1) (1 - Tr rho^2)
    double purity = 0.0;
};

enum class VisibilityBasis { HV, DA };

PureState bell_state(BellKind kind);

/// (|0...0> + e^{i phase}|1...1>)/sqrt(2) on n qubits.
PureState ghz_state(int n_qubits, double phase = 0.0);

/// lambda |psi><psi| + (1 - lambda)/2^n I with psi = ghz_state(n, phase).
/// n must be 2 or 4; lambda outside [0, 1] throws DomainError.
DensityMatrix modified_werner(double lambda, double phase, int n_qubits = 2);

DensityMatrix tensor_product(const DensityMatrix& a, const DensityMatrix& b);

Eigen::Vector2cd polarizer_pass_state(MeasurementSetting setting);
Eigen::Vector2cd polarizer_block_state(MeasurementSetting setting);
Eigen::Matrix2cd polarizer_projector(MeasurementSetting setting);

/// Unitary whose column 0 is the pass state and column 1 the block state.
Eigen::Matrix2cd polarizer_basis(MeasurementSetting setting);

/// Born-rule outcome table for one polarizer per qubit.
/// Throws DomainError if settings.size() != rho.n_qubits().
JointDistribution joint_probabilities(const DensityMatrix& rho,
                                      std::span<const MeasurementSetting> settings);

/// Outcome table for arbitrary local projective measurements. Column k of
/// bases[q] is the state selected by outcome bit k on qubit q; each basis
/// must be unitary.
JointDistribution joint_probabilities_in_bases(const DensityMatrix& rho,
                                               std::span<const Eigen::Matrix2cd> bases);

/// Reduced state on the listed qubits (kept in ascending order).
DensityMatrix partial_trace(const DensityMatrix& rho, std::span<const int> keep);

double fidelity(const DensityMatrix& rho, const PureState& target);
double purity(const DensityMatrix& rho);
double linear_entropy(const DensityMatrix& rho);

/// Wootters concurrence of a two-qubit state.
double concurrence(const DensityMatrix& rho);

EntanglementReport entanglement_report(const DensityMatrix& rho, const PureState& target);

/// (max - min)/(max + min) of p(pass, pass) as party B's polarizer turns a
/// full Stokes circle with party A fixed at Stokes 0 (HV) or pi/2 (DA).
double visibility(const DensityMatrix& rho, VisibilityBasis basis);

} // namespace qigeo

namespace qigeo {

/// Half the trace norm of (a - b) for Hermitian a, b.
double trace_distance(const ComplexMatrix& a, const ComplexMatrix& b);

} // namespace qigeo

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

// Two-qubit polarization tomography over the 16 coincidence modes
// HH, HV, VV, VH, RH, RV, DV, DH, DR, DD, RD, HD, VD, VL, HL, RL, with
// linear inversion and maximum-likelihood reconstruction, plus CHSH.
//
// Single-photon states (|0> = V, |1> = H):
//   D = (H + V)/sqrt(2),  R = (H - iV)/sqrt(2),  L = (H + iV)/sqrt(2).

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "qigeo/qstate.hpp"

namespace qigeo {

inline constexpr std::size_t kTomoModeCount = 16;

struct TomoMode {
    std::string label;                            // e.g. "RH": party A in R, party B in H
    std::array<Eigen::Vector2cd, 2> party_states;
    std::array<Eigen::Matrix2cd, 2> party_projectors;
    Eigen::Matrix4cd projector;                   // party_projectors[0] (x) party_projectors[1]
};

/// The 16 modes in measurement order.
const std::vector<TomoMode>& tomo_modes();

/// Single-photon polarization state for 'H', 'V', 'D', 'R' or 'L'.
Eigen::Vector2cd polarization_state(char symbol);

/// Coincidence counts for the 16 modes, stored in measurement order.
class TomoDataset {
  public:
    /// Accepts the modes in any order; throws DomainError unless each of the
    /// 16 labels appears exactly once with a nonnegative count.
    explicit TomoDataset(const std::vector<std::pair<std::string, std::int64_t>>& labeled_counts);

    /// Counts already in measurement order.
    static TomoDataset from_ordered(const std::array<std::int64_t, kTomoModeCount>& counts);

    [[nodiscard]] const std::array<std::int64_t, kTomoModeCount>& counts() const noexcept { return counts_; }
    [[nodiscard]] std::int64_t count(const std::string& label) const;
    [[nodiscard]] std::int64_t total() const;

  private:
    TomoDataset() = default;
    std::array<std::int64_t, kTomoModeCount> counts_{};
};

struct MleOptions {
    int max_iterations = 5000;
    double tolerance = 1e-9;  // on |delta log-likelihood| per iteration
};

struct MleDiagnostics {
    bool converged = false;
    int iterations = 0;
    int function_evaluations = 0;
    double last_delta = 0.0;     // |delta log-likelihood| of the final iteration
    double gradient_norm = 0.0;  // of the per-count objective at the result
};

struct TomographyResult {
    DensityMatrix rho_mle;
    ComplexMatrix rho_linear;  // may be unphysical
    EntanglementReport report; // rho_mle against |Phi+>
    double log_likelihood = 0.0;
    MleDiagnostics diagnostics;
};

/// Trace-normalized Hermitian solution of the linear mode equations.
/// Throws DomainError on an empty dataset.
ComplexMatrix linear_inversion(const TomoDataset& data);

/// Clips negative eigenvalues to zero and renormalizes the trace.
DensityMatrix project_to_physical(const ComplexMatrix& matrix);

/// Poisson log-likelihood sum_v n_v log(mu_v) - mu_v with mu_v = N p_v and
/// the flux N at its maximum-likelihood value; the log(n_v!) terms are
/// omitted. Returns -inf if a mode with counts has zero probability.
double log_likelihood(const ComplexMatrix& rho, const TomoDataset& data);

/// Maximum-likelihood state with rho = T^dagger T / Tr(T^dagger T), T lower
/// triangular, optimized by BFGS from the projected linear inversion. When
/// the iteration limit is hit, diagnostics.converged is false and the last
/// iterate (still a valid state) is returned.
TomographyResult mle_reconstruct(const TomoDataset& data, const MleOptions& options = {});

/// Counts round(scale * p_v), the noiseless forward model.
TomoDataset expected_tomo_counts(const DensityMatrix& rho, double scale);

/// Independent Poisson(scale * p_v) counts.
TomoDataset sample_tomo_counts(const DensityMatrix& rho, double scale, std::uint64_t seed);

// ---------------------------------------------------------------------------
// CHSH

/// E(a, b) = p(agree) - p(disagree) for pass/block outcomes.
double correlation(const DensityMatrix& rho, MeasurementSetting a, MeasurementSetting b);

/// E(a1,b1) + E(a1,b2) + E(a2,b1) + E(a2,b2) with one term negated. Of the
/// four placements of the minus sign, the one with the largest |S| is
/// returned (the a1-b2 placement wins ties).
double chsh(const DensityMatrix& rho, MeasurementSetting a1, MeasurementSetting a2, MeasurementSetting b1,
            MeasurementSetting b2);

struct ChshSettings {
    MeasurementSetting a1, a2, b1, b2;
};

/// Stokes (a1, a2, b1, b2) = (0, pi/2, pi/4, 3pi/4), which reach 2 sqrt(2)
/// on |Phi+>.
ChshSettings optimal_chsh_settings();

struct ChshSearchResult {
    double s = 0.0;
    ChshSettings settings;
};

/// Best |S| with all four settings drawn from `candidates`.
ChshSearchResult chsh_search(const DensityMatrix& rho, std::span<const MeasurementSetting> candidates);

/// The eight analyzer angles 0, pi/8, ..., 7pi/8 listed for the published
/// CHSH measurement, as bare numbers (the unit is up to the caller).
std::vector<double> chsh_candidate_angles();

} // namespace qigeo

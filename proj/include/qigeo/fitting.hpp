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

// Least-squares fit of the modified Werner family
//   rho(lambda, phase) = lambda |psi><psi| + (1 - lambda)/4 I,
//   |psi> = (|00> + e^{i phase}|11>)/sqrt(2)
// to a triangle-violation curve.

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include "qigeo/infogeo.hpp"

namespace qigeo {

struct FitOptions {
    bool weighted = false;     // weight residuals by 1/dv^2 (requires dv on every point)
    double lambda_step = 0.002;
    double phase_step = 0.01;
    double tolerance = 1e-12;  // parameter change that ends refinement
    int max_cycles = 10000;
};

struct WernerFit {
    double lambda = 0.0;
    double phase = 0.0;         // reported in [0, pi]; the model depends on cos(phase) only
    double residual_sum = 0.0;  // sum of (weighted) squared residuals
    std::vector<double> residuals;  // sqrt(weight) * (model - observed), per point
    double grid_objective = 0.0;    // best objective on the coarse grid
    int refinement_cycles = 0;
};

/// Violation of the modified Werner state on a fixed theta grid, evaluated
/// in closed form. For these states every outcome pair has p(pass, pass) =
/// p(block, block) and uniform marginals, so each edge distance is
/// 2 h2(p_agree) with
///   p_agree = lambda (c_a^2 c_b^2 + s_a^2 s_b^2 + 2 cos(phase) c_a c_b s_a s_b) + (1 - lambda)/2,
/// c = cos(stokes/2), s = sin(stokes/2).
class WernerViolationModel {
  public:
    explicit WernerViolationModel(std::span<const double> thetas);

    [[nodiscard]] std::vector<double> evaluate(double lambda, double phase) const;
    [[nodiscard]] double evaluate_at(std::size_t point, double lambda, double cos_phase) const;
    [[nodiscard]] std::size_t size() const noexcept { return edges_.size(); }

  private:
    struct Edge {
        double aligned;  // c_a^2 c_b^2 + s_a^2 s_b^2
        double cross;    // 2 c_a c_b s_a s_b
    };
    std::vector<std::array<Edge, 4>> edges_;  // per theta: a1b1, a2b1, a2b2, a1b2
};

/// Grid search over lambda in [0, 1] and phase in [0, 2 pi), then
/// coordinate descent with golden-section line searches plus a line search
/// along each cycle's net displacement. Throws DomainError for fewer than
/// two points or when weighting is requested without uncertainties.
WernerFit fit_werner(const ViolationCurve& observed, const FitOptions& options = {});

} // namespace qigeo

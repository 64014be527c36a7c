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

#include "qigeo/tomography.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>

#include <boost/random/poisson_distribution.hpp>
#include <fmt/format.h>

#include "qigeo/error.hpp"
#include "qigeo/random.hpp"

namespace qigeo {

namespace {

constexpr std::array<const char*, kTomoModeCount> kModeLabels{
    "HH", "HV", "VV", "VH", "RH", "RV", "DV", "DH", "DR", "DD", "RD", "HD", "VD", "VL", "HL", "RL"};

// Number of real parameters of a 4x4 lower-triangular T with real diagonal.
constexpr int kParams = 16;
constexpr double kInitialMixing = 1e-4;

using ParamVector = Eigen::Matrix<double, kParams, 1>;
using ParamMatrix = Eigen::Matrix<double, kParams, kParams>;

Eigen::Matrix2cd pauli(int k) {
    Eigen::Matrix2cd m;
    switch (k) {
    case 0:
        m << 1.0, 0.0, 0.0, 1.0;
        break;
    case 1:
        m << 0.0, 1.0, 1.0, 0.0;
        break;
    case 2:
        m << 0.0, Complex(0.0, -1.0), Complex(0.0, 1.0), 0.0;
        break;
    default:
        m << 1.0, 0.0, 0.0, -1.0;
        break;
    }
    return m;
}

Eigen::Matrix4cd kron2(const Eigen::Matrix2cd& a, const Eigen::Matrix2cd& b) {
    Eigen::Matrix4cd out;
    for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) {
            out.block<2, 2>(2 * i, 2 * j) = a(i, j) * b;
        }
    }
    return out;
}

double mode_probability(const Eigen::Matrix4cd& projector, const ComplexMatrix& rho) {
    return (projector * rho).trace().real();
}

// Lower-triangular T from the parameter vector: diagonal first, then the six
// strictly-lower entries as (re, im) pairs in row-major order.
Eigen::Matrix4cd t_from_params(const ParamVector& t) {
    Eigen::Matrix4cd m = Eigen::Matrix4cd::Zero();
    for (int i = 0; i < 4; ++i) {
        m(i, i) = t(i);
    }
    int k = 4;
    for (int i = 1; i < 4; ++i) {
        for (int j = 0; j < i; ++j) {
            m(i, j) = Complex(t(k), t(k + 1));
            k += 2;
        }
    }
    return m;
}

ParamVector params_from_t(const Eigen::Matrix4cd& m) {
    ParamVector t;
    for (int i = 0; i < 4; ++i) {
        t(i) = m(i, i).real();
    }
    int k = 4;
    for (int i = 1; i < 4; ++i) {
        for (int j = 0; j < i; ++j) {
            t(k) = m(i, j).real();
            t(k + 1) = m(i, j).imag();
            k += 2;
        }
    }
    return t;
}

Eigen::Matrix4cd state_from_t(const Eigen::Matrix4cd& t) {
    const Eigen::Matrix4cd a = t.adjoint() * t;
    return a / a.trace().real();
}

// Per-count negative profile log-likelihood,
//   F(T) = -(sum_v n_v log Tr(M_v A) - S log Tr(M_tot A)) / S,  A = T^dagger T,
// which is invariant under rescaling T.
class MleObjective {
  public:
    explicit MleObjective(const TomoDataset& data) : total_(static_cast<double>(data.total())) {
        const auto& modes = tomo_modes();
        total_projector_.setZero();
        for (std::size_t v = 0; v < kTomoModeCount; ++v) {
            counts_[v] = static_cast<double>(data.counts()[v]);
            total_projector_ += modes[v].projector;
        }
    }

    double value(const ParamVector& t) {
        ++evaluations_;
        const Eigen::Matrix4cd a = gram(t);
        double f = 0.0;
        const auto& modes = tomo_modes();
        for (std::size_t v = 0; v < kTomoModeCount; ++v) {
            if (counts_[v] == 0.0) {
                continue;
            }
            const double q = (modes[v].projector * a).trace().real();
            if (!(q > 0.0)) {
                return std::numeric_limits<double>::infinity();
            }
            f += counts_[v] * std::log(q);
        }
        const double q_total = (total_projector_ * a).trace().real();
        if (!(q_total > 0.0)) {
            return std::numeric_limits<double>::infinity();
        }
        f -= total_ * std::log(q_total);
        return -f / total_;
    }

    ParamVector gradient(const ParamVector& t) const {
        const Eigen::Matrix4cd tm = t_from_params(t);
        const Eigen::Matrix4cd a = tm.adjoint() * tm;
        const auto& modes = tomo_modes();
        Eigen::Matrix4cd g = Eigen::Matrix4cd::Zero();
        for (std::size_t v = 0; v < kTomoModeCount; ++v) {
            if (counts_[v] == 0.0) {
                continue;
            }
            const double q = (modes[v].projector * a).trace().real();
            g += (counts_[v] / q) * modes[v].projector;
        }
        g -= (total_ / (total_projector_ * a).trace().real()) * total_projector_;

        // dF = Tr(G dA) = 2 Re Tr(G T^dagger dT); with K = G T^dagger the
        // partials are 2 Re K_lk and -2 Im K_lk for T_kl.
        const Eigen::Matrix4cd k = g * tm.adjoint();
        ParamVector grad;
        for (int i = 0; i < 4; ++i) {
            grad(i) = 2.0 * k(i, i).real();
        }
        int idx = 4;
        for (int i = 1; i < 4; ++i) {
            for (int j = 0; j < i; ++j) {
                grad(idx) = 2.0 * k(j, i).real();
                grad(idx + 1) = -2.0 * k(j, i).imag();
                idx += 2;
            }
        }
        return -grad / total_;
    }

    [[nodiscard]] double total() const { return total_; }
    [[nodiscard]] int evaluations() const { return evaluations_; }

  private:
    static Eigen::Matrix4cd gram(const ParamVector& t) {
        const Eigen::Matrix4cd tm = t_from_params(t);
        return tm.adjoint() * tm;
    }

    std::array<double, kTomoModeCount> counts_{};
    Eigen::Matrix4cd total_projector_;
    double total_;
    int evaluations_ = 0;
};

// T with T^dagger T = rho for a positive-definite rho: Cholesky of the
// index-reversed matrix, reversed back.
Eigen::Matrix4cd lower_factor(const Eigen::Matrix4cd& rho) {
    Eigen::Matrix4cd reversal = Eigen::Matrix4cd::Zero();
    for (int i = 0; i < 4; ++i) {
        reversal(i, 3 - i) = 1.0;
    }
    const Eigen::Matrix4cd flipped = reversal * rho * reversal;
    Eigen::LLT<Eigen::Matrix4cd> llt(flipped);
    if (llt.info() != Eigen::Success) {
        throw NumericalError("mle_reconstruct: initial state is not positive definite");
    }
    const Eigen::Matrix4cd l = llt.matrixL();
    return reversal * l.adjoint() * reversal;
}

} // namespace

// ---------------------------------------------------------------------------
// Modes and datasets

Eigen::Vector2cd polarization_state(char symbol) {
    const double r = std::numbers::sqrt2 / 2.0;
    const Complex i(0.0, 1.0);
    switch (symbol) {
    case 'V':
        return {1.0, 0.0};
    case 'H':
        return {0.0, 1.0};
    case 'D':
        return {r, r};
    case 'R':
        return {-i * r, r};
    case 'L':
        return {i * r, r};
    default:
        throw DomainError(fmt::format("unknown polarization symbol '{}'", symbol));
    }
}

const std::vector<TomoMode>& tomo_modes() {
    static const std::vector<TomoMode> modes = [] {
        std::vector<TomoMode> out;
        out.reserve(kTomoModeCount);
        for (const char* label : kModeLabels) {
            TomoMode m;
            m.label = label;
            for (std::size_t p = 0; p < 2; ++p) {
                m.party_states[p] = polarization_state(label[p]);
                m.party_projectors[p] = m.party_states[p] * m.party_states[p].adjoint();
            }
            m.projector = kron2(m.party_projectors[0], m.party_projectors[1]);
            out.push_back(std::move(m));
        }
        return out;
    }();
    return modes;
}

TomoDataset::TomoDataset(const std::vector<std::pair<std::string, std::int64_t>>& labeled_counts) {
    std::map<std::string, std::int64_t> seen;
    for (const auto& [label, count] : labeled_counts) {
        if (std::find(kModeLabels.begin(), kModeLabels.end(), label) == kModeLabels.end()) {
            throw DomainError(fmt::format("tomography data: unknown mode label '{}'", label));
        }
        if (!seen.emplace(label, count).second) {
            throw DomainError(fmt::format("tomography data: duplicate mode label '{}'", label));
        }
        if (count < 0) {
            throw DomainError(fmt::format("tomography data: negative count for '{}'", label));
        }
    }
    if (seen.size() != kTomoModeCount) {
        throw DomainError(fmt::format("tomography data: expected {} modes, got {}", kTomoModeCount, seen.size()));
    }
    for (std::size_t v = 0; v < kTomoModeCount; ++v) {
        counts_[v] = seen.at(kModeLabels[v]);
    }
}

TomoDataset TomoDataset::from_ordered(const std::array<std::int64_t, kTomoModeCount>& counts) {
    TomoDataset d;
    for (std::int64_t c : counts) {
        if (c < 0) {
            throw DomainError("tomography data: negative count");
        }
    }
    d.counts_ = counts;
    return d;
}

std::int64_t TomoDataset::count(const std::string& label) const {
    const auto it = std::find(kModeLabels.begin(), kModeLabels.end(), label);
    if (it == kModeLabels.end()) {
        throw DomainError(fmt::format("tomography data: unknown mode label '{}'", label));
    }
    return counts_[static_cast<std::size_t>(it - kModeLabels.begin())];
}

std::int64_t TomoDataset::total() const {
    std::int64_t sum = 0;
    for (std::int64_t c : counts_) {
        sum += c;
    }
    return sum;
}

TomoDataset expected_tomo_counts(const DensityMatrix& rho, double scale) {
    if (rho.n_qubits() != 2 || !(scale > 0.0)) {
        throw DomainError("expected_tomo_counts: need a 2-qubit state and positive scale");
    }
    std::array<std::int64_t, kTomoModeCount> counts{};
    const auto& modes = tomo_modes();
    for (std::size_t v = 0; v < kTomoModeCount; ++v) {
        counts[v] = std::llround(scale * std::max(0.0, mode_probability(modes[v].projector, rho.matrix())));
    }
    return TomoDataset::from_ordered(counts);
}

TomoDataset sample_tomo_counts(const DensityMatrix& rho, double scale, std::uint64_t seed) {
    if (rho.n_qubits() != 2 || !(scale > 0.0)) {
        throw DomainError("sample_tomo_counts: need a 2-qubit state and positive scale");
    }
    std::array<std::int64_t, kTomoModeCount> counts{};
    const auto& modes = tomo_modes();
    for (std::size_t v = 0; v < kTomoModeCount; ++v) {
        const double mean = scale * std::max(0.0, mode_probability(modes[v].projector, rho.matrix()));
        if (mean > 0.0) {
            CounterStream rng(seed, v);
            boost::random::poisson_distribution<std::int64_t, double> poisson(mean);
            counts[v] = poisson(rng);
        }
    }
    return TomoDataset::from_ordered(counts);
}

// ---------------------------------------------------------------------------
// Reconstruction

ComplexMatrix linear_inversion(const TomoDataset& data) {
    if (data.total() <= 0) {
        throw DomainError("linear_inversion: dataset has no counts");
    }
    const auto& modes = tomo_modes();
    std::array<Eigen::Matrix4cd, 16> basis;
    for (int i = 0; i < 4; ++i) {
        for (int j = 0; j < 4; ++j) {
            basis[static_cast<std::size_t>(4 * i + j)] = kron2(pauli(i), pauli(j));
        }
    }
    Eigen::Matrix<double, 16, 16> design;
    Eigen::Matrix<double, 16, 1> rhs;
    for (std::size_t v = 0; v < kTomoModeCount; ++v) {
        for (std::size_t mu = 0; mu < basis.size(); ++mu) {
            design(static_cast<Eigen::Index>(v), static_cast<Eigen::Index>(mu)) =
                (modes[v].projector * basis[mu]).trace().real();
        }
        rhs(static_cast<Eigen::Index>(v)) = static_cast<double>(data.counts()[v]);
    }
    Eigen::FullPivLU<Eigen::Matrix<double, 16, 16>> lu(design);
    if (!lu.isInvertible()) {
        throw NumericalError("linear_inversion: singular measurement design");
    }
    const Eigen::Matrix<double, 16, 1> coeffs = lu.solve(rhs);
    ComplexMatrix rho = ComplexMatrix::Zero(4, 4);
    for (std::size_t mu = 0; mu < basis.size(); ++mu) {
        rho += coeffs(static_cast<Eigen::Index>(mu)) * basis[mu];
    }
    const double trace = rho.trace().real();
    if (!(std::abs(trace) > 0.0)) {
        throw NumericalError("linear_inversion: reconstructed matrix has zero trace");
    }
    rho /= trace;
    return 0.5 * (rho + rho.adjoint());
}

DensityMatrix project_to_physical(const ComplexMatrix& matrix) {
    const ComplexMatrix herm = 0.5 * (matrix + matrix.adjoint());
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(herm);
    const Eigen::VectorXd clipped = solver.eigenvalues().cwiseMax(0.0);
    const double sum = clipped.sum();
    if (!(sum > 0.0)) {
        throw NumericalError("project_to_physical: no positive eigenvalues");
    }
    const ComplexMatrix out =
        solver.eigenvectors() * (clipped / sum).cast<Complex>().asDiagonal() * solver.eigenvectors().adjoint();
    return DensityMatrix(out);
}

double log_likelihood(const ComplexMatrix& rho, const TomoDataset& data) {
    const auto& modes = tomo_modes();
    std::array<double, kTomoModeCount> p{};
    double p_sum = 0.0;
    for (std::size_t v = 0; v < kTomoModeCount; ++v) {
        p[v] = mode_probability(modes[v].projector, rho);
        p_sum += p[v];
    }
    const auto total = static_cast<double>(data.total());
    if (!(p_sum > 0.0)) {
        return -std::numeric_limits<double>::infinity();
    }
    const double flux = total / p_sum;
    double ll = -flux * p_sum;
    for (std::size_t v = 0; v < kTomoModeCount; ++v) {
        const auto n = static_cast<double>(data.counts()[v]);
        if (n == 0.0) {
            continue;
        }
        if (!(p[v] > 0.0)) {
            return -std::numeric_limits<double>::infinity();
        }
        ll += n * std::log(flux * p[v]);
    }
    return ll;
}

TomographyResult mle_reconstruct(const TomoDataset& data, const MleOptions& options) {
    const ComplexMatrix rho_linear = linear_inversion(data);
    const DensityMatrix projected = project_to_physical(rho_linear);
    const Eigen::Matrix4cd start =
        (1.0 - kInitialMixing) * projected.matrix() + kInitialMixing * Eigen::Matrix4cd::Identity() / 4.0;

    MleObjective objective(data);
    ParamVector x = params_from_t(lower_factor(start));
    double fx = objective.value(x);
    ParamVector g = objective.gradient(x);
    ParamMatrix h_inv = ParamMatrix::Identity();

    MleDiagnostics diag;
    constexpr double kArmijo = 1e-4;
    bool fresh_hessian = true;
    for (diag.iterations = 0; diag.iterations < options.max_iterations;) {
        ParamVector direction = -h_inv * g;
        if (direction.dot(g) >= 0.0) {
            h_inv.setIdentity();
            direction = -g;
            fresh_hessian = true;
        }
        double step = 1.0;
        ParamVector x_new;
        double f_new = fx;
        bool accepted = false;
        for (int k = 0; k < 60; ++k) {
            x_new = x + step * direction;
            f_new = objective.value(x_new);
            if (f_new <= fx + kArmijo * step * direction.dot(g)) {
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        ++diag.iterations;
        if (!accepted) {
            if (!fresh_hessian) {
                h_inv.setIdentity();
                fresh_hessian = true;
                continue;
            }
            // No descent possible even along -g: stationary to working precision.
            diag.last_delta = 0.0;
            diag.converged = true;
            break;
        }

        const ParamVector g_new = objective.gradient(x_new);
        const ParamVector s = x_new - x;
        const ParamVector y = g_new - g;
        const double sy = s.dot(y);
        if (sy > 1e-300) {
            if (fresh_hessian) {
                h_inv *= sy / y.squaredNorm();
            }
            const double rho_k = 1.0 / sy;
            const ParamMatrix eye = ParamMatrix::Identity();
            h_inv = (eye - rho_k * s * y.transpose()) * h_inv * (eye - rho_k * y * s.transpose()) +
                    rho_k * s * s.transpose();
            fresh_hessian = false;
        }
        diag.last_delta = std::abs(fx - f_new) * objective.total();
        x = x_new;
        fx = f_new;
        g = g_new;

        // Keep the scale of T near one; F does not depend on it.
        const double norm = t_from_params(x).norm();
        if (norm > 1e3 || norm < 1e-3) {
            x /= norm;
            g *= norm;
            h_inv.setIdentity();
            fresh_hessian = true;
        }
        if (diag.last_delta < options.tolerance) {
            diag.converged = true;
            break;
        }
    }
    diag.function_evaluations = objective.evaluations();
    diag.gradient_norm = g.norm();

    const Eigen::Matrix4cd rho_mle = state_from_t(t_from_params(x));
    TomographyResult result{DensityMatrix(rho_mle), rho_linear, {}, 0.0, diag};
    result.report = entanglement_report(result.rho_mle, bell_state(BellKind::PhiPlus));
    result.log_likelihood = log_likelihood(result.rho_mle.matrix(), data);
    return result;
}

// ---------------------------------------------------------------------------
// CHSH

double correlation(const DensityMatrix& rho, MeasurementSetting a, MeasurementSetting b) {
    const std::array<MeasurementSetting, 2> settings{a, b};
    const JointDistribution p = joint_probabilities(rho, settings);
    return p[0] + p[3] - p[1] - p[2];
}

double chsh(const DensityMatrix& rho, MeasurementSetting a1, MeasurementSetting a2, MeasurementSetting b1,
            MeasurementSetting b2) {
    if (rho.n_qubits() != 2) {
        throw DomainError("chsh: requires a 2-qubit state");
    }
    const double e11 = correlation(rho, a1, b1);
    const double e12 = correlation(rho, a1, b2);
    const double e21 = correlation(rho, a2, b1);
    const double e22 = correlation(rho, a2, b2);
    const double sum = e11 + e12 + e21 + e22;
    const std::array<double, 4> candidates{sum - 2.0 * e12, sum - 2.0 * e11, sum - 2.0 * e21, sum - 2.0 * e22};
    double best = candidates[0];
    for (double s : candidates) {
        if (std::abs(s) > std::abs(best)) {
            best = s;
        }
    }
    return best;
}

ChshSettings optimal_chsh_settings() {
    using std::numbers::pi;
    return {MeasurementSetting::from_stokes(0.0), MeasurementSetting::from_stokes(pi / 2.0),
            MeasurementSetting::from_stokes(pi / 4.0), MeasurementSetting::from_stokes(3.0 * pi / 4.0)};
}

ChshSearchResult chsh_search(const DensityMatrix& rho, std::span<const MeasurementSetting> candidates) {
    if (candidates.empty()) {
        throw DomainError("chsh_search: no candidate settings");
    }
    ChshSearchResult best{0.0, {candidates[0], candidates[0], candidates[0], candidates[0]}};
    for (const auto& a1 : candidates) {
        for (const auto& a2 : candidates) {
            for (const auto& b1 : candidates) {
                for (const auto& b2 : candidates) {
                    const double s = chsh(rho, a1, a2, b1, b2);
                    if (std::abs(s) > std::abs(best.s)) {
                        best = {s, {a1, a2, b1, b2}};
                    }
                }
            }
        }
    }
    return best;
}

std::vector<double> chsh_candidate_angles() {
    std::vector<double> out;
    for (int k = 0; k < 8; ++k) {
        out.push_back(k * std::numbers::pi / 8.0);
    }
    return out;
}

} // namespace qigeo

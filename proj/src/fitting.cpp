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

#include "qigeo/fitting.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <fmt/format.h>

#include "qigeo/error.hpp"

namespace qigeo {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kGolden = 1.618033988749895;
constexpr double kInvGolden = 0.6180339887498949;

double binary_entropy(double p) {
    p = std::clamp(p, 0.0, 1.0);
    double h = 0.0;
    if (p > 1e-15) {
        h -= p * std::log2(p);
    }
    if (1.0 - p > 1e-15) {
        h -= (1.0 - p) * std::log2(1.0 - p);
    }
    return h;
}

struct Params {
    double lambda;
    double phase;
};

class Objective {
  public:
    Objective(const WernerViolationModel& model, std::vector<double> observed, std::vector<double> weights)
        : model_(model), observed_(std::move(observed)), weights_(std::move(weights)) {}

    double operator()(double lambda, double cos_phase) const {
        lambda = std::clamp(lambda, 0.0, 1.0);
        double sum = 0.0;
        for (std::size_t i = 0; i < observed_.size(); ++i) {
            const double r = model_.evaluate_at(i, lambda, cos_phase) - observed_[i];
            sum += weights_[i] * r * r;
        }
        return sum;
    }

    double operator()(const Params& p) const { return (*this)(p.lambda, std::cos(p.phase)); }

    [[nodiscard]] std::vector<double> residuals(const Params& p) const {
        std::vector<double> out(observed_.size());
        const double lambda = std::clamp(p.lambda, 0.0, 1.0);
        for (std::size_t i = 0; i < observed_.size(); ++i) {
            out[i] = std::sqrt(weights_[i]) * (model_.evaluate_at(i, lambda, std::cos(p.phase)) - observed_[i]);
        }
        return out;
    }

  private:
    const WernerViolationModel& model_;
    std::vector<double> observed_;
    std::vector<double> weights_;
};

Params clamp_params(Params p) { return {std::clamp(p.lambda, 0.0, 1.0), p.phase}; }

// Minimizes f(x + t d) over t. Returns the best t seen (0 if nothing
// improves). `h` is the initial trial step.
double line_search(const Objective& f, const Params& x, const Params& d, double h, double f0) {
    auto eval = [&](double t) { return f(clamp_params({x.lambda + t * d.lambda, x.phase + t * d.phase})); };

    double best_t = 0.0;
    double best_f = f0;
    auto track = [&](double t, double value) {
        if (value < best_f) {
            best_f = value;
            best_t = t;
        }
        return value;
    };

    double lo = -h;
    double hi = h;
    const double f_plus = track(h, eval(h));
    if (f_plus >= f0) {
        const double f_minus = track(-h, eval(-h));
        if (f_minus < f0) {
            h = -h;
        }
    }
    if (best_t != 0.0) {
        // Expand in the descending direction until the function rises.
        double a = 0.0;
        double b = h;
        double fb = best_f;
        double c = b + kGolden * (b - a);
        for (int k = 0; k < 80; ++k) {
            const double fc = track(c, eval(c));
            if (fc >= fb) {
                break;
            }
            a = b;
            b = c;
            fb = fc;
            c = b + kGolden * (b - a);
        }
        lo = std::min(a, c);
        hi = std::max(a, c);
    }

    double c = hi - kInvGolden * (hi - lo);
    double e = lo + kInvGolden * (hi - lo);
    double fc = track(c, eval(c));
    double fe = track(e, eval(e));
    for (int k = 0; k < 200 && (hi - lo) > 1e-15 * std::max(1.0, std::abs(hi) + std::abs(lo)); ++k) {
        if (fc < fe) {
            hi = e;
            e = c;
            fe = fc;
            c = hi - kInvGolden * (hi - lo);
            fc = track(c, eval(c));
        } else {
            lo = c;
            c = e;
            fc = fe;
            e = lo + kInvGolden * (hi - lo);
            fe = track(e, eval(e));
        }
    }
    return best_t;
}

} // namespace

WernerViolationModel::WernerViolationModel(std::span<const double> thetas) {
    edges_.reserve(thetas.size());
    for (double theta : thetas) {
        const QuadrilateralSettings s = schumacher_settings(theta);
        const std::array<std::pair<double, double>, 4> pairs{{{s.a1.stokes_angle, s.b1.stokes_angle},
                                                              {s.a2.stokes_angle, s.b1.stokes_angle},
                                                              {s.a2.stokes_angle, s.b2.stokes_angle},
                                                              {s.a1.stokes_angle, s.b2.stokes_angle}}};
        std::array<Edge, 4> row{};
        for (std::size_t e = 0; e < 4; ++e) {
            const double ca = std::cos(pairs[e].first / 2.0);
            const double sa = std::sin(pairs[e].first / 2.0);
            const double cb = std::cos(pairs[e].second / 2.0);
            const double sb = std::sin(pairs[e].second / 2.0);
            row[e] = {ca * ca * cb * cb + sa * sa * sb * sb, 2.0 * ca * cb * sa * sb};
        }
        edges_.push_back(row);
    }
}

double WernerViolationModel::evaluate_at(std::size_t point, double lambda, double cos_phase) const {
    const auto& row = edges_[point];
    std::array<double, 4> d{};
    for (std::size_t e = 0; e < 4; ++e) {
        const double agree = lambda * (row[e].aligned + cos_phase * row[e].cross) + 0.5 * (1.0 - lambda);
        d[e] = 2.0 * binary_entropy(agree);
    }
    return d[3] - (d[0] + d[1] + d[2]);
}

std::vector<double> WernerViolationModel::evaluate(double lambda, double phase) const {
    std::vector<double> out(edges_.size());
    const double cos_phase = std::cos(phase);
    for (std::size_t i = 0; i < edges_.size(); ++i) {
        out[i] = evaluate_at(i, lambda, cos_phase);
    }
    return out;
}

WernerFit fit_werner(const ViolationCurve& observed, const FitOptions& options) {
    if (observed.size() < 2) {
        throw DomainError(fmt::format("fit_werner: need at least 2 points, got {}", observed.size()));
    }
    if (!(options.lambda_step > 0.0) || !(options.phase_step > 0.0)) {
        throw DomainError("fit_werner: grid steps must be positive");
    }
    std::vector<double> weights(observed.size(), 1.0);
    if (options.weighted) {
        if (!observed.has_uncertainties()) {
            throw DomainError("fit_werner: weighted fit requires dv on every point");
        }
        for (std::size_t i = 0; i < observed.size(); ++i) {
            const double dv = *observed.points()[i].dv;
            if (!(dv > 0.0)) {
                throw DomainError("fit_werner: weighted fit requires positive dv");
            }
            weights[i] = 1.0 / (dv * dv);
        }
    }

    const std::vector<double> thetas = observed.thetas();
    const WernerViolationModel model(thetas);
    const Objective objective(model, observed.values(), weights);

    // Coarse grid; strict improvement keeps the lexicographically smallest
    // (lambda, phase) among ties.
    const auto n_lambda = static_cast<int>(std::floor(1.0 / options.lambda_step + 1e-9));
    const auto n_phase = static_cast<int>(std::ceil(kTwoPi / options.phase_step - 1e-9));
    std::vector<double> cos_grid(static_cast<std::size_t>(n_phase));
    for (int j = 0; j < n_phase; ++j) {
        cos_grid[static_cast<std::size_t>(j)] = std::cos(j * options.phase_step);
    }
    Params best{0.0, 0.0};
    double best_f = std::numeric_limits<double>::infinity();
    for (int i = 0; i <= n_lambda; ++i) {
        const double lambda = std::min(1.0, i * options.lambda_step);
        for (int j = 0; j < n_phase; ++j) {
            const double value = objective(lambda, cos_grid[static_cast<std::size_t>(j)]);
            if (value < best_f) {
                best_f = value;
                best = {lambda, j * options.phase_step};
            }
        }
    }

    WernerFit fit;
    fit.grid_objective = best_f;

    Params x = best;
    double fx = best_f;
    double h_lambda = options.lambda_step;
    double h_phase = options.phase_step;
    int cycle = 0;
    for (; cycle < options.max_cycles; ++cycle) {
        const Params start = x;
        const double t_lambda = line_search(objective, x, {1.0, 0.0}, h_lambda, fx);
        x = clamp_params({x.lambda + t_lambda, x.phase});
        fx = objective(x);
        const double t_phase = line_search(objective, x, {0.0, 1.0}, h_phase, fx);
        x.phase += t_phase;
        fx = objective(x);

        const Params move{x.lambda - start.lambda, x.phase - start.phase};
        const double length = std::hypot(move.lambda, move.phase);
        if (length > 0.0) {
            const Params dir{move.lambda / length, move.phase / length};
            const double t = line_search(objective, x, dir, length, fx);
            x = clamp_params({x.lambda + t * dir.lambda, x.phase + t * dir.phase});
            fx = objective(x);
        }
        const double dl = std::abs(x.lambda - start.lambda);
        const double dp = std::abs(x.phase - start.phase);
        if (std::max(dl, dp) < options.tolerance) {
            ++cycle;
            break;
        }
        h_lambda = std::max(2.0 * dl, 1e-9);
        h_phase = std::max(2.0 * dp, 1e-9);
    }

    double phase = std::fmod(x.phase, kTwoPi);
    if (phase < 0.0) {
        phase += kTwoPi;
    }
    if (phase > std::numbers::pi) {
        phase = kTwoPi - phase;
    }
    fit.lambda = x.lambda;
    fit.phase = phase;
    fit.residuals = objective.residuals({fit.lambda, fit.phase});
    fit.residual_sum = 0.0;
    for (double r : fit.residuals) {
        fit.residual_sum += r * r;
    }
    fit.refinement_cycles = cycle;
    return fit;
}

} // namespace qigeo

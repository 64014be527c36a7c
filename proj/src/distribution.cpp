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

#include "qigeo/distribution.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <fmt/format.h>

#include "qigeo/error.hpp"

namespace qigeo {

namespace {

constexpr int kMaxParties = 16;
constexpr double kNegativeRoundoff = 1e-12;
constexpr double kSumTolerance = 1e-10;

} // namespace

JointDistribution::JointDistribution(int n_parties, std::vector<double> probabilities)
    : n_parties_(n_parties), probabilities_(std::move(probabilities)) {
    if (n_parties < 1 || n_parties > kMaxParties) {
        throw DomainError(fmt::format("joint distribution: n_parties must be in [1, {}], got {}",
                                      kMaxParties, n_parties));
    }
    const std::size_t expected = std::size_t{1} << n_parties;
    if (probabilities_.size() != expected) {
        throw DomainError(fmt::format("joint distribution: expected {} entries for {} parties, got {}",
                                      expected, n_parties, probabilities_.size()));
    }
    for (double& p : probabilities_) {
        if (!std::isfinite(p) || p < -kNegativeRoundoff) {
            throw DomainError(fmt::format("joint distribution: invalid probability {}", p));
        }
        p = std::max(p, 0.0);
    }
    const double total = std::accumulate(probabilities_.begin(), probabilities_.end(), 0.0);
    if (std::abs(total - 1.0) > kSumTolerance) {
        throw DomainError(fmt::format("joint distribution: probabilities sum to {}", total));
    }
}

JointDistribution JointDistribution::uniform(int n_parties) {
    if (n_parties < 1 || n_parties > kMaxParties) {
        throw DomainError("joint distribution: bad party count");
    }
    const std::size_t n = std::size_t{1} << n_parties;
    return {n_parties, std::vector<double>(n, 1.0 / static_cast<double>(n))};
}

JointDistribution JointDistribution::marginal(std::span<const int> keep) const {
    if (keep.empty()) {
        throw DomainError("marginal: at least one party must be kept");
    }
    std::vector<bool> seen(static_cast<std::size_t>(n_parties_), false);
    for (int party : keep) {
        if (party < 0 || party >= n_parties_ || seen[static_cast<std::size_t>(party)]) {
            throw DomainError(fmt::format("marginal: invalid or repeated party index {}", party));
        }
        seen[static_cast<std::size_t>(party)] = true;
    }

    const int m = static_cast<int>(keep.size());
    std::vector<double> out(std::size_t{1} << m, 0.0);
    for (std::size_t outcome = 0; outcome < probabilities_.size(); ++outcome) {
        std::size_t reduced = 0;
        for (int k = 0; k < m; ++k) {
            const int shift = n_parties_ - 1 - keep[static_cast<std::size_t>(k)];
            const std::size_t bit = (outcome >> shift) & 1U;
            reduced |= bit << (m - 1 - k);
        }
        out[reduced] += probabilities_[outcome];
    }
    return {m, std::move(out)};
}

JointDistribution JointDistribution::permuted(std::span<const int> order) const {
    if (static_cast<int>(order.size()) != n_parties_) {
        throw DomainError("permuted: order must list every party exactly once");
    }
    return marginal(order);
}

} // namespace qigeo

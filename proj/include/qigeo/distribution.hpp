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

#include <cstddef>
#include <span>
#include <vector>

namespace qigeo {

/// Normalized probability table over binary outcome tuples.
///
/// Outcomes are indexed as integers: party 0 owns the most significant bit,
/// and a bit value of 0 means "pass" (photon transmitted by the polarizer),
/// 1 means "block". A two-party table is therefore ordered
/// (pass,pass), (pass,block), (block,pass), (block,block).
class JointDistribution {
  public:
    /// Validates the table: size 2^n_parties, entries >= 0 (values down to
    /// -1e-12 are treated as round-off and clamped to zero), sum within 1e-10
    /// of one.
    JointDistribution(int n_parties, std::vector<double> probabilities);

    static JointDistribution uniform(int n_parties);

    [[nodiscard]] int n_parties() const noexcept { return n_parties_; }
    [[nodiscard]] std::size_t size() const noexcept { return probabilities_.size(); }
    [[nodiscard]] std::span<const double> probabilities() const noexcept {
        return probabilities_;
    }
    [[nodiscard]] double operator[](std::size_t outcome) const { return probabilities_[outcome]; }

    /// Marginal over the listed parties. Party k of the result is party
    /// keep[k] of this table, so the call doubles as a relabeling.
    [[nodiscard]] JointDistribution marginal(std::span<const int> keep) const;

    /// Same table with parties reordered; order must be a permutation.
    [[nodiscard]] JointDistribution permuted(std::span<const int> order) const;

  private:
    int n_parties_;
    std::vector<double> probabilities_;
};

} // namespace qigeo

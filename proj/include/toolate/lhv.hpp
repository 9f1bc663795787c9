// Copyright 2026 The toolate Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at

//     http://www.apache.org/licenses/LICENSE-2.0

// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

/**
 * @file
 * Local hidden-variable baselines.
 *
 * Two families are covered. Deterministic strategies fix every outcome in
 * advance for the standard CHSH test. Conspiracy models fix orientations
 * and values jointly at the source; they can reproduce any exit-pair table
 * (including the quantum one), so only the interference test separates them
 * from the quantum prediction.
 */

#pragma once

#include <array>
#include <cstdint>
#include <utility>
#include <vector>

#include "toolate/interference.hpp"
#include "toolate/protocol.hpp"
#include "toolate/spinlab.hpp"

namespace toolate::lhv {

using protocol::JointTable;
using protocol::Particle;
using spin::Orientation;

/// The four analyzer settings of a CHSH run: a, a' for A and b, b' for B.
struct ChshSettings {
    Orientation a;
    Orientation a_prime;
    Orientation b;
    Orientation b_prime;
};

/// Pre-assigned +/-1 outcome for every orientation either wing may use.
class DeterministicStrategy {
  public:
    using Assignment = std::vector<std::pair<Orientation, int>>;

    DeterministicStrategy(Assignment wing_a, Assignment wing_b);

    /// Throws std::out_of_range for an orientation the strategy does not cover.
    [[nodiscard]] auto value(Particle particle, Orientation o) const -> int;
    [[nodiscard]] auto wing(Particle particle) const -> const Assignment & {
        return particle == Particle::A ? wing_a_ : wing_b_;
    }

  private:
    Assignment wing_a_;
    Assignment wing_b_;
};

/// S of a deterministic strategy; always -2 or +2.
auto strategy_chsh(const DeterministicStrategy &strategy,
                   const ChshSettings &settings) -> int;

struct ChshMaximum {
    int max_abs_s;
    DeterministicStrategy argmax;
};

/// Exhaustive search over every +/-1 assignment of the settings.
auto enumerate_chsh_max(const ChshSettings &settings) -> ChshMaximum;

/// Every deterministic strategy over the settings (16 when a != a', b != b').
auto all_strategies(const ChshSettings &settings)
    -> std::vector<DeterministicStrategy>;

struct WeightedStrategy {
    double weight;
    DeterministicStrategy strategy;
};

struct Estimate {
    double value;
    double std_error;
    std::uint64_t n;
};

struct LhvEstimates {
    /// E(a,b), E(a,b'), E(a',b), E(a',b').
    std::array<Estimate, 4> correlations;
    Estimate chsh;
};

/// Monte Carlo correlations when each trial draws a strategy from the
/// mixture. Each setting pair gets @p trials trials.
auto lhv_epr_sample(const std::vector<WeightedStrategy> &mixture,
                    const ChshSettings &settings, qcore::Rng &rng,
                    std::uint64_t trials) -> LhvEstimates;

/**
 * @brief Source-level joint distribution over exit pairs
 * (orientation_A, value_A, orientation_B, value_B).
 *
 * Each trial the source hands both particles a definite exit; neither wing's
 * draw depends on anything chosen at the other wing afterwards.
 */
class ConspiracyModel {
  public:
    explicit ConspiracyModel(JointTable table);
    static auto uniform() -> ConspiracyModel;
    /// Model that copies an exit-pair table outright.
    static auto from_table(const JointTable &table) -> ConspiracyModel;

    [[nodiscard]] auto table() const noexcept -> const JointTable & {
        return table_;
    }
    /// Draws one exit pair; returns (exit_A, exit_B).
    auto draw(qcore::Rng &rng) const -> std::pair<std::size_t, std::size_t>;

  private:
    JointTable table_;
};

struct ConspiracyPrediction {
    JointTable exit_table;
    interference::PortDistribution ports_a;
    interference::PortDistribution ports_b;
};

/// Exit statistics and recombination ports implied by @p model. Ports come
/// from recombining each definite exit state and mixing incoherently.
auto conspiracy_predictions(const ConspiracyModel &model,
                            const protocol::ParticleLayout &layout)
    -> ConspiracyPrediction;

} // namespace toolate::lhv

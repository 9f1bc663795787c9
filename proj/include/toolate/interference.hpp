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
 * Path recombination through the inverse three-port splitter, and which-path
 * erasure by a detector that cannot tell the three magnets apart.
 */

#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "toolate/protocol.hpp"

namespace toolate::interference {

using protocol::JointState;
using protocol::JointTable;
using protocol::ParticleLayout;
using qcore::StateVector;

/// Output-port probabilities after recombination.
class PortDistribution {
  public:
    PortDistribution() = default;
    explicit PortDistribution(std::array<double, 3> probs);
    static auto uniform() -> PortDistribution;

    [[nodiscard]] auto operator[](std::size_t port) const -> double {
        return probs_.at(port);
    }
    [[nodiscard]] auto probabilities() const noexcept
        -> const std::array<double, 3> & {
        return probs_;
    }

  private:
    std::array<double, 3> probs_{1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0};
};

/// Sends a single-particle (path ⊗ spin) state back through the splitter
/// and returns the port distribution with spin traced out.
auto recombine(const StateVector &particle_state) -> PortDistribution;

inline constexpr double kDefaultThreshold = 0.05;
inline constexpr double kSampledSigmaThreshold = 5.0;

auto total_variation(std::span<const double> p, std::span<const double> q)
    -> double;

struct Discrimination {
    double tv_distance;
    bool pass; ///< true when the distributions are told apart
};

auto interference_discriminator(const PortDistribution &quantum,
                                const PortDistribution &model,
                                double threshold = kDefaultThreshold)
    -> Discrimination;

struct SampledDiscrimination {
    double max_abs_z;
    bool pass;
};

/// Sampled port counts against a model's exact prediction: the largest
/// per-port binomial z-score must exceed @p sigmas.
auto sampled_discriminator(const std::array<std::uint64_t, 3> &counts,
                           const PortDistribution &model,
                           double sigmas = kSampledSigmaThreshold)
    -> SampledDiscrimination;

struct ErasureResult {
    double success_prob;
    StateVector post_spin_state; ///< two spins, A outer
    double entanglement_bits;
    double fidelity_to_singlet;
};

/// Projects both path registers onto the uniform superposition of ports.
/// Throws qcore::ZeroProbability when nothing survives.
auto erase_paths(const JointState &state) -> ErasureResult;

struct MixtureErasure {
    double success_prob;
    /// Weighted mean over mixture components of the post-erasure entropy.
    double entanglement_bits;
    /// Singlet fidelity of the post-selected mixed spin state.
    double fidelity_to_singlet;
};

/// Erasure applied to an incoherent mixture of definite exit pairs, one
/// component per nonzero entry of @p weights.
auto erase_definite_paths(const JointTable &weights,
                          const ParticleLayout &layout) -> MixtureErasure;

struct SwapRow {
    std::string condition;
    double success_prob;
    double entanglement_bits;
    double fidelity_to_singlet;
};

struct SwapReport {
    std::vector<SwapRow> rows;
    std::string contrast_model;
    MixtureErasure contrast;
    std::vector<std::string> notes;
};

/// Erasure on the prepared pair and on all four value-conditioned states,
/// contrasted with a definite-path mixture carrying the same exit statistics.
auto swap_report(const ParticleLayout &layout) -> SwapReport;

void to_json(nlohmann::json &j, const SwapReport &report);

} // namespace toolate::interference

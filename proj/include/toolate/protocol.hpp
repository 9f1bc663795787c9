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
 * The value-first ("too late choice") measurement protocol on two
 * path-superposed spin-1/2 particles.
 *
 * Each particle has a 3-dim path register (one port per Stern-Gerlach magnet)
 * and a 2-dim spin register in the z basis, so a particle lives in 6 dims
 * with basis index 2*port + spin. The pair register is
 * path_A ⊗ spin_A ⊗ path_B ⊗ spin_B (36 dims), particle A outermost.
 *
 * Outcomes are reported in the exit basis: the six states
 * |port(o)> ⊗ |spin eigenstate along o>, ordered by trine slot
 * (alpha, beta, gamma) and then by value (up, down). Exit index = 2*slot + v.
 */

#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "toolate/qcore.hpp"
#include "toolate/spinlab.hpp"

namespace toolate::protocol {

using qcore::Operator;
using qcore::Rng;
using qcore::StateVector;
using spin::Orientation;
using spin::SpinValue;
using spin::TrineSet;

enum class Particle { A, B };

inline constexpr std::size_t kPathDim = 3;
inline constexpr std::size_t kSpinDim = 2;
inline constexpr std::size_t kParticleDim = kPathDim * kSpinDim;
inline constexpr std::size_t kJointDim = kParticleDim * kParticleDim;
inline constexpr std::size_t kExitCount = 6;

/// Fine-grained factor dims of a single particle and of the pair.
inline const qcore::Layout kParticleFactors{kPathDim, kSpinDim};
inline const qcore::Layout kJointFactors{kPathDim, kSpinDim, kPathDim,
                                         kSpinDim};
/// The pair viewed as two 6-dim particles.
inline const qcore::Layout kPairFactors{kParticleDim, kParticleDim};

/**
 * @brief Fixed bijection between trine slots and beam-splitter ports.
 *
 * The identity binding is p1<->alpha, p2<->beta, p3<->gamma.
 */
class PortBinding {
  public:
    PortBinding() = default;
    /// @p slot_at_port[p] is the trine slot whose magnet sits at port p.
    explicit PortBinding(std::array<std::size_t, 3> slot_at_port);

    [[nodiscard]] auto port_of_slot(std::size_t slot) const -> std::size_t {
        return port_of_slot_.at(slot);
    }
    [[nodiscard]] auto slot_at_port(std::size_t port) const -> std::size_t {
        return slot_at_port_.at(port);
    }
    /// All six bindings, identity first.
    static auto all() -> std::vector<PortBinding>;

    friend auto operator==(const PortBinding &, const PortBinding &)
        -> bool = default;

  private:
    std::array<std::size_t, 3> slot_at_port_{0, 1, 2};
    std::array<std::size_t, 3> port_of_slot_{0, 1, 2};
};

struct ParticleLayout {
    TrineSet trine;
    PortBinding binding;

    /// Port of the magnet aligned with @p o. Throws for o outside the trine.
    [[nodiscard]] auto port(Orientation o) const -> std::size_t;
    friend auto operator==(const ParticleLayout &, const ParticleLayout &)
        -> bool = default;
};

struct ExitLabel {
    Orientation orientation;
    SpinValue value = SpinValue::Up;

    friend auto operator==(const ExitLabel &, const ExitLabel &)
        -> bool = default;
};

/// Exit label for index 2*slot + v in the exit ordering of @p trine.
auto exit_label(const TrineSet &trine, std::size_t exit_index) -> ExitLabel;
auto exit_index(const TrineSet &trine, const ExitLabel &e) -> std::size_t;
/// "alpha_up", "gamma_down", ...
auto exit_name(std::size_t exit_index) -> std::string;

/// Normalized 36-dim pair state with its (immutable) layout.
class JointState {
  public:
    JointState(StateVector state, ParticleLayout layout);

    [[nodiscard]] auto state() const noexcept -> const StateVector & {
        return state_;
    }
    [[nodiscard]] auto layout() const noexcept -> const ParticleLayout & {
        return layout_;
    }

  private:
    StateVector state_;
    ParticleLayout layout_;
};

/// 3x3 discrete Fourier unitary, entries omega^{jk}/sqrt(3).
auto three_port_bs() -> Operator;

/// |port(o)> ⊗ |spin eigenstate along o with value v>, 6 dims.
auto exit_vector(const ParticleLayout &layout, const ExitLabel &e)
    -> StateVector;

/// Beam-split both particles from port p1 and pair their spins in the singlet.
auto prepare_joint(const ParticleLayout &layout) -> JointState;

struct ValueProjectors {
    Operator up;
    Operator down;
};

/// Single-particle (6-dim) value projectors: sum over magnets of
/// |port(o)><port(o)| ⊗ |v(o)><v(o)|.
auto particle_value_projectors(const ParticleLayout &layout)
    -> ValueProjectors;
/// The same projectors lifted to the pair register for one particle.
auto value_projectors(Particle particle, const ParticleLayout &layout)
    -> ValueProjectors;

struct ValueOutcome {
    SpinValue value;
    JointState post;
    double prob;
};

struct OrientationOutcome {
    ExitLabel exit;
    JointState post;
    double prob;
};

/**
 * @brief Pre-validated measurement partitions for one layout.
 *
 * Building and validating the 36-dim partitions is the expensive part of a
 * measurement, so repeated trials share one Apparatus.
 */
class Apparatus {
  public:
    explicit Apparatus(ParticleLayout layout);

    [[nodiscard]] auto layout() const noexcept -> const ParticleLayout & {
        return layout_;
    }
    /// Two-outcome partition {P_up, P_down} for @p particle.
    [[nodiscard]] auto value_partition(Particle particle) const
        -> const qcore::Partition &;
    /// Six rank-1 exit projectors for @p particle, in exit order.
    [[nodiscard]] auto exit_partition(Particle particle) const
        -> const qcore::Partition &;

    auto measure_value(const JointState &state, Particle particle,
                       Rng &rng) const -> ValueOutcome;
    auto measure_orientation(const JointState &state, Particle particle,
                             Rng &rng) const -> OrientationOutcome;

  private:
    ParticleLayout layout_;
    std::array<qcore::Partition, 2> value_;
    std::array<qcore::Partition, 2> exits_;
};

auto measure_value(const JointState &state, Particle particle, Rng &rng)
    -> ValueOutcome;
/// Completes the measurement of @p particle, revealing its orientation.
/// Callers are expected to have fixed the particle's value first.
auto measure_orientation(const JointState &state, Particle particle, Rng &rng)
    -> OrientationOutcome;

/// Probability of each (exit_A, exit_B) pair, index 6*exit_A + exit_B.
using JointTable = std::array<double, kExitCount * kExitCount>;

/// Amplitudes <exit_A, exit_B|state>, index 6*exit_A + exit_B.
auto exit_amplitudes(const JointState &state)
    -> std::array<qcore::Complex, kExitCount * kExitCount>;

/// Exact single-shot Born probabilities of all exit pairs.
auto joint_distribution(const JointState &state) -> JointTable;

enum class StageKind { Value, Orientation };

struct Stage {
    Particle particle;
    StageKind kind;
};

/// Every ordering of the four stages in which each particle's value stage
/// precedes its orientation stage (six interleavings).
auto value_first_orderings() -> std::vector<std::array<Stage, 4>>;

/**
 * @brief Exit-pair distribution obtained by composing the stages in @p order
 * exactly, enumerating every measurement branch and multiplying conditional
 * probabilities. Zero-probability branches are pruned.
 */
auto sequential_distribution(const JointState &state,
                             std::span<const Stage> order) -> JointTable;

/// A literal expression together with its norm as written.
struct LiteralState {
    StateVector state; ///< renormalized
    double literal_norm;
};

/// (1/sqrt3)(|alpha,v> + |beta,v> + |gamma,v>) on one particle.
auto literal_single_state(SpinValue value, const ParticleLayout &layout)
    -> LiteralState;
/// (1/sqrt6)[psi_up ⊗ psi_up - (1/3) sum_o |o,up>|o,up>].
auto literal_pair_state(const ParticleLayout &layout) -> LiteralState;
/// (1/sqrt30)[sum_{v,w} psi_v ⊗ psi_w - (1/3) sum_{o,v} |o,v>|o,v>].
auto literal_full_state(const ParticleLayout &layout) -> LiteralState;

/// Single particle with uniform coherent paths whose spin is rotated at each
/// port onto that magnet's axis, then value-measured. Built from rotations
/// rather than exit vectors.
auto oracle_single_state(SpinValue value, const ParticleLayout &layout)
    -> StateVector;

/// prepare_joint conditioned on value outcomes (vA, vB), renormalized.
auto oracle_conditional_state(SpinValue value_a, SpinValue value_b,
                              const ParticleLayout &layout) -> JointState;

struct EquationAudit {
    std::string name;
    double literal_norm;
    double fidelity_vs_oracle;
    /// Fidelity after replacing both states' amplitudes by their moduli.
    double magnitude_overlap;
};

struct AmplitudeEntry {
    std::string exit_a;
    std::string exit_b;
    qcore::Complex amplitude;
};

struct ZeroCheck {
    std::string label;
    double magnitude;
    bool pass;
};

struct VerificationReport {
    std::vector<EquationAudit> equations;
    std::vector<AmplitudeEntry> amplitude_table;
    std::vector<ZeroCheck> zero_checks;
    std::vector<std::string> notes;
};

/// Tolerance for analytic zero amplitudes.
inline constexpr double kAnalyticZero = 1e-14;

/// Compares the literal single/pair/full states with their first-principles
/// counterparts. Reports fidelities as computed; never asserts equality.
auto verify_states(const ParticleLayout &layout) -> VerificationReport;

void to_json(nlohmann::json &j, const VerificationReport &report);

} // namespace toolate::protocol

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

#include "toolate/protocol.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace toolate::protocol {

using qcore::Complex;

namespace {

auto particle_factor(Particle p) -> std::size_t {
    return p == Particle::A ? 0 : 1;
}

auto value_index(SpinValue v) -> std::size_t {
    return v == SpinValue::Up ? 0 : 1;
}

auto lift(const Operator &single, Particle particle) -> Operator {
    return qcore::embed(single, kPairFactors, particle_factor(particle));
}

auto exit_projectors(const ParticleLayout &layout, Particle particle)
    -> std::vector<Operator> {
    std::vector<Operator> out;
    out.reserve(kExitCount);
    for (std::size_t e = 0; e < kExitCount; ++e) {
        const StateVector v = exit_vector(layout, exit_label(layout.trine, e));
        out.push_back(lift(Operator::projector(v), particle));
    }
    return out;
}

auto value_partition_for(const ParticleLayout &layout, Particle particle)
    -> qcore::Partition {
    auto [up, down] = value_projectors(particle, layout);
    return qcore::Partition({std::move(up), std::move(down)});
}

// Unnormalized sum over slots of the exit vectors with value v, scaled by
// 1/sqrt3 as printed.
auto literal_psi(SpinValue v, const ParticleLayout &layout) -> StateVector {
    StateVector psi = StateVector::zeros(kParticleDim);
    for (std::size_t slot = 0; slot < 3; ++slot) {
        psi += exit_vector(layout, {layout.trine[slot], v});
    }
    psi *= 1.0 / std::sqrt(3.0);
    return psi;
}

auto product(const StateVector &a, const StateVector &b) -> StateVector {
    std::vector<Complex> amps(a.dim() * b.dim());
    for (std::size_t i = 0; i < a.dim(); ++i) {
        for (std::size_t j = 0; j < b.dim(); ++j) {
            amps[i * b.dim() + j] = a[i] * b[j];
        }
    }
    return StateVector(std::move(amps));
}

auto same_exit_sum(const ParticleLayout &layout, SpinValue v) -> StateVector {
    StateVector sum = StateVector::zeros(kJointDim);
    for (std::size_t slot = 0; slot < 3; ++slot) {
        const StateVector e = exit_vector(layout, {layout.trine[slot], v});
        sum += product(e, e);
    }
    return sum;
}

auto magnitude_overlap(std::span<const Complex> a, std::span<const Complex> b)
    -> double {
    double dot = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        dot += std::abs(a[i]) * std::abs(b[i]);
    }
    return std::min(1.0, dot * dot);
}

auto single_exit_coefficients(const StateVector &psi,
                              const ParticleLayout &layout)
    -> std::array<Complex, kExitCount> {
    std::array<Complex, kExitCount> out{};
    for (std::size_t e = 0; e < kExitCount; ++e) {
        out[e] = exit_vector(layout, exit_label(layout.trine, e)).inner(psi);
    }
    return out;
}

// Amplitudes of a pair state in the exit basis (any 36-dim vector).
auto exit_coefficients(const StateVector &psi, const ParticleLayout &layout)
    -> std::array<Complex, kExitCount * kExitCount> {
    std::array<StateVector, kExitCount> exits;
    for (std::size_t e = 0; e < kExitCount; ++e) {
        exits[e] = exit_vector(layout, exit_label(layout.trine, e));
    }
    std::array<Complex, kExitCount * kExitCount> out{};
    for (std::size_t ea = 0; ea < kExitCount; ++ea) {
        for (std::size_t eb = 0; eb < kExitCount; ++eb) {
            out[ea * kExitCount + eb] = product(exits[ea], exits[eb]).inner(psi);
        }
    }
    return out;
}

void branch(const JointState &state, const Apparatus &apparatus,
            std::span<const Stage> remaining, double weight,
            std::array<std::size_t, 2> &exits, JointTable &table) {
    if (remaining.empty()) {
        table[exits[0] * kExitCount + exits[1]] += weight;
        return;
    }
    const Stage stage = remaining.front();
    const qcore::Partition &partition =
        stage.kind == StageKind::Value
            ? apparatus.value_partition(stage.particle)
            : apparatus.exit_partition(stage.particle);
    for (std::size_t k = 0; k < partition.size(); ++k) {
        qcore::Projection proj;
        try {
            proj = qcore::project(partition[k], state.state());
        } catch (const qcore::ZeroProbability &) {
            continue;
        }
        if (stage.kind == StageKind::Orientation) {
            exits[particle_factor(stage.particle)] = k;
        }
        branch(JointState(std::move(proj.post), state.layout()), apparatus,
               remaining.subspan(1), weight * proj.prob, exits, table);
    }
}

} // namespace

// ---------------------------------------------------------------------------
// Layout

PortBinding::PortBinding(std::array<std::size_t, 3> slot_at_port)
    : slot_at_port_(slot_at_port) {
    std::array<bool, 3> seen{};
    for (std::size_t port = 0; port < 3; ++port) {
        const std::size_t slot = slot_at_port_[port];
        if (slot >= 3 || seen[slot]) {
            throw std::invalid_argument("port binding must be a permutation");
        }
        seen[slot] = true;
        port_of_slot_[slot] = port;
    }
}

auto PortBinding::all() -> std::vector<PortBinding> {
    std::array<std::size_t, 3> perm{0, 1, 2};
    std::vector<PortBinding> out;
    do {
        out.emplace_back(perm);
    } while (std::next_permutation(perm.begin(), perm.end()));
    return out;
}

auto ParticleLayout::port(Orientation o) const -> std::size_t {
    const auto slot = trine.index_of(o);
    if (!slot) {
        throw std::invalid_argument("orientation is not part of the trine");
    }
    return binding.port_of_slot(*slot);
}

auto exit_label(const TrineSet &trine, std::size_t exit_index) -> ExitLabel {
    if (exit_index >= kExitCount) {
        throw std::out_of_range("exit index out of range");
    }
    return {trine[exit_index / 2],
            exit_index % 2 == 0 ? SpinValue::Up : SpinValue::Down};
}

auto exit_index(const TrineSet &trine, const ExitLabel &e) -> std::size_t {
    const auto slot = trine.index_of(e.orientation);
    if (!slot) {
        throw std::invalid_argument("orientation is not part of the trine");
    }
    return 2 * *slot + value_index(e.value);
}

auto exit_name(std::size_t exit_index) -> std::string {
    return spin::slot_name(exit_index / 2) + "_" +
           spin::to_string(exit_index % 2 == 0 ? SpinValue::Up
                                               : SpinValue::Down);
}

JointState::JointState(StateVector state, ParticleLayout layout)
    : state_(std::move(state)), layout_(std::move(layout)) {
    if (state_.dim() != kJointDim) {
        throw qcore::DimensionMismatch("joint state must have 36 amplitudes");
    }
    if (!state_.is_normalized()) {
        throw std::invalid_argument("joint state must be normalized");
    }
}

// ---------------------------------------------------------------------------
// Preparation

auto three_port_bs() -> Operator {
    const double amp = 1.0 / std::sqrt(3.0);
    Operator u = Operator::zeros(kPathDim);
    for (std::size_t j = 0; j < kPathDim; ++j) {
        for (std::size_t k = 0; k < kPathDim; ++k) {
            const double phase =
                spin::kTwoPi * static_cast<double>((j * k) % kPathDim) / 3.0;
            u(j, k) = std::polar(amp, phase);
        }
    }
    return u;
}

auto exit_vector(const ParticleLayout &layout, const ExitLabel &e)
    -> StateVector {
    const std::size_t port = layout.port(e.orientation);
    const StateVector s = spin::spin_eigenstate(e.orientation, e.value);
    StateVector out = StateVector::zeros(kParticleDim);
    out[kSpinDim * port] = s[0];
    out[kSpinDim * port + 1] = s[1];
    return out;
}

auto prepare_joint(const ParticleLayout &layout) -> JointState {
    const StateVector path =
        three_port_bs().apply(StateVector::basis(kPathDim, 0));
    const StateVector pair = spin::singlet();
    StateVector psi = StateVector::zeros(kJointDim);
    for (std::size_t pa = 0; pa < kPathDim; ++pa) {
        for (std::size_t sa = 0; sa < kSpinDim; ++sa) {
            for (std::size_t pb = 0; pb < kPathDim; ++pb) {
                for (std::size_t sb = 0; sb < kSpinDim; ++sb) {
                    const std::size_t a = kSpinDim * pa + sa;
                    const std::size_t b = kSpinDim * pb + sb;
                    psi[a * kParticleDim + b] =
                        path[pa] * path[pb] * pair[kSpinDim * sa + sb];
                }
            }
        }
    }
    return JointState(std::move(psi), layout);
}

auto particle_value_projectors(const ParticleLayout &layout)
    -> ValueProjectors {
    ValueProjectors out{Operator::zeros(kParticleDim),
                        Operator::zeros(kParticleDim)};
    for (std::size_t slot = 0; slot < 3; ++slot) {
        const Orientation o = layout.trine[slot];
        const Operator port_proj = Operator::projector(
            StateVector::basis(kPathDim, layout.port(o)));
        const auto [p_up, p_down] = spin::sgm_projectors(o);
        out.up += qcore::kron(port_proj, p_up);
        out.down += qcore::kron(port_proj, p_down);
    }
    return out;
}

auto value_projectors(Particle particle, const ParticleLayout &layout)
    -> ValueProjectors {
    const auto single = particle_value_projectors(layout);
    return {lift(single.up, particle), lift(single.down, particle)};
}

// ---------------------------------------------------------------------------
// Measurement

Apparatus::Apparatus(ParticleLayout layout)
    : layout_(std::move(layout)),
      value_{value_partition_for(layout_, Particle::A),
             value_partition_for(layout_, Particle::B)},
      exits_{qcore::Partition(exit_projectors(layout_, Particle::A)),
             qcore::Partition(exit_projectors(layout_, Particle::B))} {}

auto Apparatus::value_partition(Particle particle) const
    -> const qcore::Partition & {
    return value_[particle_factor(particle)];
}

auto Apparatus::exit_partition(Particle particle) const
    -> const qcore::Partition & {
    return exits_[particle_factor(particle)];
}

auto Apparatus::measure_value(const JointState &state, Particle particle,
                              Rng &rng) const -> ValueOutcome {
    if (!(state.layout() == layout_)) {
        throw std::invalid_argument("state layout differs from apparatus");
    }
    auto s = qcore::sample(state.state(), value_partition(particle), rng);
    return {s.index == 0 ? SpinValue::Up : SpinValue::Down,
            JointState(std::move(s.post), layout_), s.prob};
}

auto Apparatus::measure_orientation(const JointState &state, Particle particle,
                                    Rng &rng) const -> OrientationOutcome {
    if (!(state.layout() == layout_)) {
        throw std::invalid_argument("state layout differs from apparatus");
    }
    auto s = qcore::sample(state.state(), exit_partition(particle), rng);
    return {exit_label(layout_.trine, s.index),
            JointState(std::move(s.post), layout_), s.prob};
}

auto measure_value(const JointState &state, Particle particle, Rng &rng)
    -> ValueOutcome {
    return Apparatus(state.layout()).measure_value(state, particle, rng);
}

auto measure_orientation(const JointState &state, Particle particle, Rng &rng)
    -> OrientationOutcome {
    return Apparatus(state.layout()).measure_orientation(state, particle, rng);
}

auto exit_amplitudes(const JointState &state)
    -> std::array<Complex, kExitCount * kExitCount> {
    return exit_coefficients(state.state(), state.layout());
}

auto joint_distribution(const JointState &state) -> JointTable {
    const auto amps = exit_amplitudes(state);
    JointTable table{};
    for (std::size_t i = 0; i < amps.size(); ++i) {
        table[i] = std::norm(amps[i]);
    }
    return table;
}

auto value_first_orderings() -> std::vector<std::array<Stage, 4>> {
    std::array<Stage, 4> stages{
        Stage{Particle::A, StageKind::Value},
        Stage{Particle::A, StageKind::Orientation},
        Stage{Particle::B, StageKind::Value},
        Stage{Particle::B, StageKind::Orientation}};
    std::array<int, 4> order{0, 1, 2, 3};
    std::vector<std::array<Stage, 4>> out;
    do {
        auto pos = [&](int s) {
            return std::find(order.begin(), order.end(), s) - order.begin();
        };
        if (pos(0) < pos(1) && pos(2) < pos(3)) {
            out.push_back({stages[order[0]], stages[order[1]],
                           stages[order[2]], stages[order[3]]});
        }
    } while (std::next_permutation(order.begin(), order.end()));
    return out;
}

auto sequential_distribution(const JointState &state,
                             std::span<const Stage> order) -> JointTable {
    const Apparatus apparatus(state.layout());
    JointTable table{};
    std::array<std::size_t, 2> exits{};
    branch(state, apparatus, order, 1.0, exits, table);
    return table;
}

// ---------------------------------------------------------------------------
// Literal states and oracles

auto literal_single_state(SpinValue value, const ParticleLayout &layout)
    -> LiteralState {
    const StateVector psi = literal_psi(value, layout);
    return {psi.normalized(), psi.norm()};
}

auto literal_pair_state(const ParticleLayout &layout) -> LiteralState {
    const StateVector up = literal_psi(SpinValue::Up, layout);
    StateVector expr = product(up, up);
    expr -= (1.0 / 3.0) * same_exit_sum(layout, SpinValue::Up);
    expr *= 1.0 / std::sqrt(6.0);
    return {expr.normalized(), expr.norm()};
}

auto literal_full_state(const ParticleLayout &layout) -> LiteralState {
    StateVector expr = StateVector::zeros(kJointDim);
    for (SpinValue va : spin::kSpinValues) {
        for (SpinValue vb : spin::kSpinValues) {
            expr += product(literal_psi(va, layout), literal_psi(vb, layout));
        }
    }
    for (SpinValue v : spin::kSpinValues) {
        expr -= (1.0 / 3.0) * same_exit_sum(layout, v);
    }
    expr *= 1.0 / std::sqrt(30.0);
    return {expr.normalized(), expr.norm()};
}

auto oracle_single_state(SpinValue value, const ParticleLayout &layout)
    -> StateVector {
    const StateVector path =
        three_port_bs().apply(StateVector::basis(kPathDim, 0));
    const StateVector spin_z = StateVector::basis(kSpinDim, value_index(value));
    StateVector psi = qcore::tensor(path, spin_z);

    // Port-controlled rotation: at port p, turn the z axis onto its magnet.
    Operator controlled = Operator::zeros(kParticleDim);
    for (std::size_t port = 0; port < kPathDim; ++port) {
        const Orientation o = layout.trine[layout.binding.slot_at_port(port)];
        controlled += qcore::kron(
            Operator::projector(StateVector::basis(kPathDim, port)),
            spin::rotation(o));
    }
    psi = controlled.apply(psi);

    const auto projectors = particle_value_projectors(layout);
    return qcore::project(value == SpinValue::Up ? projectors.up
                                                 : projectors.down,
                          psi)
        .post;
}

auto oracle_conditional_state(SpinValue value_a, SpinValue value_b,
                              const ParticleLayout &layout) -> JointState {
    const auto pa = value_projectors(Particle::A, layout);
    const auto pb = value_projectors(Particle::B, layout);
    const Operator &qa = value_a == SpinValue::Up ? pa.up : pa.down;
    const Operator &qb = value_b == SpinValue::Up ? pb.up : pb.down;
    auto proj = qcore::project(qa * qb, prepare_joint(layout).state());
    return JointState(std::move(proj.post), layout);
}

auto verify_states(const ParticleLayout &layout) -> VerificationReport {
    VerificationReport report;

    const auto single = literal_single_state(SpinValue::Up, layout);
    const StateVector single_oracle = oracle_single_state(SpinValue::Up, layout);
    report.equations.push_back(
        {"single_particle_value_fixed", single.literal_norm,
         qcore::fidelity(single.state, single_oracle),
         magnitude_overlap(single_exit_coefficients(single.state, layout),
                           single_exit_coefficients(single_oracle, layout))});

    const auto pair = literal_pair_state(layout);
    const JointState upup =
        oracle_conditional_state(SpinValue::Up, SpinValue::Up, layout);
    report.equations.push_back(
        {"pair_both_up", pair.literal_norm,
         qcore::fidelity(pair.state, upup.state()),
         magnitude_overlap(exit_coefficients(pair.state, layout),
                           exit_amplitudes(upup))});

    const auto full = literal_full_state(layout);
    const JointState prepared = prepare_joint(layout);
    report.equations.push_back(
        {"pair_all_values", full.literal_norm,
         qcore::fidelity(full.state, prepared.state()),
         magnitude_overlap(exit_coefficients(full.state, layout),
                           exit_coefficients(prepared.state(), layout))});

    const auto prepared_amps = exit_amplitudes(prepared);
    for (std::size_t ea = 0; ea < kExitCount; ++ea) {
        for (std::size_t eb = 0; eb < kExitCount; ++eb) {
            report.amplitude_table.push_back(
                {exit_name(ea), exit_name(eb),
                 prepared_amps[ea * kExitCount + eb]});
        }
    }

    const auto full_amps = exit_coefficients(full.state, layout);
    const auto upup_amps = exit_amplitudes(upup);
    auto add_zero_checks = [&](const std::string &prefix, const auto &amps,
                               bool up_only) {
        for (std::size_t e = 0; e < kExitCount; ++e) {
            if (up_only && e % 2 != 0) {
                continue;
            }
            const double mag = std::abs(amps[e * kExitCount + e]);
            report.zero_checks.push_back(
                {prefix + ":" + exit_name(e) + "|" + exit_name(e), mag,
                 mag <= kAnalyticZero});
        }
    };
    add_zero_checks("literal_all_values", full_amps, false);
    add_zero_checks("oracle_prepared", prepared_amps, false);
    add_zero_checks("oracle_both_up", upup_amps, true);

    report.notes = {
        "gamma^C factors in the literal pair expressions are read as "
        "gamma^A gamma^B.",
        "Literal states are evaluated with their printed prefactors "
        "(literal_norm) and then renormalized before any fidelity.",
        "The literal all-values state has uniform exit-basis magnitudes; the "
        "prepared singlet state does not. Its fidelity is reported, not "
        "asserted.",
        "fidelity_vs_oracle is sign-sensitive; magnitude_overlap compares "
        "exit-basis moduli only. The conditioned both-up oracle is "
        "antisymmetric under A<->B while the literal pair state is "
        "symmetric.",
    };
    return report;
}

void to_json(nlohmann::json &j, const VerificationReport &report) {
    j = nlohmann::json::object();
    auto &eqs = j["equations"] = nlohmann::json::array();
    for (const auto &e : report.equations) {
        eqs.push_back({{"name", e.name},
                       {"literal_norm", e.literal_norm},
                       {"fidelity_vs_oracle", e.fidelity_vs_oracle},
                       {"magnitude_overlap", e.magnitude_overlap}});
    }
    auto &table = j["amplitude_table"] = nlohmann::json::array();
    for (const auto &a : report.amplitude_table) {
        table.push_back({{"exit_A", a.exit_a},
                         {"exit_B", a.exit_b},
                         {"re", a.amplitude.real()},
                         {"im", a.amplitude.imag()},
                         {"magnitude", std::abs(a.amplitude)}});
    }
    auto &zeros = j["zero_checks"] = nlohmann::json::array();
    for (const auto &z : report.zero_checks) {
        zeros.push_back(
            {{"label", z.label}, {"magnitude", z.magnitude}, {"pass", z.pass}});
    }
    j["notes"] = report.notes;
}

} // namespace toolate::protocol

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

#include "toolate/interference.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace toolate::interference {

using protocol::kExitCount;
using protocol::kParticleDim;
using protocol::kPathDim;
using protocol::kSpinDim;
using qcore::Complex;
using spin::SpinValue;

namespace {

const qcore::Layout kSpinPair{kSpinDim, kSpinDim};

auto definite_exit_pair(const ParticleLayout &layout, std::size_t ea,
                        std::size_t eb) -> JointState {
    const auto a = protocol::exit_vector(layout,
                                         protocol::exit_label(layout.trine, ea));
    const auto b = protocol::exit_vector(layout,
                                         protocol::exit_label(layout.trine, eb));
    return JointState(qcore::tensor(a, b), layout);
}

} // namespace

PortDistribution::PortDistribution(std::array<double, 3> probs)
    : probs_(probs) {
    double total = 0.0;
    for (double p : probs_) {
        if (!(p >= 0.0)) {
            throw std::invalid_argument("port probabilities must be >= 0");
        }
        total += p;
    }
    if (std::abs(total - 1.0) > qcore::kDefaultTolerance) {
        throw std::invalid_argument("port probabilities must sum to 1");
    }
}

auto PortDistribution::uniform() -> PortDistribution { return {}; }

auto recombine(const StateVector &particle_state) -> PortDistribution {
    if (particle_state.dim() != kParticleDim) {
        throw qcore::DimensionMismatch("recombine expects a 6-dim state");
    }
    const auto out = qcore::apply_unitary(protocol::three_port_bs().adjoint(),
                                          particle_state,
                                          protocol::kParticleFactors, 0);
    std::array<double, 3> probs{};
    for (std::size_t port = 0; port < kPathDim; ++port) {
        for (std::size_t s = 0; s < kSpinDim; ++s) {
            probs[port] += std::norm(out[kSpinDim * port + s]);
        }
    }
    const double total = probs[0] + probs[1] + probs[2];
    for (double &p : probs) {
        p /= total;
    }
    return PortDistribution(probs);
}

auto total_variation(std::span<const double> p, std::span<const double> q)
    -> double {
    if (p.size() != q.size()) {
        throw qcore::DimensionMismatch("distributions differ in support size");
    }
    double sum = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        sum += std::abs(p[i] - q[i]);
    }
    return 0.5 * sum;
}

auto interference_discriminator(const PortDistribution &quantum,
                                const PortDistribution &model,
                                double threshold) -> Discrimination {
    const double tv =
        total_variation(quantum.probabilities(), model.probabilities());
    return {tv, tv > threshold};
}

auto sampled_discriminator(const std::array<std::uint64_t, 3> &counts,
                           const PortDistribution &model, double sigmas)
    -> SampledDiscrimination {
    const double n = static_cast<double>(counts[0] + counts[1] + counts[2]);
    if (n <= 0.0) {
        throw std::invalid_argument("no sampled counts");
    }
    double worst = 0.0;
    for (std::size_t port = 0; port < 3; ++port) {
        const double p = model[port];
        const double f = static_cast<double>(counts[port]) / n;
        const double var = p * (1.0 - p) / n;
        if (var <= 0.0) {
            // A model that is certain about this port: any deviation refutes it.
            if (std::abs(f - p) > 0.0) {
                worst = std::numeric_limits<double>::infinity();
            }
            continue;
        }
        worst = std::max(worst, std::abs(f - p) / std::sqrt(var));
    }
    return {worst, worst > sigmas};
}

auto erase_paths(const JointState &state) -> ErasureResult {
    const double u = 1.0 / std::sqrt(3.0);
    std::vector<Complex> spins(kSpinDim * kSpinDim);
    for (std::size_t pa = 0; pa < kPathDim; ++pa) {
        for (std::size_t sa = 0; sa < kSpinDim; ++sa) {
            for (std::size_t pb = 0; pb < kPathDim; ++pb) {
                for (std::size_t sb = 0; sb < kSpinDim; ++sb) {
                    const std::size_t a = kSpinDim * pa + sa;
                    const std::size_t b = kSpinDim * pb + sb;
                    spins[kSpinDim * sa + sb] +=
                        u * u * state.state()[a * kParticleDim + b];
                }
            }
        }
    }
    const StateVector residual(std::move(spins));
    const double success = residual.norm_squared();
    if (success <= qcore::kZeroProbability) {
        throw qcore::ZeroProbability(success);
    }
    StateVector post = residual.normalized();
    const auto rho = qcore::reduced_density(post, kSpinPair,
                                            std::array<std::size_t, 1>{0});
    const double bits = qcore::entanglement_entropy(rho);
    const double fid = qcore::fidelity(post, spin::singlet());
    return {std::min(success, 1.0), std::move(post), bits, fid};
}

auto erase_definite_paths(const JointTable &weights,
                          const ParticleLayout &layout) -> MixtureErasure {
    MixtureErasure out{0.0, 0.0, 0.0};
    double total = 0.0;
    double singlet_weight = 0.0;
    for (std::size_t ea = 0; ea < kExitCount; ++ea) {
        for (std::size_t eb = 0; eb < kExitCount; ++eb) {
            const double w = weights[ea * kExitCount + eb];
            if (w <= 0.0) {
                continue;
            }
            const auto r = erase_paths(definite_exit_pair(layout, ea, eb));
            total += w;
            out.success_prob += w * r.success_prob;
            out.entanglement_bits += w * r.entanglement_bits;
            singlet_weight += w * r.success_prob * r.fidelity_to_singlet;
        }
    }
    if (total <= 0.0) {
        throw std::invalid_argument("mixture has no weight");
    }
    out.success_prob /= total;
    out.entanglement_bits /= total;
    out.fidelity_to_singlet = singlet_weight / (out.success_prob * total);
    return out;
}

auto swap_report(const ParticleLayout &layout) -> SwapReport {
    SwapReport report;
    auto add = [&](std::string name, const JointState &s) {
        const auto r = erase_paths(s);
        report.rows.push_back({std::move(name), r.success_prob,
                               r.entanglement_bits, r.fidelity_to_singlet});
    };
    const JointState prepared = protocol::prepare_joint(layout);
    add("prepared", prepared);
    for (SpinValue va : spin::kSpinValues) {
        for (SpinValue vb : spin::kSpinValues) {
            add(spin::to_string(va) + "_" + spin::to_string(vb),
                protocol::oracle_conditional_state(va, vb, layout));
        }
    }
    report.contrast_model = "definite_path_mixture";
    report.contrast = erase_definite_paths(
        protocol::joint_distribution(prepared), layout);
    report.notes = {
        "After erasure the residual spin registers carry the swapped "
        "entanglement; no atom-to-photon polarization mapping is modelled.",
        "Erasure keeps only the symmetric detector outcome; its complement is "
        "reported as 1 - success_prob.",
        "The contrast mixture assigns each pair a definite exit pair with the "
        "quantum exit statistics.",
    };
    return report;
}

void to_json(nlohmann::json &j, const SwapReport &report) {
    j = nlohmann::json::object();
    auto &rows = j["rows"] = nlohmann::json::array();
    for (const auto &r : report.rows) {
        rows.push_back({{"condition", r.condition},
                        {"success_prob", r.success_prob},
                        {"entanglement_bits", r.entanglement_bits},
                        {"fidelity_to_singlet", r.fidelity_to_singlet}});
    }
    j["contrast"] = {
        {"model", report.contrast_model},
        {"values",
         {{"success_prob", report.contrast.success_prob},
          {"entanglement_bits", report.contrast.entanglement_bits},
          {"fidelity_to_singlet", report.contrast.fidelity_to_singlet}}}};
    j["notes"] = report.notes;
}

} // namespace toolate::interference

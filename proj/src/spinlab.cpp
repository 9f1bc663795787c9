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

#include "toolate/spinlab.hpp"

#include <cmath>
#include <stdexcept>

namespace toolate::spin {

Orientation::Orientation(double radians) {
    if (!std::isfinite(radians)) {
        throw std::invalid_argument("orientation angle must be finite");
    }
    double t = std::fmod(radians, kTwoPi);
    if (t < 0.0) {
        t += kTwoPi;
    }
    if (t >= kTwoPi) {
        t = 0.0;
    }
    theta_ = t;
}

auto Orientation::from_degrees(double degrees) -> Orientation {
    return Orientation(degrees * std::numbers::pi / 180.0);
}

auto Orientation::degrees() const noexcept -> double {
    return theta_ * 180.0 / std::numbers::pi;
}

auto to_string(SpinValue v) -> std::string {
    return v == SpinValue::Up ? "up" : "down";
}

auto sign(SpinValue v) -> int { return v == SpinValue::Up ? 1 : -1; }

TrineSet::TrineSet()
    : TrineSet(Orientation(0.0), Orientation(kTwoPi / 3.0),
               Orientation(2.0 * (kTwoPi / 3.0))) {}

TrineSet::TrineSet(Orientation alpha, Orientation beta, Orientation gamma)
    : axes_{alpha, beta, gamma} {
    if (alpha == beta || alpha == gamma || beta == gamma) {
        throw std::invalid_argument("trine orientations must be distinct");
    }
}

auto TrineSet::index_of(Orientation o) const -> std::optional<std::size_t> {
    for (std::size_t i = 0; i < axes_.size(); ++i) {
        if (axes_[i] == o) {
            return i;
        }
    }
    return std::nullopt;
}

auto slot_name(std::size_t slot) -> std::string {
    static const std::array<std::string, 3> names{"alpha", "beta", "gamma"};
    return names.at(slot);
}

auto spin_eigenstates(Orientation o) -> SpinPair {
    const double half = 0.5 * o.radians();
    const double c = std::cos(half);
    const double s = std::sin(half);
    return {StateVector{c, s}, StateVector{-s, c}};
}

auto spin_eigenstate(Orientation o, SpinValue v) -> StateVector {
    auto pair = spin_eigenstates(o);
    return v == SpinValue::Up ? std::move(pair.up) : std::move(pair.down);
}

auto sgm_projectors(Orientation o) -> SgmProjectors {
    const auto [up, down] = spin_eigenstates(o);
    return {Operator::outer(up, up), Operator::outer(down, down)};
}

auto singlet() -> StateVector {
    const double h = 1.0 / std::numbers::sqrt2;
    return StateVector{0.0, h, -h, 0.0};
}

auto rotation(Orientation o) -> Operator {
    const double half = 0.5 * o.radians();
    const double c = std::cos(half);
    const double s = std::sin(half);
    return Operator{{c, -s}, {s, c}};
}

auto correlation_exact(Orientation a, Orientation b) -> double {
    const auto pa = sgm_projectors(a);
    const auto pb = sgm_projectors(b);
    const StateVector psi = singlet();
    double e = 0.0;
    for (SpinValue va : kSpinValues) {
        const Operator &qa = va == SpinValue::Up ? pa.up : pa.down;
        for (SpinValue vb : kSpinValues) {
            const Operator &qb = vb == SpinValue::Up ? pb.up : pb.down;
            const double p = qcore::born_probability(qcore::kron(qa, qb), psi);
            e += sign(va) * sign(vb) * p;
        }
    }
    return e;
}

auto chsh_value(Orientation a, Orientation a_prime, Orientation b,
                Orientation b_prime) -> double {
    return chsh_combination(
        correlation_exact(a, b), correlation_exact(a, b_prime),
        correlation_exact(a_prime, b), correlation_exact(a_prime, b_prime));
}

} // namespace toolate::spin

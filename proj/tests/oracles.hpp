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

// Closed-form oracles written directly in the exit basis. They use scalar
// trigonometry only, never the library's state vectors or projectors.
//
// On the prepared state every port amplitude is 1/sqrt3, so
//   <(a,v),(b,w)|prepared> = (1/3) <v(a) w(b)|singlet>
// and for real spinors <x y|singlet> = (x0 y1 - x1 y0)/sqrt2.

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <numbers>

#include "toolate/spinlab.hpp"

namespace toolate::testing::oracle {

using Table = std::array<double, 36>;
using Amps = std::array<std::complex<double>, 36>;

inline auto spinor(double theta, bool up) -> std::array<double, 2> {
    const double c = std::cos(theta / 2);
    const double s = std::sin(theta / 2);
    return up ? std::array<double, 2>{c, s} : std::array<double, 2>{-s, c};
}

inline auto singlet_overlap(double a, bool va_up, double b, bool vb_up)
    -> double {
    const auto x = spinor(a, va_up);
    const auto y = spinor(b, vb_up);
    return (x[0] * y[1] - x[1] * y[0]) / std::numbers::sqrt2;
}

// Exit index 2*slot + (0 for up, 1 for down).
inline auto prepared_exit_amplitude(const spin::TrineSet &trine, std::size_t ea,
                                    std::size_t eb) -> double {
    return singlet_overlap(trine[ea / 2].radians(), ea % 2 == 0,
                           trine[eb / 2].radians(), eb % 2 == 0) /
           3.0;
}

inline auto prepared_joint_table(const spin::TrineSet &trine) -> Table {
    Table t{};
    for (std::size_t ea = 0; ea < 6; ++ea) {
        for (std::size_t eb = 0; eb < 6; ++eb) {
            const double a = prepared_exit_amplitude(trine, ea, eb);
            t[ea * 6 + eb] = a * a;
        }
    }
    return t;
}

inline auto value_pair_probability(const spin::TrineSet &trine,
                                   spin::SpinValue va, spin::SpinValue vb)
    -> double {
    const std::size_t oa = va == spin::SpinValue::Up ? 0 : 1;
    const std::size_t ob = vb == spin::SpinValue::Up ? 0 : 1;
    double p = 0.0;
    for (std::size_t sa = 0; sa < 3; ++sa) {
        for (std::size_t sb = 0; sb < 3; ++sb) {
            const double a = prepared_exit_amplitude(trine, 2 * sa + oa, 2 * sb + ob);
            p += a * a;
        }
    }
    return p;
}

inline auto conditional_exit_amplitudes(const spin::TrineSet &trine,
                                        spin::SpinValue va, spin::SpinValue vb)
    -> Amps {
    const std::size_t oa = va == spin::SpinValue::Up ? 0 : 1;
    const std::size_t ob = vb == spin::SpinValue::Up ? 0 : 1;
    const double norm = std::sqrt(value_pair_probability(trine, va, vb));
    Amps out{};
    for (std::size_t sa = 0; sa < 3; ++sa) {
        for (std::size_t sb = 0; sb < 3; ++sb) {
            const std::size_t ea = 2 * sa + oa;
            const std::size_t eb = 2 * sb + ob;
            out[ea * 6 + eb] = prepared_exit_amplitude(trine, ea, eb) / norm;
        }
    }
    return out;
}

// Printed pair expression in exit coordinates: 1/3 on every up-up pair from
// the product term, minus 1/3 on the three same-slot pairs, times 1/sqrt6.
inline auto literal_pair_norm() -> double {
    double n2 = 0.0;
    for (std::size_t sa = 0; sa < 3; ++sa) {
        for (std::size_t sb = 0; sb < 3; ++sb) {
            const double c = (1.0 / 3.0 - (sa == sb ? 1.0 / 3.0 : 0.0)) / std::sqrt(6.0);
            n2 += c * c;
        }
    }
    return std::sqrt(n2);
}

inline auto literal_full_norm() -> double {
    double n2 = 0.0;
    for (std::size_t ea = 0; ea < 6; ++ea) {
        for (std::size_t eb = 0; eb < 6; ++eb) {
            const double c = (1.0 / 3.0 - (ea == eb ? 1.0 / 3.0 : 0.0)) / std::sqrt(30.0);
            n2 += c * c;
        }
    }
    return std::sqrt(n2);
}

/// |<normalized literal full state|prepared>|^2 in exit coordinates.
inline auto full_state_fidelity(const spin::TrineSet &trine) -> double {
    double overlap = 0.0;
    for (std::size_t ea = 0; ea < 6; ++ea) {
        for (std::size_t eb = 0; eb < 6; ++eb) {
            if (ea != eb) {
                overlap += prepared_exit_amplitude(trine, ea, eb) / std::sqrt(30.0);
            }
        }
    }
    return overlap * overlap;
}

// Residual spin pair after projecting both paths onto the uniform port
// superposition: (1/3) sum c(ea,eb) |v(ea)> |v(eb)>, unnormalized.
inline auto erased_spins(const spin::TrineSet &trine, const Amps &amps)
    -> std::array<std::complex<double>, 4> {
    std::array<std::complex<double>, 4> out{};
    for (std::size_t ea = 0; ea < 6; ++ea) {
        for (std::size_t eb = 0; eb < 6; ++eb) {
            const auto x = spinor(trine[ea / 2].radians(), ea % 2 == 0);
            const auto y = spinor(trine[eb / 2].radians(), eb % 2 == 0);
            for (std::size_t i = 0; i < 2; ++i) {
                for (std::size_t j = 0; j < 2; ++j) {
                    out[2 * i + j] += amps[ea * 6 + eb] * x[i] * y[j] / 3.0;
                }
            }
        }
    }
    return out;
}

/// Entropy in bits of one half of a two-qubit pure state.
inline auto two_qubit_entropy(const std::array<std::complex<double>, 4> &psi)
    -> double {
    // Concurrence route: C = 2|ad - bc| for a normalized state.
    const double c = 2.0 * std::abs(psi[0] * psi[3] - psi[1] * psi[2]);
    const double x = (1.0 + std::sqrt(std::max(0.0, 1.0 - c * c))) / 2.0;
    auto h = [](double p) { return p <= 0.0 ? 0.0 : -p * std::log2(p); };
    return h(x) + h(1.0 - x);
}

} // namespace toolate::testing::oracle

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
 * Spin-1/2 conventions for coplanar Stern-Gerlach measurements: orientations,
 * the singlet pair, and exact Bell correlations.
 *
 * Spin states carry real amplitudes in the z basis. Along an axis at angle
 * theta in the measurement plane,
 *
 *     up(theta)   = ( cos(theta/2), sin(theta/2))
 *     down(theta) = (-sin(theta/2), cos(theta/2))
 *
 * with theta reduced to [0, 2pi) first. Because of the half angle, the sign
 * of a spinor depends on that representative; all sign-sensitive results in
 * this project use it consistently.
 */

#pragma once

#include <array>
#include <numbers>
#include <optional>
#include <string>

#include "toolate/qcore.hpp"

namespace toolate::spin {

using qcore::Operator;
using qcore::StateVector;

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Measurement axis in the fixed plane; the angle is kept in [0, 2pi).
class Orientation {
  public:
    constexpr Orientation() = default;
    explicit Orientation(double radians);
    static auto from_degrees(double degrees) -> Orientation;

    [[nodiscard]] auto radians() const noexcept -> double { return theta_; }
    [[nodiscard]] auto degrees() const noexcept -> double;

    // Exact comparison after normalization.
    friend auto operator==(Orientation, Orientation) -> bool = default;

  private:
    double theta_ = 0.0;
};

enum class SpinValue { Up, Down };

inline constexpr std::array<SpinValue, 2> kSpinValues{SpinValue::Up,
                                                      SpinValue::Down};

auto to_string(SpinValue v) -> std::string;
/// +1 for Up, -1 for Down.
auto sign(SpinValue v) -> int;

/// Three distinct coplanar orientations (alpha, beta, gamma).
class TrineSet {
  public:
    /// The symmetric trine (0, 2pi/3, 4pi/3).
    TrineSet();
    TrineSet(Orientation alpha, Orientation beta, Orientation gamma);

    [[nodiscard]] auto operator[](std::size_t i) const -> Orientation {
        return axes_[i];
    }
    [[nodiscard]] auto axes() const noexcept
        -> const std::array<Orientation, 3> & {
        return axes_;
    }
    /// Position of @p o in (alpha, beta, gamma), if present.
    [[nodiscard]] auto index_of(Orientation o) const
        -> std::optional<std::size_t>;
    [[nodiscard]] auto contains(Orientation o) const -> bool {
        return index_of(o).has_value();
    }

    friend auto operator==(const TrineSet &, const TrineSet &)
        -> bool = default;

  private:
    std::array<Orientation, 3> axes_;
};

/// Name of trine slot 0/1/2: "alpha", "beta", "gamma".
auto slot_name(std::size_t slot) -> std::string;

struct SpinPair {
    StateVector up;
    StateVector down;
};

auto spin_eigenstates(Orientation o) -> SpinPair;
auto spin_eigenstate(Orientation o, SpinValue v) -> StateVector;

struct SgmProjectors {
    Operator up;
    Operator down;
};

/// Exit projectors of a Stern-Gerlach magnet aligned with @p o.
auto sgm_projectors(Orientation o) -> SgmProjectors;

/// (|up_z down_z> - |down_z up_z>)/sqrt(2), amplitudes (0, 1/sqrt2, -1/sqrt2, 0).
auto singlet() -> StateVector;

/// Real rotation in the measurement plane mapping up(0) to up(o).
auto rotation(Orientation o) -> Operator;

/**
 * @brief E(a, b) on the singlet, by enumerating the four joint SGM outcomes.
 *
 * Equals -cos(a - b).
 */
auto correlation_exact(Orientation a, Orientation b) -> double;

/// CHSH combination S = E(a,b) - E(a,b') + E(a',b) + E(a',b').
auto chsh_value(Orientation a, Orientation a_prime, Orientation b,
                Orientation b_prime) -> double;

/// The same combination applied to four precomputed correlations.
constexpr auto chsh_combination(double e_ab, double e_ab_prime,
                                double e_a_prime_b,
                                double e_a_prime_b_prime) -> double {
    return e_ab - e_ab_prime + e_a_prime_b + e_a_prime_b_prime;
}

} // namespace toolate::spin

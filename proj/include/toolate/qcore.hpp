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
 * Dense complex linear algebra for small fixed-dimension quantum states:
 * state vectors, operators, projective measurement, partial traces and
 * entanglement measures. Every dimension in this project is at most 36, so
 * everything is stored densely in row-major order.
 */

#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace toolate::qcore {

using Complex = std::complex<double>;

/// Probabilities at or below this value are treated as analytic zeros.
inline constexpr double kZeroProbability = 1e-12;
/// Default tolerance for unitarity, projector and normalization checks.
inline constexpr double kDefaultTolerance = 1e-10;

/// Raised when a projection has (numerically) zero probability.
class ZeroProbability : public std::runtime_error {
  public:
    explicit ZeroProbability(double prob);
    [[nodiscard]] auto probability() const noexcept -> double { return prob_; }

  private:
    double prob_;
};

/// Raised when a measurement partition is not a complete set of orthogonal
/// projectors.
class InvalidPartition : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

/// Raised on incompatible dimensions or register layouts.
class DimensionMismatch : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

/**
 * @brief Dense complex amplitude vector over a fixed computational basis.
 *
 * A StateVector is not required to be normalized: literal expressions are
 * built as unnormalized vectors and then normalized explicitly.
 */
class StateVector {
  public:
    StateVector() = default;
    explicit StateVector(std::vector<Complex> amps);
    StateVector(std::initializer_list<Complex> amps);

    /// Computational basis vector |index> of the given dimension.
    static auto basis(std::size_t dim, std::size_t index) -> StateVector;
    static auto zeros(std::size_t dim) -> StateVector;

    [[nodiscard]] auto dim() const noexcept -> std::size_t {
        return amps_.size();
    }
    [[nodiscard]] auto amplitudes() const noexcept -> std::span<const Complex> {
        return amps_;
    }
    [[nodiscard]] auto operator[](std::size_t i) const -> const Complex & {
        return amps_[i];
    }
    auto operator[](std::size_t i) -> Complex & { return amps_[i]; }

    [[nodiscard]] auto norm_squared() const -> double;
    [[nodiscard]] auto norm() const -> double;
    [[nodiscard]] auto is_normalized(double tol = kDefaultTolerance) const
        -> bool;
    /// Returns this vector scaled to unit norm. Throws ZeroProbability for a
    /// (numerically) zero vector.
    [[nodiscard]] auto normalized() const -> StateVector;

    /// <this|other>
    [[nodiscard]] auto inner(const StateVector &other) const -> Complex;

    auto operator+=(const StateVector &rhs) -> StateVector &;
    auto operator-=(const StateVector &rhs) -> StateVector &;
    auto operator*=(Complex s) -> StateVector &;

    friend auto operator+(StateVector lhs, const StateVector &rhs)
        -> StateVector {
        return lhs += rhs;
    }
    friend auto operator-(StateVector lhs, const StateVector &rhs)
        -> StateVector {
        return lhs -= rhs;
    }
    friend auto operator*(Complex s, StateVector v) -> StateVector {
        return v *= s;
    }
    friend auto operator*(StateVector v, Complex s) -> StateVector {
        return v *= s;
    }

  private:
    std::vector<Complex> amps_;
};

/// Dense square complex matrix, row-major.
class Operator {
  public:
    Operator() = default;
    Operator(std::size_t dim, std::vector<Complex> entries);
    Operator(std::initializer_list<std::initializer_list<Complex>> rows);

    static auto identity(std::size_t dim) -> Operator;
    static auto zeros(std::size_t dim) -> Operator;
    /// |ket><bra|
    static auto outer(const StateVector &ket, const StateVector &bra)
        -> Operator;
    /// Rank-1 projector |v><v| onto a normalized vector.
    static auto projector(const StateVector &v) -> Operator;

    [[nodiscard]] auto dim() const noexcept -> std::size_t { return dim_; }
    [[nodiscard]] auto operator()(std::size_t r, std::size_t c) const
        -> const Complex & {
        return data_[r * dim_ + c];
    }
    auto operator()(std::size_t r, std::size_t c) -> Complex & {
        return data_[r * dim_ + c];
    }
    [[nodiscard]] auto entries() const noexcept -> std::span<const Complex> {
        return data_;
    }

    [[nodiscard]] auto adjoint() const -> Operator;
    [[nodiscard]] auto apply(const StateVector &v) const -> StateVector;
    /// <v|this|v>
    [[nodiscard]] auto expectation(const StateVector &v) const -> Complex;

    /// Max-abs entrywise distance.
    [[nodiscard]] auto distance(const Operator &other) const -> double;
    [[nodiscard]] auto is_unitary(double tol = kDefaultTolerance) const -> bool;
    [[nodiscard]] auto is_hermitian(double tol = kDefaultTolerance) const
        -> bool;
    [[nodiscard]] auto is_projector(double tol = kDefaultTolerance) const
        -> bool;

    auto operator+=(const Operator &rhs) -> Operator &;
    auto operator-=(const Operator &rhs) -> Operator &;
    auto operator*=(Complex s) -> Operator &;

    friend auto operator+(Operator lhs, const Operator &rhs) -> Operator {
        return lhs += rhs;
    }
    friend auto operator-(Operator lhs, const Operator &rhs) -> Operator {
        return lhs -= rhs;
    }
    friend auto operator*(Complex s, Operator m) -> Operator { return m *= s; }
    friend auto operator*(const Operator &lhs, const Operator &rhs)
        -> Operator;

  private:
    std::size_t dim_ = 0;
    std::vector<Complex> data_;
};

/// Kronecker product A (outer index) ⊗ B (inner index).
auto kron(const Operator &a, const Operator &b) -> Operator;

/// Hermitian, unit-trace matrix describing a (possibly mixed) state.
class DensityMatrix {
  public:
    /// Wraps a matrix after checking hermiticity, unit trace and
    /// non-negativity of the spectrum (all within @p tol).
    explicit DensityMatrix(Operator matrix, double tol = kDefaultTolerance);
    static auto pure(const StateVector &psi) -> DensityMatrix;

    [[nodiscard]] auto dim() const noexcept -> std::size_t {
        return matrix_.dim();
    }
    [[nodiscard]] auto matrix() const noexcept -> const Operator & {
        return matrix_;
    }
    [[nodiscard]] auto operator()(std::size_t r, std::size_t c) const
        -> const Complex & {
        return matrix_(r, c);
    }
    [[nodiscard]] auto trace() const -> Complex;
    /// Eigenvalues in ascending order.
    [[nodiscard]] auto eigenvalues() const -> std::vector<double>;

  private:
    Operator matrix_;
};

/// Dimensions of the tensor factors of a composite register, outermost first.
using Layout = std::vector<std::size_t>;

/// u ⊗ v with the u-index outer. Both inputs must be normalized.
auto tensor(const StateVector &u, const StateVector &v) -> StateVector;

/// (I ⊗ U ⊗ I)|state> with @p u acting on factor @p target of @p layout.
auto apply_unitary(const Operator &u, const StateVector &state,
                   std::span<const std::size_t> layout, std::size_t target)
    -> StateVector;

/// Lifts a single-factor operator to the full register: I ⊗ op ⊗ I.
auto embed(const Operator &op, std::span<const std::size_t> layout,
           std::size_t target) -> Operator;

struct Projection {
    double prob;
    StateVector post;
};

/// Born probability of @p p and the renormalized post-measurement state.
/// Throws ZeroProbability when prob <= kZeroProbability.
auto project(const Operator &p, const StateVector &state) -> Projection;

/// Born probability <state|P|state>, clamped to [0, 1].
auto born_probability(const Operator &p, const StateVector &state) -> double;

/// splitmix64 finalizer used to derive independent per-trial seeds.
auto mix64(std::uint64_t master_seed, std::uint64_t stream) noexcept
    -> std::uint64_t;

/**
 * @brief Seeded generator. std::mt19937_64 output is fixed by the standard;
 * uniform doubles are built from its top 53 bits rather than through
 * std::uniform_real_distribution, so draws are bit-identical everywhere.
 */
class Rng {
  public:
    explicit Rng(std::uint64_t seed);
    /// Uniform on [0, 1).
    auto uniform() -> double;
    auto next_u64() -> std::uint64_t;
    [[nodiscard]] auto seed() const noexcept -> std::uint64_t { return seed_; }

  private:
    std::uint64_t seed_;
    std::mt19937_64 engine_;
};

/// A complete set of mutually orthogonal projectors, validated once.
class Partition {
  public:
    explicit Partition(std::vector<Operator> projectors,
                       double tol = kDefaultTolerance);
    [[nodiscard]] auto size() const noexcept -> std::size_t {
        return projectors_.size();
    }
    [[nodiscard]] auto operator[](std::size_t i) const -> const Operator & {
        return projectors_[i];
    }
    [[nodiscard]] auto dim() const noexcept -> std::size_t {
        return projectors_.front().dim();
    }

  private:
    std::vector<Operator> projectors_;
};

struct Sample {
    std::size_t index;
    StateVector post;
    double prob;
};

/// Draws an outcome with Born probabilities. Outcomes with probability at or
/// below kZeroProbability are never selected.
auto sample(const StateVector &state, const Partition &partition, Rng &rng)
    -> Sample;

/// Partial trace keeping the factors listed in @p keep (in layout order).
auto reduced_density(const StateVector &state,
                     std::span<const std::size_t> layout,
                     std::span<const std::size_t> keep) -> DensityMatrix;

/// Eigenvalues of a Hermitian matrix, ascending. 2x2 uses the closed form,
/// larger matrices a cyclic Jacobi sweep on the real symmetric embedding.
auto hermitian_eigenvalues(const Operator &h, double tol = 1e-12)
    -> std::vector<double>;

/// Von Neumann entropy in bits; eigenvalues <= 1e-12 contribute nothing.
auto entanglement_entropy(const DensityMatrix &rho) -> double;

/// |<a|b>|^2
auto fidelity(const StateVector &a, const StateVector &b) -> double;

} // namespace toolate::qcore

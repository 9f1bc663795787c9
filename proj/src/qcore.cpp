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

#include "toolate/qcore.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace toolate::qcore {

namespace {

void require_finite(std::span<const Complex> values) {
    for (const auto &z : values) {
        if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) {
            throw std::invalid_argument("non-finite amplitude");
        }
    }
}

void require_same_dim(std::size_t a, std::size_t b, const char *what) {
    if (a != b) {
        std::ostringstream os;
        os << what << ": dimension " << a << " vs " << b;
        throw DimensionMismatch(os.str());
    }
}

auto layout_size(std::span<const std::size_t> layout) -> std::size_t {
    return std::accumulate(layout.begin(), layout.end(), std::size_t{1},
                           std::multiplies<>{});
}

// Stride of factor k in a row-major layout.
auto stride_of(std::span<const std::size_t> layout, std::size_t k)
    -> std::size_t {
    std::size_t stride = 1;
    for (std::size_t j = k + 1; j < layout.size(); ++j) {
        stride *= layout[j];
    }
    return stride;
}

} // namespace

ZeroProbability::ZeroProbability(double prob)
    : std::runtime_error("projection has zero probability (p = " +
                         std::to_string(prob) + ")"),
      prob_(prob) {}

// ---------------------------------------------------------------------------
// StateVector

StateVector::StateVector(std::vector<Complex> amps) : amps_(std::move(amps)) {
    if (amps_.empty()) {
        throw DimensionMismatch("state vector must have positive dimension");
    }
    require_finite(amps_);
}

StateVector::StateVector(std::initializer_list<Complex> amps)
    : StateVector(std::vector<Complex>(amps)) {}

auto StateVector::basis(std::size_t dim, std::size_t index) -> StateVector {
    if (index >= dim) {
        throw DimensionMismatch("basis index out of range");
    }
    std::vector<Complex> amps(dim);
    amps[index] = 1.0;
    return StateVector(std::move(amps));
}

auto StateVector::zeros(std::size_t dim) -> StateVector {
    return StateVector(std::vector<Complex>(dim));
}

auto StateVector::norm_squared() const -> double {
    double sum = 0.0;
    for (const auto &a : amps_) {
        sum += std::norm(a);
    }
    return sum;
}

auto StateVector::norm() const -> double { return std::sqrt(norm_squared()); }

auto StateVector::is_normalized(double tol) const -> bool {
    return std::abs(norm_squared() - 1.0) <= tol;
}

auto StateVector::normalized() const -> StateVector {
    const double n2 = norm_squared();
    if (n2 <= kZeroProbability) {
        throw ZeroProbability(n2);
    }
    StateVector out = *this;
    out *= 1.0 / std::sqrt(n2);
    return out;
}

auto StateVector::inner(const StateVector &other) const -> Complex {
    require_same_dim(dim(), other.dim(), "inner product");
    Complex sum = 0.0;
    for (std::size_t i = 0; i < amps_.size(); ++i) {
        sum += std::conj(amps_[i]) * other.amps_[i];
    }
    return sum;
}

auto StateVector::operator+=(const StateVector &rhs) -> StateVector & {
    require_same_dim(dim(), rhs.dim(), "state sum");
    for (std::size_t i = 0; i < amps_.size(); ++i) {
        amps_[i] += rhs.amps_[i];
    }
    return *this;
}

auto StateVector::operator-=(const StateVector &rhs) -> StateVector & {
    require_same_dim(dim(), rhs.dim(), "state difference");
    for (std::size_t i = 0; i < amps_.size(); ++i) {
        amps_[i] -= rhs.amps_[i];
    }
    return *this;
}

auto StateVector::operator*=(Complex s) -> StateVector & {
    for (auto &a : amps_) {
        a *= s;
    }
    return *this;
}

// ---------------------------------------------------------------------------
// Operator

Operator::Operator(std::size_t dim, std::vector<Complex> entries)
    : dim_(dim), data_(std::move(entries)) {
    if (dim_ == 0 || data_.size() != dim_ * dim_) {
        throw DimensionMismatch("operator entries do not form a square matrix");
    }
    require_finite(data_);
}

Operator::Operator(std::initializer_list<std::initializer_list<Complex>> rows)
    : dim_(rows.size()) {
    data_.reserve(dim_ * dim_);
    for (const auto &row : rows) {
        if (row.size() != dim_) {
            throw DimensionMismatch("operator rows must form a square matrix");
        }
        data_.insert(data_.end(), row.begin(), row.end());
    }
    if (dim_ == 0) {
        throw DimensionMismatch("operator must have positive dimension");
    }
    require_finite(data_);
}

auto Operator::identity(std::size_t dim) -> Operator {
    Operator out = zeros(dim);
    for (std::size_t i = 0; i < dim; ++i) {
        out(i, i) = 1.0;
    }
    return out;
}

auto Operator::zeros(std::size_t dim) -> Operator {
    return Operator(dim, std::vector<Complex>(dim * dim));
}

auto Operator::outer(const StateVector &ket, const StateVector &bra)
    -> Operator {
    require_same_dim(ket.dim(), bra.dim(), "outer product");
    const std::size_t n = ket.dim();
    Operator out = zeros(n);
    for (std::size_t r = 0; r < n; ++r) {
        for (std::size_t c = 0; c < n; ++c) {
            out(r, c) = ket[r] * std::conj(bra[c]);
        }
    }
    return out;
}

auto Operator::projector(const StateVector &v) -> Operator {
    if (!v.is_normalized()) {
        throw std::invalid_argument("projector requires a normalized vector");
    }
    return outer(v, v);
}

auto Operator::adjoint() const -> Operator {
    Operator out = zeros(dim_);
    for (std::size_t r = 0; r < dim_; ++r) {
        for (std::size_t c = 0; c < dim_; ++c) {
            out(c, r) = std::conj((*this)(r, c));
        }
    }
    return out;
}

auto Operator::apply(const StateVector &v) const -> StateVector {
    require_same_dim(dim_, v.dim(), "operator application");
    std::vector<Complex> out(dim_);
    for (std::size_t r = 0; r < dim_; ++r) {
        Complex acc = 0.0;
        const Complex *row = &data_[r * dim_];
        for (std::size_t c = 0; c < dim_; ++c) {
            // Projectors built here are mostly zeros.
            if (row[c] != Complex{}) {
                acc += row[c] * v[c];
            }
        }
        out[r] = acc;
    }
    return StateVector(std::move(out));
}

auto Operator::expectation(const StateVector &v) const -> Complex {
    return v.inner(apply(v));
}

auto Operator::distance(const Operator &other) const -> double {
    require_same_dim(dim_, other.dim_, "operator distance");
    double worst = 0.0;
    for (std::size_t i = 0; i < data_.size(); ++i) {
        worst = std::max(worst, std::abs(data_[i] - other.data_[i]));
    }
    return worst;
}

auto Operator::is_unitary(double tol) const -> bool {
    return (adjoint() * (*this)).distance(identity(dim_)) <= tol;
}

auto Operator::is_hermitian(double tol) const -> bool {
    return distance(adjoint()) <= tol;
}

auto Operator::is_projector(double tol) const -> bool {
    return is_hermitian(tol) && ((*this) * (*this)).distance(*this) <= tol;
}

auto Operator::operator+=(const Operator &rhs) -> Operator & {
    require_same_dim(dim_, rhs.dim_, "operator sum");
    for (std::size_t i = 0; i < data_.size(); ++i) {
        data_[i] += rhs.data_[i];
    }
    return *this;
}

auto Operator::operator-=(const Operator &rhs) -> Operator & {
    require_same_dim(dim_, rhs.dim_, "operator difference");
    for (std::size_t i = 0; i < data_.size(); ++i) {
        data_[i] -= rhs.data_[i];
    }
    return *this;
}

auto Operator::operator*=(Complex s) -> Operator & {
    for (auto &x : data_) {
        x *= s;
    }
    return *this;
}

auto operator*(const Operator &lhs, const Operator &rhs) -> Operator {
    require_same_dim(lhs.dim_, rhs.dim_, "operator product");
    const std::size_t n = lhs.dim_;
    Operator out = Operator::zeros(n);
    for (std::size_t r = 0; r < n; ++r) {
        for (std::size_t k = 0; k < n; ++k) {
            const Complex a = lhs(r, k);
            if (a == Complex{}) {
                continue;
            }
            for (std::size_t c = 0; c < n; ++c) {
                out(r, c) += a * rhs(k, c);
            }
        }
    }
    return out;
}

auto kron(const Operator &a, const Operator &b) -> Operator {
    const std::size_t na = a.dim();
    const std::size_t nb = b.dim();
    Operator out = Operator::zeros(na * nb);
    for (std::size_t i = 0; i < na; ++i) {
        for (std::size_t j = 0; j < na; ++j) {
            for (std::size_t k = 0; k < nb; ++k) {
                for (std::size_t l = 0; l < nb; ++l) {
                    out(i * nb + k, j * nb + l) = a(i, j) * b(k, l);
                }
            }
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// DensityMatrix

DensityMatrix::DensityMatrix(Operator matrix, double tol)
    : matrix_(std::move(matrix)) {
    if (!matrix_.is_hermitian(tol)) {
        throw std::invalid_argument("density matrix must be Hermitian");
    }
    if (std::abs(trace() - Complex{1.0}) > tol) {
        throw std::invalid_argument("density matrix must have unit trace");
    }
    const auto evs = hermitian_eigenvalues(matrix_);
    if (!evs.empty() && evs.front() < -tol) {
        throw std::invalid_argument("density matrix has a negative eigenvalue");
    }
}

auto DensityMatrix::pure(const StateVector &psi) -> DensityMatrix {
    if (!psi.is_normalized()) {
        throw std::invalid_argument("pure density matrix needs a unit vector");
    }
    return DensityMatrix(Operator::outer(psi, psi));
}

auto DensityMatrix::trace() const -> Complex {
    Complex t = 0.0;
    for (std::size_t i = 0; i < dim(); ++i) {
        t += matrix_(i, i);
    }
    return t;
}

auto DensityMatrix::eigenvalues() const -> std::vector<double> {
    return hermitian_eigenvalues(matrix_);
}

// ---------------------------------------------------------------------------
// Composite registers

auto tensor(const StateVector &u, const StateVector &v) -> StateVector {
    if (!u.is_normalized() || !v.is_normalized()) {
        throw std::invalid_argument("tensor requires normalized inputs");
    }
    std::vector<Complex> amps(u.dim() * v.dim());
    for (std::size_t i = 0; i < u.dim(); ++i) {
        for (std::size_t j = 0; j < v.dim(); ++j) {
            amps[i * v.dim() + j] = u[i] * v[j];
        }
    }
    return StateVector(std::move(amps));
}

auto embed(const Operator &op, std::span<const std::size_t> layout,
           std::size_t target) -> Operator {
    if (target >= layout.size()) {
        throw DimensionMismatch("target factor out of range");
    }
    require_same_dim(op.dim(), layout[target], "embedded operator");
    std::size_t outer = 1;
    for (std::size_t k = 0; k < target; ++k) {
        outer *= layout[k];
    }
    const std::size_t inner = stride_of(layout, target);
    return kron(kron(Operator::identity(outer), op), Operator::identity(inner));
}

auto apply_unitary(const Operator &u, const StateVector &state,
                   std::span<const std::size_t> layout, std::size_t target)
    -> StateVector {
    if (target >= layout.size()) {
        throw DimensionMismatch("target factor out of range");
    }
    require_same_dim(layout_size(layout), state.dim(), "layout");
    require_same_dim(u.dim(), layout[target], "unitary vs target factor");

    const std::size_t d = layout[target];
    const std::size_t stride = stride_of(layout, target);
    const std::size_t block = d * stride;
    StateVector out = StateVector::zeros(state.dim());
    for (std::size_t base = 0; base < state.dim(); base += block) {
        for (std::size_t inner = 0; inner < stride; ++inner) {
            for (std::size_t r = 0; r < d; ++r) {
                Complex acc = 0.0;
                for (std::size_t c = 0; c < d; ++c) {
                    acc += u(r, c) * state[base + c * stride + inner];
                }
                out[base + r * stride + inner] = acc;
            }
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Measurement

auto born_probability(const Operator &p, const StateVector &state) -> double {
    return std::clamp(p.expectation(state).real(), 0.0, 1.0);
}

auto project(const Operator &p, const StateVector &state) -> Projection {
    StateVector image = p.apply(state);
    const double prob = std::clamp(state.inner(image).real(), 0.0, 1.0);
    if (prob <= kZeroProbability) {
        throw ZeroProbability(prob);
    }
    image *= 1.0 / std::sqrt(prob);
    return {prob, std::move(image)};
}

auto mix64(std::uint64_t master_seed, std::uint64_t stream) noexcept
    -> std::uint64_t {
    std::uint64_t z = master_seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

Rng::Rng(std::uint64_t seed) : seed_(seed), engine_(seed) {}

auto Rng::next_u64() -> std::uint64_t { return engine_(); }

auto Rng::uniform() -> double {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

Partition::Partition(std::vector<Operator> projectors, double tol)
    : projectors_(std::move(projectors)) {
    if (projectors_.empty()) {
        throw InvalidPartition("partition is empty");
    }
    const std::size_t n = projectors_.front().dim();
    Operator sum = Operator::zeros(n);
    for (const auto &p : projectors_) {
        if (p.dim() != n) {
            throw InvalidPartition("partition projectors differ in dimension");
        }
        if (!p.is_projector(tol)) {
            throw InvalidPartition("partition element is not a projector");
        }
        sum += p;
    }
    if (sum.distance(Operator::identity(n)) > tol) {
        throw InvalidPartition("partition projectors do not sum to identity");
    }
    const Operator zero = Operator::zeros(n);
    for (std::size_t i = 0; i < projectors_.size(); ++i) {
        for (std::size_t j = i + 1; j < projectors_.size(); ++j) {
            if ((projectors_[i] * projectors_[j]).distance(zero) > tol) {
                throw InvalidPartition("partition projectors overlap");
            }
        }
    }
}

auto sample(const StateVector &state, const Partition &partition, Rng &rng)
    -> Sample {
    if (state.dim() != partition.dim()) {
        throw DimensionMismatch("state and partition dimensions differ");
    }
    std::vector<StateVector> images;
    std::vector<double> weights;
    images.reserve(partition.size());
    weights.reserve(partition.size());
    double total = 0.0;
    for (std::size_t i = 0; i < partition.size(); ++i) {
        images.push_back(partition[i].apply(state));
        double w = std::clamp(state.inner(images.back()).real(), 0.0, 1.0);
        if (w <= kZeroProbability) {
            w = 0.0;
        }
        weights.push_back(w);
        total += w;
    }
    if (total <= kZeroProbability) {
        throw ZeroProbability(total);
    }

    const double u = rng.uniform() * total;
    double cumulative = 0.0;
    std::size_t chosen = partition.size();
    for (std::size_t i = 0; i < weights.size(); ++i) {
        if (weights[i] == 0.0) {
            continue;
        }
        chosen = i;
        cumulative += weights[i];
        if (u < cumulative) {
            break;
        }
    }
    StateVector post = std::move(images[chosen]);
    post *= 1.0 / std::sqrt(weights[chosen]);
    return {chosen, std::move(post), weights[chosen]};
}

// ---------------------------------------------------------------------------
// Entanglement

auto reduced_density(const StateVector &state,
                     std::span<const std::size_t> layout,
                     std::span<const std::size_t> keep) -> DensityMatrix {
    require_same_dim(layout_size(layout), state.dim(), "layout");
    std::vector<bool> kept(layout.size(), false);
    for (std::size_t k : keep) {
        if (k >= layout.size() || kept[k]) {
            throw DimensionMismatch("invalid kept factor index");
        }
        kept[k] = true;
    }

    // Split every flat index into (kept multi-index, traced multi-index).
    std::size_t kept_dim = 1;
    std::size_t traced_dim = 1;
    for (std::size_t k = 0; k < layout.size(); ++k) {
        (kept[k] ? kept_dim : traced_dim) *= layout[k];
    }
    std::vector<std::size_t> kept_index(state.dim());
    std::vector<std::size_t> traced_index(state.dim());
    for (std::size_t flat = 0; flat < state.dim(); ++flat) {
        std::size_t rem = flat;
        std::size_t ki = 0;
        std::size_t ti = 0;
        std::size_t kmul = 1;
        std::size_t tmul = 1;
        for (std::size_t k = layout.size(); k-- > 0;) {
            const std::size_t digit = rem % layout[k];
            rem /= layout[k];
            if (kept[k]) {
                ki += digit * kmul;
                kmul *= layout[k];
            } else {
                ti += digit * tmul;
                tmul *= layout[k];
            }
        }
        kept_index[flat] = ki;
        traced_index[flat] = ti;
    }

    // Rearranged amplitudes psi[kept][traced].
    std::vector<Complex> psi(kept_dim * traced_dim);
    for (std::size_t flat = 0; flat < state.dim(); ++flat) {
        psi[kept_index[flat] * traced_dim + traced_index[flat]] = state[flat];
    }
    Operator rho = Operator::zeros(kept_dim);
    for (std::size_t r = 0; r < kept_dim; ++r) {
        for (std::size_t c = 0; c < kept_dim; ++c) {
            Complex acc = 0.0;
            for (std::size_t t = 0; t < traced_dim; ++t) {
                acc += psi[r * traced_dim + t] *
                       std::conj(psi[c * traced_dim + t]);
            }
            rho(r, c) = acc;
        }
    }
    return DensityMatrix(std::move(rho));
}

auto hermitian_eigenvalues(const Operator &h, double tol)
    -> std::vector<double> {
    const std::size_t n = h.dim();
    if (n == 1) {
        return {h(0, 0).real()};
    }
    if (n == 2) {
        const double a = h(0, 0).real();
        const double d = h(1, 1).real();
        const double mean = 0.5 * (a + d);
        const double half_gap = std::hypot(0.5 * (a - d), std::abs(h(0, 1)));
        return {mean - half_gap, mean + half_gap};
    }

    // Real symmetric embedding [[Re, -Im], [Im, Re]]; each eigenvalue of h
    // appears twice in its spectrum.
    const std::size_t m = 2 * n;
    std::vector<double> a(m * m);
    auto at = [&](std::size_t r, std::size_t c) -> double & {
        return a[r * m + c];
    };
    for (std::size_t r = 0; r < n; ++r) {
        for (std::size_t c = 0; c < n; ++c) {
            const Complex z = 0.5 * (h(r, c) + std::conj(h(c, r)));
            at(r, c) = z.real();
            at(r + n, c + n) = z.real();
            at(r, c + n) = -z.imag();
            at(r + n, c) = z.imag();
        }
    }

    double scale = 0.0;
    for (double x : a) {
        scale = std::max(scale, std::abs(x));
    }
    const double threshold = tol * std::max(scale, 1.0);
    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (std::size_t p = 0; p < m; ++p) {
            for (std::size_t q = p + 1; q < m; ++q) {
                off = std::max(off, std::abs(at(p, q)));
            }
        }
        if (off <= threshold) {
            break;
        }
        for (std::size_t p = 0; p < m; ++p) {
            for (std::size_t q = p + 1; q < m; ++q) {
                const double apq = at(p, q);
                if (std::abs(apq) <= 0.01 * threshold) {
                    continue;
                }
                const double theta = (at(q, q) - at(p, p)) / (2.0 * apq);
                const double t = std::copysign(1.0, theta) /
                                 (std::abs(theta) + std::hypot(theta, 1.0));
                const double c = 1.0 / std::hypot(t, 1.0);
                const double s = t * c;
                for (std::size_t k = 0; k < m; ++k) {
                    const double akp = at(k, p);
                    const double akq = at(k, q);
                    at(k, p) = c * akp - s * akq;
                    at(k, q) = s * akp + c * akq;
                }
                for (std::size_t k = 0; k < m; ++k) {
                    const double apk = at(p, k);
                    const double aqk = at(q, k);
                    at(p, k) = c * apk - s * aqk;
                    at(q, k) = s * apk + c * aqk;
                }
            }
        }
    }

    std::vector<double> doubled(m);
    for (std::size_t i = 0; i < m; ++i) {
        doubled[i] = at(i, i);
    }
    std::sort(doubled.begin(), doubled.end());
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        out[i] = 0.5 * (doubled[2 * i] + doubled[2 * i + 1]);
    }
    return out;
}

auto entanglement_entropy(const DensityMatrix &rho) -> double {
    double entropy = 0.0;
    for (double lambda : rho.eigenvalues()) {
        if (lambda > kZeroProbability) {
            entropy -= lambda * std::log2(lambda);
        }
    }
    return entropy;
}

auto fidelity(const StateVector &a, const StateVector &b) -> double {
    require_same_dim(a.dim(), b.dim(), "fidelity");
    return std::clamp(std::norm(a.inner(b)), 0.0, 1.0);
}

} // namespace toolate::qcore

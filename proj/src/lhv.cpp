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

#include "toolate/lhv.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <stdexcept>

namespace toolate::lhv {

using protocol::kExitCount;

namespace {

void validate(const DeterministicStrategy::Assignment &wing) {
    for (std::size_t i = 0; i < wing.size(); ++i) {
        if (wing[i].second != 1 && wing[i].second != -1) {
            throw std::invalid_argument("strategy values must be +1 or -1");
        }
        for (std::size_t j = i + 1; j < wing.size(); ++j) {
            if (wing[i].first == wing[j].first) {
                throw std::invalid_argument("strategy assigns an orientation twice");
            }
        }
    }
}

auto distinct(std::initializer_list<Orientation> os) -> std::vector<Orientation> {
    std::vector<Orientation> out;
    for (Orientation o : os) {
        if (std::find(out.begin(), out.end(), o) == out.end()) {
            out.push_back(o);
        }
    }
    return out;
}

auto assignments(const std::vector<Orientation> &settings)
    -> std::vector<DeterministicStrategy::Assignment> {
    std::vector<DeterministicStrategy::Assignment> out;
    const std::size_t count = std::size_t{1} << settings.size();
    for (std::size_t mask = 0; mask < count; ++mask) {
        DeterministicStrategy::Assignment a;
        for (std::size_t i = 0; i < settings.size(); ++i) {
            a.emplace_back(settings[i], ((mask >> i) & 1) != 0 ? -1 : 1);
        }
        out.push_back(std::move(a));
    }
    return out;
}

auto estimate_from(double sum, std::uint64_t n) -> Estimate {
    const double e = sum / static_cast<double>(n);
    return {e, std::sqrt(std::max(0.0, 1.0 - e * e) / static_cast<double>(n)), n};
}

} // namespace

DeterministicStrategy::DeterministicStrategy(Assignment wing_a,
                                             Assignment wing_b)
    : wing_a_(std::move(wing_a)), wing_b_(std::move(wing_b)) {
    validate(wing_a_);
    validate(wing_b_);
}

auto DeterministicStrategy::value(Particle particle, Orientation o) const
    -> int {
    for (const auto &[orientation, v] : wing(particle)) {
        if (orientation == o) {
            return v;
        }
    }
    throw std::out_of_range("strategy does not cover this orientation");
}

auto strategy_chsh(const DeterministicStrategy &strategy,
                   const ChshSettings &settings) -> int {
    const int a = strategy.value(Particle::A, settings.a);
    const int ap = strategy.value(Particle::A, settings.a_prime);
    const int b = strategy.value(Particle::B, settings.b);
    const int bp = strategy.value(Particle::B, settings.b_prime);
    return a * b - a * bp + ap * b + ap * bp;
}

auto all_strategies(const ChshSettings &settings)
    -> std::vector<DeterministicStrategy> {
    const auto wing_a = assignments(distinct({settings.a, settings.a_prime}));
    const auto wing_b = assignments(distinct({settings.b, settings.b_prime}));
    std::vector<DeterministicStrategy> out;
    for (const auto &a : wing_a) {
        for (const auto &b : wing_b) {
            out.emplace_back(a, b);
        }
    }
    return out;
}

auto enumerate_chsh_max(const ChshSettings &settings) -> ChshMaximum {
    const auto strategies = all_strategies(settings);
    std::size_t best = 0;
    int best_value = -1;
    for (std::size_t i = 0; i < strategies.size(); ++i) {
        const int s = std::abs(strategy_chsh(strategies[i], settings));
        if (s > best_value) {
            best_value = s;
            best = i;
        }
    }
    return {best_value, strategies[best]};
}

auto lhv_epr_sample(const std::vector<WeightedStrategy> &mixture,
                    const ChshSettings &settings, qcore::Rng &rng,
                    std::uint64_t trials) -> LhvEstimates {
    if (trials == 0) {
        throw std::invalid_argument("at least one trial is required");
    }
    if (mixture.empty()) {
        throw std::invalid_argument("strategy mixture is empty");
    }
    double total = 0.0;
    for (const auto &m : mixture) {
        if (!(m.weight >= 0.0)) {
            throw std::invalid_argument("mixture weights must be >= 0");
        }
        total += m.weight;
    }
    if (total <= 0.0) {
        throw std::invalid_argument("mixture has no weight");
    }

    auto draw = [&]() -> const DeterministicStrategy & {
        const double u = rng.uniform() * total;
        double cumulative = 0.0;
        for (const auto &m : mixture) {
            cumulative += m.weight;
            if (u < cumulative && m.weight > 0.0) {
                return m.strategy;
            }
        }
        return mixture.back().strategy;
    };

    const std::array<std::pair<Orientation, Orientation>, 4> pairs{{
        {settings.a, settings.b},
        {settings.a, settings.b_prime},
        {settings.a_prime, settings.b},
        {settings.a_prime, settings.b_prime},
    }};
    LhvEstimates out{};
    for (std::size_t k = 0; k < pairs.size(); ++k) {
        double sum = 0.0;
        for (std::uint64_t t = 0; t < trials; ++t) {
            const auto &s = draw();
            sum += s.value(Particle::A, pairs[k].first) *
                   s.value(Particle::B, pairs[k].second);
        }
        out.correlations[k] = estimate_from(sum, trials);
    }
    const auto &c = out.correlations;
    double var = 0.0;
    for (const auto &e : c) {
        var += e.std_error * e.std_error;
    }
    out.chsh = {spin::chsh_combination(c[0].value, c[1].value, c[2].value,
                                       c[3].value),
                std::sqrt(var), trials};
    return out;
}

ConspiracyModel::ConspiracyModel(JointTable table) : table_(table) {
    double total = 0.0;
    for (double p : table_) {
        if (!(p >= 0.0)) {
            throw std::invalid_argument("model probabilities must be >= 0");
        }
        total += p;
    }
    if (std::abs(total - 1.0) > qcore::kDefaultTolerance) {
        throw std::invalid_argument("model probabilities must sum to 1");
    }
}

auto ConspiracyModel::uniform() -> ConspiracyModel {
    JointTable t;
    t.fill(1.0 / static_cast<double>(t.size()));
    return ConspiracyModel(t);
}

auto ConspiracyModel::from_table(const JointTable &table) -> ConspiracyModel {
    return ConspiracyModel(table);
}

auto ConspiracyModel::draw(qcore::Rng &rng) const
    -> std::pair<std::size_t, std::size_t> {
    const double u = rng.uniform();
    double cumulative = 0.0;
    std::size_t last = 0;
    for (std::size_t i = 0; i < table_.size(); ++i) {
        if (table_[i] <= 0.0) {
            continue;
        }
        last = i;
        cumulative += table_[i];
        if (u < cumulative) {
            break;
        }
    }
    return {last / kExitCount, last % kExitCount};
}

auto conspiracy_predictions(const ConspiracyModel &model,
                            const protocol::ParticleLayout &layout)
    -> ConspiracyPrediction {
    std::array<interference::PortDistribution, kExitCount> per_exit;
    for (std::size_t e = 0; e < kExitCount; ++e) {
        per_exit[e] = interference::recombine(
            protocol::exit_vector(layout, protocol::exit_label(layout.trine, e)));
    }
    std::array<double, 3> ports_a{};
    std::array<double, 3> ports_b{};
    for (std::size_t ea = 0; ea < kExitCount; ++ea) {
        for (std::size_t eb = 0; eb < kExitCount; ++eb) {
            const double w = model.table()[ea * kExitCount + eb];
            for (std::size_t port = 0; port < 3; ++port) {
                ports_a[port] += w * per_exit[ea][port];
                ports_b[port] += w * per_exit[eb][port];
            }
        }
    }
    return {model.table(), interference::PortDistribution(ports_a),
            interference::PortDistribution(ports_b)};
}

} // namespace toolate::lhv

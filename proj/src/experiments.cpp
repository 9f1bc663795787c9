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

#include "toolate/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <numbers>
#include <thread>

#include <boost/math/special_functions/gamma.hpp>
#include <fmt/format.h>

#include "toolate/lhv.hpp"

namespace toolate::experiments {

using nlohmann::json;
using protocol::Apparatus;
using protocol::kExitCount;
using protocol::Particle;
using protocol::ParticleLayout;
using protocol::PortBinding;
using qcore::Operator;
using qcore::Rng;
using qcore::StateVector;
using spin::Orientation;
using spin::SpinValue;
using spin::TrineSet;

namespace {

constexpr std::array<const char *, 6> kProtocolNames{
    "epr_standard", "toolate", "interference", "erasure", "lhv_compare", "verify"};

const qcore::Layout kQubitPair{2, 2};

auto degrees(double radians) -> double { return radians * 180.0 / std::numbers::pi; }

auto deg_label(double radians) -> std::string {
    return fmt::format("{:g}", degrees(radians));
}

auto layout_of(const ExperimentConfig &config) -> ParticleLayout {
    const auto a = effective_angles(config);
    return {TrineSet(Orientation(a[0]), Orientation(a[1]), Orientation(a[2])),
            config.port_binding};
}

auto index_of(std::span<const char *const> names, const std::string &name)
    -> std::optional<std::size_t> {
    for (std::size_t i = 0; i < names.size(); ++i) {
        if (name == names[i]) {
            return i;
        }
    }
    return std::nullopt;
}

auto slot_from_name(const std::string &name) -> std::size_t {
    for (std::size_t s = 0; s < 3; ++s) {
        if (spin::slot_name(s) == name) {
            return s;
        }
    }
    throw ConfigError("unknown trine slot '" + name + "'");
}

/**
 * Runs @p f(trial) for trials [0, n) on up to @p threads workers and returns
 * the results in trial order. Every trial seeds its own generator, so the
 * split between workers never shows in the output.
 */
template <class Result, class F>
auto run_trials(std::uint64_t n, unsigned threads, F f) -> std::vector<Result> {
    std::vector<Result> out(n);
    const std::uint64_t workers =
        std::clamp<std::uint64_t>(threads, 1, std::max<std::uint64_t>(n, 1));
    if (workers == 1) {
        for (std::uint64_t t = 0; t < n; ++t) {
            out[t] = f(t);
        }
        return out;
    }
    std::vector<std::exception_ptr> errors(workers);
    std::vector<std::thread> pool;
    const std::uint64_t chunk = (n + workers - 1) / workers;
    for (std::uint64_t w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            try {
                const std::uint64_t end = std::min(n, (w + 1) * chunk);
                for (std::uint64_t t = w * chunk; t < end; ++t) {
                    out[t] = f(t);
                }
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    }
    for (auto &th : pool) {
        th.join();
    }
    for (const auto &e : errors) {
        if (e) {
            std::rethrow_exception(e);
        }
    }
    return out;
}

auto binomial_row(std::string label, std::optional<double> exact,
                  std::uint64_t hits, std::uint64_t n) -> EstimateRow {
    EstimateRow row{std::move(label), exact, std::nullopt, std::nullopt, n};
    if (n > 0) {
        const double p = static_cast<double>(hits) / static_cast<double>(n);
        row.estimate = p;
        row.std_error = std::sqrt(p * (1.0 - p) / static_cast<double>(n));
    }
    return row;
}

auto correlation_estimate(double sum, std::uint64_t n) -> std::pair<double, double> {
    const double e = sum / static_cast<double>(n);
    return {e, std::sqrt(std::max(0.0, 1.0 - e * e) / static_cast<double>(n))};
}

// SGM pair on the singlet, A measured first.
struct EprPair {
    Orientation a;
    Orientation b;
    qcore::Partition at_a;
    qcore::Partition at_b;
};

auto sgm_partition(Orientation o, std::size_t target) -> qcore::Partition {
    const auto p = spin::sgm_projectors(o);
    return qcore::Partition({qcore::embed(p.up, kQubitPair, target),
                             qcore::embed(p.down, kQubitPair, target)});
}

auto epr_pairs(std::span<const double> angles) -> std::vector<EprPair> {
    std::vector<std::pair<double, double>> raw;
    if (angles.size() == 2) {
        raw = {{angles[0], angles[1]}};
    } else {
        raw = {{angles[0], angles[2]},
               {angles[0], angles[3]},
               {angles[1], angles[2]},
               {angles[1], angles[3]}};
    }
    std::vector<EprPair> out;
    for (const auto &[a, b] : raw) {
        out.push_back({Orientation(a), Orientation(b),
                       sgm_partition(Orientation(a), 0),
                       sgm_partition(Orientation(b), 1)});
    }
    return out;
}

/// Sum of A*B outcomes per pair over @p trials sampled singlets.
auto sample_epr(const std::vector<EprPair> &pairs, std::uint64_t trials,
                std::uint64_t master_seed, unsigned threads)
    -> std::vector<double> {
    const StateVector singlet = spin::singlet();
    using Outcome = std::array<int, 4>;
    const auto results = run_trials<Outcome>(trials, threads, [&](std::uint64_t t) {
        Rng rng(trial_seed(master_seed, t));
        Outcome o{};
        for (std::size_t k = 0; k < pairs.size(); ++k) {
            const auto first = qcore::sample(singlet, pairs[k].at_a, rng);
            const auto second = qcore::sample(first.post, pairs[k].at_b, rng);
            o[k] = (first.index == 0 ? 1 : -1) * (second.index == 0 ? 1 : -1);
        }
        return o;
    });
    std::vector<double> sums(pairs.size(), 0.0);
    for (const auto &o : results) {
        for (std::size_t k = 0; k < pairs.size(); ++k) {
            sums[k] += o[k];
        }
    }
    return sums;
}

auto ports_json(const interference::PortDistribution &d) -> json {
    return json(d.probabilities());
}

auto max_abs_diff(std::span<const double> a, std::span<const double> b) -> double {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        m = std::max(m, std::abs(a[i] - b[i]));
    }
    return m;
}

/// Conditional exit table given value pair (va, vb), 9 entries indexed by
/// 3*slot_A + slot_B.
auto conditional_orientations(const protocol::JointTable &joint, SpinValue va,
                              SpinValue vb) -> std::array<double, 9> {
    const std::size_t oa = va == SpinValue::Up ? 0 : 1;
    const std::size_t ob = vb == SpinValue::Up ? 0 : 1;
    std::array<double, 9> out{};
    double total = 0.0;
    for (std::size_t sa = 0; sa < 3; ++sa) {
        for (std::size_t sb = 0; sb < 3; ++sb) {
            out[3 * sa + sb] = joint[(2 * sa + oa) * kExitCount + 2 * sb + ob];
            total += out[3 * sa + sb];
        }
    }
    for (double &p : out) {
        p = total > 0.0 ? p / total : 0.0;
    }
    return out;
}

auto value_pair_probability(const protocol::JointTable &joint, SpinValue va,
                            SpinValue vb) -> double {
    const std::size_t oa = va == SpinValue::Up ? 0 : 1;
    const std::size_t ob = vb == SpinValue::Up ? 0 : 1;
    double p = 0.0;
    for (std::size_t sa = 0; sa < 3; ++sa) {
        for (std::size_t sb = 0; sb < 3; ++sb) {
            p += joint[(2 * sa + oa) * kExitCount + 2 * sb + ob];
        }
    }
    return p;
}

auto uniform_path_filter() -> Operator {
    const double u = 1.0 / std::sqrt(3.0);
    const auto sym = Operator::projector(StateVector{u, u, u});
    const auto id = Operator::identity(protocol::kSpinDim);
    return qcore::kron(qcore::kron(sym, id), qcore::kron(sym, id));
}

auto port_partition() -> qcore::Partition {
    std::vector<Operator> ps;
    for (std::size_t p = 0; p < protocol::kPathDim; ++p) {
        ps.push_back(qcore::embed(
            Operator::projector(StateVector::basis(protocol::kPathDim, p)),
            protocol::kParticleFactors, 0));
    }
    return qcore::Partition(std::move(ps));
}

auto through_splitter(const StateVector &particle) -> StateVector {
    return qcore::apply_unitary(protocol::three_port_bs().adjoint(), particle,
                                protocol::kParticleFactors, 0);
}

} // namespace

auto to_string(Protocol p) -> std::string {
    return kProtocolNames.at(static_cast<std::size_t>(p));
}

auto protocol_from_string(const std::string &name) -> Protocol {
    if (const auto i = index_of(kProtocolNames, name)) {
        return static_cast<Protocol>(*i);
    }
    throw ConfigError("unknown protocol '" + name + "'");
}

auto effective_angles(const ExperimentConfig &config) -> std::vector<double> {
    if (!config.angles.empty()) {
        return config.angles;
    }
    const double d = std::numbers::pi / 180.0;
    if (config.protocol == Protocol::EprStandard) {
        return {0.0, 90.0 * d, 45.0 * d, 135.0 * d};
    }
    return {0.0, 120.0 * d, 240.0 * d};
}

void validate(const ExperimentConfig &config) {
    const auto angles = effective_angles(config);
    for (double a : angles) {
        if (!std::isfinite(a)) {
            throw ConfigError("angles must be finite");
        }
    }
    if (config.protocol == Protocol::EprStandard) {
        if (angles.size() != 2 && angles.size() != 4) {
            throw ConfigError("epr_standard takes 2 angles (a, b) or 4 (a, a', b, b')");
        }
        if (angles.size() == 4 && (Orientation(angles[0]) == Orientation(angles[1]) ||
                                   Orientation(angles[2]) == Orientation(angles[3]))) {
            throw ConfigError("CHSH settings must be distinct on each wing");
        }
    } else {
        if (angles.size() != 3) {
            throw ConfigError("the trine takes exactly 3 angles");
        }
        try {
            (void)layout_of(config);
        } catch (const std::invalid_argument &e) {
            throw ConfigError(std::string("trine: ") + e.what());
        }
    }
    if (!(config.threshold > 0.0 && config.threshold < 1.0)) {
        throw ConfigError("threshold must lie in (0, 1)");
    }
    if (config.threads == 0) {
        throw ConfigError("threads must be >= 1");
    }
}

void to_json(json &j, const ExperimentConfig &config) {
    json binding = json::array();
    for (std::size_t p = 0; p < 3; ++p) {
        binding.push_back(spin::slot_name(config.port_binding.slot_at_port(p)));
    }
    j = {{"protocol", to_string(config.protocol)},
         {"angles", config.angles},
         {"trials", config.trials},
         {"master_seed", config.master_seed},
         {"port_binding", binding},
         {"output_path", config.output_path},
         {"threshold", config.threshold}};
}

void from_json(const json &j, ExperimentConfig &config) {
    if (!j.is_object()) {
        throw ConfigError("config must be a JSON object");
    }
    static constexpr std::array<const char *, 7> keys{
        "protocol", "angles",      "trials",   "master_seed",
        "port_binding", "output_path", "threshold"};
    for (const auto &[key, value] : j.items()) {
        if (!index_of(keys, key)) {
            throw ConfigError("unknown config key '" + key + "'");
        }
    }
    try {
        if (j.contains("protocol")) {
            config.protocol = protocol_from_string(j.at("protocol").get<std::string>());
        }
        if (j.contains("angles")) {
            config.angles = j.at("angles").get<std::vector<double>>();
        }
        if (j.contains("trials")) {
            if (!j.at("trials").is_number_unsigned()) {
                throw ConfigError("trials must be a nonnegative integer");
            }
            config.trials = j.at("trials").get<std::uint64_t>();
        }
        if (j.contains("master_seed")) {
            if (!j.at("master_seed").is_number_unsigned()) {
                throw ConfigError("master_seed must be a nonnegative integer");
            }
            config.master_seed = j.at("master_seed").get<std::uint64_t>();
        }
        if (j.contains("port_binding")) {
            const auto names = j.at("port_binding").get<std::vector<std::string>>();
            if (names.size() != 3) {
                throw ConfigError("port_binding lists one slot per port");
            }
            config.port_binding = PortBinding({slot_from_name(names[0]),
                                               slot_from_name(names[1]),
                                               slot_from_name(names[2])});
        }
        if (j.contains("output_path")) {
            config.output_path = j.at("output_path").get<std::string>();
        }
        if (j.contains("threshold")) {
            config.threshold = j.at("threshold").get<double>();
        }
    } catch (const json::exception &e) {
        throw ConfigError(std::string("config: ") + e.what());
    } catch (const ConfigError &) {
        throw;
    } catch (const std::invalid_argument &e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
}

auto metadata(const ExperimentConfig &config) -> json {
    ExperimentConfig echoed = config;
    echoed.angles = effective_angles(config);
    return {{"artifact", kArtifactName},
            {"version", kArtifactVersion},
            {"config", echoed},
            {"master_seed", config.master_seed}};
}

auto trial_seed(std::uint64_t master_seed, std::uint64_t trial) -> std::uint64_t {
    return qcore::mix64(master_seed, trial);
}

auto EstimateTable::at(const std::string &label) const -> const EstimateRow & {
    for (const auto &r : rows) {
        if (r.label == label) {
            return r;
        }
    }
    throw std::out_of_range("no row labelled '" + label + "'");
}

void write_csv(std::ostream &out, const EstimateTable &table, const json &meta) {
    auto cell = [](const std::optional<double> &v) {
        return v ? fmt::format("{:.17g}", *v) : std::string();
    };
    out << "# " << meta.dump() << '\n';
    out << "label,exact,estimate,stderr,n\n";
    for (const auto &r : table.rows) {
        out << fmt::format("{},{},{},{},{}\n", r.label, cell(r.exact),
                           cell(r.estimate), cell(r.std_error), r.n);
    }
}

auto chi_square(std::span<const std::uint64_t> observed,
                std::span<const double> expected) -> ChiSquare {
    if (observed.size() != expected.size()) {
        throw qcore::DimensionMismatch("observed and expected differ in size");
    }
    double n = 0.0;
    double total = 0.0;
    for (std::size_t i = 0; i < observed.size(); ++i) {
        if (!(expected[i] >= 0.0)) {
            throw std::invalid_argument("expected probabilities must be >= 0");
        }
        n += static_cast<double>(observed[i]);
        total += expected[i];
    }
    if (n <= 0.0) {
        throw std::invalid_argument("no observations");
    }
    if (std::abs(total - 1.0) > 1e-9) {
        throw std::invalid_argument("expected probabilities must sum to 1");
    }

    for (std::size_t i = 0; i < observed.size(); ++i) {
        if (expected[i] == 0.0 && observed[i] > 0) {
            // Impossible under the model: no finite statistic fits.
            return {std::numeric_limits<double>::infinity(), 0.0, observed.size() - 1};
        }
    }

    struct Cell {
        double obs;
        double exp;
    };
    std::vector<Cell> cells;
    Cell pooled{0.0, 0.0};
    for (std::size_t i = 0; i < observed.size(); ++i) {
        const Cell c{static_cast<double>(observed[i]), expected[i] * n};
        if (c.exp >= 5.0) {
            cells.push_back(c);
        } else {
            pooled.obs += c.obs;
            pooled.exp += c.exp;
        }
    }
    if (pooled.exp >= 5.0) {
        cells.push_back(pooled);
    } else if (pooled.obs > 0.0 || pooled.exp > 0.0) {
        if (cells.empty()) {
            throw std::invalid_argument("every cell was pooled away");
        }
        auto smallest = std::min_element(cells.begin(), cells.end(),
                                         [](const Cell &a, const Cell &b) {
                                             return a.exp < b.exp;
                                         });
        smallest->obs += pooled.obs;
        smallest->exp += pooled.exp;
    }
    if (cells.size() < 2) {
        throw std::invalid_argument("fewer than two cells after pooling");
    }
    double stat = 0.0;
    for (const auto &c : cells) {
        stat += (c.obs - c.exp) * (c.obs - c.exp) / c.exp;
    }
    const std::size_t dof = cells.size() - 1;
    const double p = boost::math::gamma_q(static_cast<double>(dof) / 2.0, stat / 2.0);
    return {stat, p, dof};
}

auto run_epr(const ExperimentConfig &config) -> EstimateTable {
    validate(config);
    const auto angles = effective_angles(config);
    const auto pairs = epr_pairs(angles);
    std::vector<double> sums;
    if (config.trials > 0) {
        sums = sample_epr(pairs, config.trials, config.master_seed, config.threads);
    }

    EstimateTable table;
    std::vector<double> estimates;
    double var = 0.0;
    for (std::size_t k = 0; k < pairs.size(); ++k) {
        EstimateRow row{fmt::format("E_{}_{}", deg_label(pairs[k].a.radians()),
                                    deg_label(pairs[k].b.radians())),
                        spin::correlation_exact(pairs[k].a, pairs[k].b),
                        std::nullopt, std::nullopt, config.trials};
        if (config.trials > 0) {
            const auto [e, se] = correlation_estimate(sums[k], config.trials);
            row.estimate = e;
            row.std_error = se;
            estimates.push_back(e);
            var += se * se;
        }
        table.rows.push_back(std::move(row));
    }
    if (pairs.size() == 4) {
        EstimateRow row{"S",
                        spin::chsh_value(Orientation(angles[0]), Orientation(angles[1]),
                                         Orientation(angles[2]), Orientation(angles[3])),
                        std::nullopt, std::nullopt, config.trials};
        if (config.trials > 0) {
            row.estimate = spin::chsh_combination(estimates[0], estimates[1],
                                                  estimates[2], estimates[3]);
            row.std_error = std::sqrt(var);
        }
        table.rows.push_back(std::move(row));
    }
    return table;
}

void to_json(json &j, const OutcomeRecord &r) {
    j = {{"trial", r.trial},
         {"seed", r.seed},
         {"value_A", spin::to_string(r.value_a)},
         {"value_B", spin::to_string(r.value_b)},
         {"orient_A", spin::slot_name(r.slot_a)},
         {"orient_B", spin::slot_name(r.slot_b)}};
}

auto run_toolate(const ExperimentConfig &config) -> ToolateRun {
    validate(config);
    const ParticleLayout layout = layout_of(config);
    const auto prepared = protocol::prepare_joint(layout);
    const auto joint = protocol::joint_distribution(prepared);

    ToolateRun run;
    if (config.trials > 0) {
        const Apparatus app(layout);
        run.records = run_trials<OutcomeRecord>(
            config.trials, config.threads, [&](std::uint64_t t) {
                const std::uint64_t seed = trial_seed(config.master_seed, t);
                Rng rng(seed);
                // t1: the split is the prepared state itself.
                const auto va = app.measure_value(prepared, Particle::A, rng);
                const auto vb = app.measure_value(va.post, Particle::B, rng);
                const auto oa = app.measure_orientation(vb.post, Particle::A, rng);
                const auto ob = app.measure_orientation(oa.post, Particle::B, rng);
                if (oa.exit.value != va.value || ob.exit.value != vb.value) {
                    throw std::logic_error("orientation stage changed a fixed value");
                }
                return OutcomeRecord{t,
                                     seed,
                                     va.value,
                                     vb.value,
                                     *layout.trine.index_of(oa.exit.orientation),
                                     *layout.trine.index_of(ob.exit.orientation)};
            });
    }

    std::array<std::uint64_t, 4> value_counts{};
    std::array<std::uint64_t, 36> cond_counts{};
    std::array<std::uint64_t, 3> slot_a{};
    std::array<std::uint64_t, 3> slot_b{};
    for (const auto &r : run.records) {
        const std::size_t v = 2 * (r.value_a == SpinValue::Up ? 0 : 1) +
                              (r.value_b == SpinValue::Up ? 0 : 1);
        ++value_counts[v];
        ++cond_counts[9 * v + 3 * r.slot_a + r.slot_b];
        ++slot_a[r.slot_a];
        ++slot_b[r.slot_b];
    }

    auto &rows = run.table.rows;
    const std::uint64_t n = config.trials;
    for (SpinValue va : spin::kSpinValues) {
        for (SpinValue vb : spin::kSpinValues) {
            const std::size_t v = 2 * (va == SpinValue::Up ? 0 : 1) +
                                  (vb == SpinValue::Up ? 0 : 1);
            rows.push_back(binomial_row(
                fmt::format("P_values_{}_{}", spin::to_string(va), spin::to_string(vb)),
                value_pair_probability(joint, va, vb), value_counts[v], n));
        }
    }
    for (SpinValue va : spin::kSpinValues) {
        for (SpinValue vb : spin::kSpinValues) {
            const std::size_t v = 2 * (va == SpinValue::Up ? 0 : 1) +
                                  (vb == SpinValue::Up ? 0 : 1);
            const auto cond = conditional_orientations(joint, va, vb);
            for (std::size_t sa = 0; sa < 3; ++sa) {
                for (std::size_t sb = 0; sb < 3; ++sb) {
                    rows.push_back(binomial_row(
                        fmt::format("P_orient_{}_{}|{}_{}", spin::slot_name(sa),
                                    spin::slot_name(sb), spin::to_string(va),
                                    spin::to_string(vb)),
                        cond[3 * sa + sb], cond_counts[9 * v + 3 * sa + sb],
                        value_counts[v]));
                }
            }
        }
    }
    for (std::size_t s = 0; s < 3; ++s) {
        double pa = 0.0;
        double pb = 0.0;
        for (std::size_t e = 0; e < kExitCount; ++e) {
            for (std::size_t o = 0; o < 2; ++o) {
                pa += joint[(2 * s + o) * kExitCount + e];
                pb += joint[e * kExitCount + 2 * s + o];
            }
        }
        rows.push_back(binomial_row(fmt::format("P_orient_A_{}", spin::slot_name(s)),
                                    pa, slot_a[s], n));
        rows.push_back(binomial_row(fmt::format("P_orient_B_{}", spin::slot_name(s)),
                                    pb, slot_b[s], n));
    }
    return run;
}

void write_records(std::ostream &out, const std::vector<OutcomeRecord> &records,
                   const TrineSet &trine, const json &meta) {
    json head = {{"metadata", meta}, {"stages", {"t1_split", "t2_value", "t3_orientation"}}};
    json axes = json::object();
    for (std::size_t s = 0; s < 3; ++s) {
        axes[spin::slot_name(s)] = trine[s].radians();
    }
    head["trine_radians"] = axes;
    out << head.dump() << '\n';
    for (const auto &r : records) {
        out << json(r).dump() << '\n';
    }
}

auto run_interference(const ExperimentConfig &config) -> json {
    validate(config);
    const ParticleLayout layout = layout_of(config);
    const auto joint = protocol::joint_distribution(protocol::prepare_joint(layout));
    const auto fitted = lhv::ConspiracyModel::from_table(joint);
    const auto fitted_pred = lhv::conspiracy_predictions(fitted, layout);
    const auto uniform_pred =
        lhv::conspiracy_predictions(lhv::ConspiracyModel::uniform(), layout);

    json report = {{"metadata", metadata(config)}, {"threshold", config.threshold}};
    json quantum = json::object();
    json verdicts = json::array();
    for (SpinValue v : spin::kSpinValues) {
        const auto ports =
            interference::recombine(protocol::literal_single_state(v, layout).state);
        quantum[spin::to_string(v)] = ports_json(ports);
        for (const auto &[name, pred] :
             {std::pair{"quantum_table_fit", &fitted_pred},
              std::pair{"uniform", &uniform_pred}}) {
            const auto d = interference::interference_discriminator(
                ports, pred->ports_a, config.threshold);
            verdicts.push_back({{"value", spin::to_string(v)},
                                {"model", name},
                                {"tv_distance", d.tv_distance},
                                {"verdict", d.pass ? "pass" : "fail"}});
        }
    }
    report["quantum_ports"] = quantum;
    report["conspiracy_ports"] = {{"quantum_table_fit", ports_json(fitted_pred.ports_a)},
                                  {"uniform", ports_json(uniform_pred.ports_a)}};
    report["discrimination"] = verdicts;

    if (config.trials > 0) {
        const auto partition = port_partition();
        const auto lit = protocol::literal_single_state(SpinValue::Up, layout);
        const StateVector quantum_out = through_splitter(lit.state);
        std::array<StateVector, kExitCount> exit_out;
        for (std::size_t e = 0; e < kExitCount; ++e) {
            exit_out[e] = through_splitter(
                protocol::exit_vector(layout, protocol::exit_label(layout.trine, e)));
        }
        using Ports = std::array<std::size_t, 2>;
        const auto results = run_trials<Ports>(
            config.trials, config.threads, [&](std::uint64_t t) {
                Rng rng(trial_seed(config.master_seed, t));
                const auto q = qcore::sample(quantum_out, partition, rng);
                const auto [ea, eb] = fitted.draw(rng);
                (void)eb;
                const auto c = qcore::sample(exit_out[ea], partition, rng);
                return Ports{q.index, c.index};
            });
        std::array<std::uint64_t, 3> q_counts{};
        std::array<std::uint64_t, 3> c_counts{};
        for (const auto &r : results) {
            ++q_counts[r[0]];
            ++c_counts[r[1]];
        }
        const auto quantum_ports = interference::recombine(lit.state);
        const auto q_vs_model = interference::sampled_discriminator(
            q_counts, fitted_pred.ports_a);
        const auto q_vs_self =
            interference::sampled_discriminator(q_counts, quantum_ports);
        const auto c_vs_quantum =
            interference::sampled_discriminator(c_counts, quantum_ports);
        report["sampled"] = {
            {"trials", config.trials},
            {"sigma_threshold", interference::kSampledSigmaThreshold},
            {"quantum_counts", q_counts},
            {"conspiracy_counts", c_counts},
            {"quantum_data_vs_conspiracy", {{"max_abs_z", q_vs_model.max_abs_z},
                                            {"refuted", q_vs_model.pass}}},
            {"quantum_data_vs_quantum", {{"max_abs_z", q_vs_self.max_abs_z},
                                         {"refuted", q_vs_self.pass}}},
            {"conspiracy_data_vs_quantum", {{"max_abs_z", c_vs_quantum.max_abs_z},
                                            {"refuted", c_vs_quantum.pass}}}};
    }
    report["notes"] = {
        "quantum_ports recombine the normalized single-particle value-fixed state.",
        "Conspiracy ports mix definite exits incoherently; every model gives 1/3 per port."};
    return report;
}

auto run_erasure(const ExperimentConfig &config) -> json {
    validate(config);
    const ParticleLayout layout = layout_of(config);
    json report = interference::swap_report(layout);
    report["metadata"] = metadata(config);

    if (config.trials > 0) {
        const qcore::Partition detector({uniform_path_filter(),
                                         Operator::identity(protocol::kJointDim) -
                                             uniform_path_filter()});
        std::vector<std::pair<std::string, protocol::JointState>> conditions{
            {"prepared", protocol::prepare_joint(layout)}};
        for (SpinValue va : spin::kSpinValues) {
            for (SpinValue vb : spin::kSpinValues) {
                conditions.emplace_back(
                    spin::to_string(va) + "_" + spin::to_string(vb),
                    protocol::oracle_conditional_state(va, vb, layout));
            }
        }
        using Hits = std::vector<char>;
        const auto results = run_trials<Hits>(
            config.trials, config.threads, [&](std::uint64_t t) {
                Rng rng(trial_seed(config.master_seed, t));
                Hits h;
                for (const auto &c : conditions) {
                    h.push_back(qcore::sample(c.second.state(), detector, rng).index == 0);
                }
                return h;
            });
        json sampled = json::array();
        for (std::size_t k = 0; k < conditions.size(); ++k) {
            std::uint64_t hits = 0;
            for (const auto &h : results) {
                hits += h[k] ? 1 : 0;
            }
            const auto row = binomial_row(conditions[k].first, std::nullopt, hits,
                                          config.trials);
            sampled.push_back({{"condition", row.label},
                               {"success_estimate", *row.estimate},
                               {"stderr", *row.std_error},
                               {"n", row.n}});
        }
        report["sampled"] = sampled;
    }
    return report;
}

auto run_lhv_compare(const ExperimentConfig &config) -> json {
    validate(config);
    const ParticleLayout layout = layout_of(config);
    const double d = std::numbers::pi / 180.0;
    const std::array<double, 4> chsh_angles{0.0, 90.0 * d, 45.0 * d, 135.0 * d};
    const lhv::ChshSettings settings{Orientation(chsh_angles[0]), Orientation(chsh_angles[1]),
                                     Orientation(chsh_angles[2]), Orientation(chsh_angles[3])};
    const double s_quantum =
        spin::chsh_value(settings.a, settings.a_prime, settings.b, settings.b_prime);
    const auto best = lhv::enumerate_chsh_max(settings);

    json argmax = json::object();
    for (Particle p : {Particle::A, Particle::B}) {
        json wing = json::array();
        for (const auto &[o, v] : best.argmax.wing(p)) {
            wing.push_back({{"degrees", degrees(o.radians())}, {"value", v}});
        }
        argmax[p == Particle::A ? "A" : "B"] = wing;
    }
    json chsh = {{"settings_degrees", {0, 90, 45, 135}},
                 {"quantum", s_quantum},
                 {"lhv_max", best.max_abs_s},
                 {"gap", std::abs(s_quantum) - best.max_abs_s},
                 {"lhv_argmax", argmax}};

    const auto joint = protocol::joint_distribution(protocol::prepare_joint(layout));
    const auto up_up = conditional_orientations(joint, SpinValue::Up, SpinValue::Up);
    const auto lit = protocol::literal_single_state(SpinValue::Up, layout);
    const auto quantum_ports = interference::recombine(lit.state);
    json models = json::array();
    for (const auto &[name, model] :
         {std::pair{"quantum_table_fit", lhv::ConspiracyModel::from_table(joint)},
          std::pair{"uniform", lhv::ConspiracyModel::uniform()}}) {
        const auto pred = lhv::conspiracy_predictions(model, layout);
        const auto model_up_up =
            conditional_orientations(pred.exit_table, SpinValue::Up, SpinValue::Up);
        const auto verdict = interference::interference_discriminator(
            quantum_ports, pred.ports_a, config.threshold);
        models.push_back(
            {{"model", name},
             {"exit_table_tv", interference::total_variation(pred.exit_table, joint)},
             {"conditional_up_up_tv", interference::total_variation(model_up_up, up_up)},
             {"ports", ports_json(pred.ports_a)},
             {"interference_tv", verdict.tv_distance},
             {"interference_verdict", verdict.pass ? "model_refuted" : "model_survives"}});
    }

    json report = {{"metadata", metadata(config)},
                   {"chsh", chsh},
                   {"quantum_conditional_up_up", up_up},
                   {"quantum_ports", ports_json(quantum_ports)},
                   {"conspiracy_models", models}};

    if (config.trials > 0) {
        const auto pairs = epr_pairs(chsh_angles);
        const auto sums =
            sample_epr(pairs, config.trials, config.master_seed, config.threads);
        std::array<double, 4> e{};
        double var = 0.0;
        for (std::size_t k = 0; k < 4; ++k) {
            const auto [est, se] = correlation_estimate(sums[k], config.trials);
            e[k] = est;
            var += se * se;
        }
        Rng rng(trial_seed(config.master_seed, std::numeric_limits<std::uint64_t>::max()));
        const auto lhv_est =
            lhv::lhv_epr_sample({{1.0, best.argmax}}, settings, rng, config.trials);
        report["sampled"] = {
            {"trials", config.trials},
            {"quantum_S", {{"estimate", spin::chsh_combination(e[0], e[1], e[2], e[3])},
                           {"stderr", std::sqrt(var)}}},
            {"lhv_argmax_S", {{"estimate", lhv_est.chsh.value},
                              {"stderr", lhv_est.chsh.std_error}}}};
    }
    return report;
}

auto run_verify(const ExperimentConfig &config) -> VerifyRun {
    validate(config);
    const ParticleLayout layout = layout_of(config);
    const auto states = protocol::verify_states(layout);

    json checks = json::array();
    bool ok = true;
    auto check = [&](const std::string &name, double value, std::optional<double> target,
                     double tol) {
        const bool pass = !target || std::abs(value - *target) <= tol;
        ok = ok && pass;
        json c = {{"name", name}, {"value", value}, {"pass", pass}};
        c["target"] = target ? json(*target) : json(nullptr);
        c["tolerance"] = tol;
        checks.push_back(c);
    };

    const auto &eq = states.equations;
    check("literal_single_norm", eq.at(0).literal_norm, 1.0, 1e-12);
    check("literal_pair_norm", eq.at(1).literal_norm, 1.0 / 3.0, 1e-12);
    check("literal_full_norm", eq.at(2).literal_norm, 1.0 / 3.0, 1e-12);
    check("literal_pair_fidelity_vs_oracle_up_up", eq.at(1).fidelity_vs_oracle, 1.0,
          1e-12);
    check("literal_full_fidelity_vs_oracle_prepared", eq.at(2).fidelity_vs_oracle,
          std::nullopt, 0.0);
    double worst_zero = 0.0;
    for (const auto &z : states.zero_checks) {
        worst_zero = std::max(worst_zero, z.magnitude);
    }
    check("same_orientation_same_value_amplitudes", worst_zero, 0.0,
          protocol::kAnalyticZero);

    const auto prepared = protocol::prepare_joint(layout);
    const auto joint = protocol::joint_distribution(prepared);
    double value_dev = 0.0;
    for (SpinValue va : spin::kSpinValues) {
        for (SpinValue vb : spin::kSpinValues) {
            value_dev = std::max(value_dev,
                                 std::abs(value_pair_probability(joint, va, vb) - 0.25));
        }
    }
    check("value_pair_probability_deviation", value_dev, 0.0, 1e-12);
    for (SpinValue v : spin::kSpinValues) {
        const auto cond = conditional_orientations(joint, v, v);
        double same = 0.0;
        double unequal = 0.0;
        for (std::size_t sa = 0; sa < 3; ++sa) {
            for (std::size_t sb = 0; sb < 3; ++sb) {
                if (sa == sb) {
                    same = std::max(same, cond[3 * sa + sb]);
                } else {
                    unequal = std::max(unequal, std::abs(cond[3 * sa + sb] - 1.0 / 6.0));
                }
            }
        }
        const auto tag = spin::to_string(v) + "_" + spin::to_string(v);
        check("conditional_same_orientation_" + tag, same, 0.0, 1e-12);
        check("conditional_unequal_deviation_" + tag, unequal, 0.0, 1e-12);
    }
    double order_dev = 0.0;
    for (const auto &order : protocol::value_first_orderings()) {
        order_dev = std::max(order_dev, max_abs_diff(protocol::sequential_distribution(
                                                         prepared, order),
                                                     joint));
    }
    check("ordering_invariance_deviation", order_dev, 0.0, 1e-12);

    const auto ports =
        interference::recombine(protocol::literal_single_state(SpinValue::Up, layout).state);
    const std::array<double, 3> expected_ports{4.0 / 9.0, 5.0 / 18.0, 5.0 / 18.0};
    check("recombination_port_deviation", max_abs_diff(ports.probabilities(), expected_ports),
          0.0, 1e-12);
    double conspiracy_dev = 0.0;
    const std::array<double, 3> third{1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0};
    for (const auto &model : {lhv::ConspiracyModel::uniform(),
                              lhv::ConspiracyModel::from_table(joint)}) {
        const auto pred = lhv::conspiracy_predictions(model, layout);
        conspiracy_dev = std::max({conspiracy_dev,
                                   max_abs_diff(pred.ports_a.probabilities(), third),
                                   max_abs_diff(pred.ports_b.probabilities(), third)});
    }
    check("conspiracy_port_deviation", conspiracy_dev, 0.0, 1e-12);
    const auto tv = interference::interference_discriminator(
        ports, interference::PortDistribution::uniform(), config.threshold);
    check("interference_tv", tv.tv_distance, 1.0 / 9.0, 1e-12);
    check("interference_tv_exceeds_threshold", tv.pass ? 1.0 : 0.0, 1.0, 0.0);

    const auto erased = interference::erase_paths(
        protocol::oracle_conditional_state(SpinValue::Up, SpinValue::Up, layout));
    check("erasure_up_up_singlet_fidelity", erased.fidelity_to_singlet, 1.0, 1e-10);
    check("erasure_up_up_entropy_bits", erased.entanglement_bits, 1.0, 1e-10);
    const auto mixture = interference::erase_definite_paths(joint, layout);
    check("definite_path_mixture_entropy_bits", mixture.entanglement_bits, 0.0, 1e-10);

    const double d = std::numbers::pi / 180.0;
    const lhv::ChshSettings settings{Orientation(0.0), Orientation(90.0 * d),
                                     Orientation(45.0 * d), Orientation(135.0 * d)};
    check("chsh_quantum_abs",
          std::abs(spin::chsh_value(settings.a, settings.a_prime, settings.b,
                                    settings.b_prime)),
          2.0 * std::numbers::sqrt2, 1e-9);
    check("chsh_lhv_max", lhv::enumerate_chsh_max(settings).max_abs_s, 2.0, 0.0);
    check("beam_splitter_unitary", protocol::three_port_bs().is_unitary() ? 1.0 : 0.0,
          1.0, 0.0);

    double binding_dev = 0.0;
    for (const auto &binding : PortBinding::all()) {
        const ParticleLayout other{layout.trine, binding};
        const auto j2 = protocol::joint_distribution(protocol::prepare_joint(other));
        const auto p2 =
            interference::recombine(protocol::literal_single_state(SpinValue::Up, other).state);
        const auto e2 = interference::erase_paths(
            protocol::oracle_conditional_state(SpinValue::Up, SpinValue::Up, other));
        binding_dev = std::max({binding_dev, max_abs_diff(j2, joint),
                                max_abs_diff(p2.probabilities(), ports.probabilities()),
                                std::abs(e2.entanglement_bits - erased.entanglement_bits),
                                std::abs(e2.fidelity_to_singlet - erased.fidelity_to_singlet)});
    }
    check("port_binding_invariance_deviation", binding_dev, 0.0, 1e-12);

    json report = {{"metadata", metadata(config)},
                   {"states", states},
                   {"checks", checks},
                   {"ok", ok}};
    return {report, ok};
}

} // namespace toolate::experiments

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

// Acceptance run: one PASS/FAIL line per criterion, then a summary.
// Exits 1 when any criterion fails.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/format.h>
#include <sys/wait.h>
#include <unistd.h>

#include "oracles.hpp"
#include "toolate/experiments.hpp"
#include "toolate/interference.hpp"
#include "toolate/lhv.hpp"
#include "toolate/protocol.hpp"

namespace fs = std::filesystem;
namespace ex = toolate::experiments;
namespace oracle = toolate::testing::oracle;
using namespace toolate;
using protocol::ParticleLayout;
using protocol::PortBinding;
using spin::Orientation;
using spin::SpinValue;
using spin::TrineSet;

namespace {

constexpr double kDeg = std::numbers::pi / 180.0;

struct Verdict {
    bool pass = true;
    std::vector<std::string> details;

    void require(bool ok, const std::string &what) {
        if (!ok) {
            pass = false;
            details.push_back("FAILED " + what);
        }
    }
    void note(const std::string &text) { details.push_back(text); }
};

auto layouts() -> std::vector<ParticleLayout> {
    std::vector<ParticleLayout> out;
    for (const auto &b : PortBinding::all()) {
        out.push_back({TrineSet{}, b});
    }
    return out;
}

auto value_tag(SpinValue a, SpinValue b) -> std::string {
    return spin::to_string(a) + "_" + spin::to_string(b);
}

auto max_z(const ex::EstimateTable &t, const std::vector<std::string> &labels)
    -> double {
    double z = 0.0;
    for (const auto &l : labels) {
        const auto &r = t.at(l);
        const double d = std::abs(*r.estimate - *r.exact);
        z = std::max(z, *r.std_error > 0.0 ? d / *r.std_error
                                           : (d > 1e-12 ? 1e300 : 0.0));
    }
    return z;
}

// Cached Monte Carlo run shared by criteria 3 and 4.
auto toolate_mc() -> const ex::ToolateRun & {
    static const ex::ToolateRun run = [] {
        ex::ExperimentConfig c;
        c.protocol = ex::Protocol::Toolate;
        c.trials = 100000;
        c.master_seed = 20260101;
        return ex::run_toolate(c);
    }();
    return run;
}

auto criterion1() -> Verdict {
    Verdict v;
    double worst = 0.0;
    for (int a = 0; a < 360; ++a) {
        for (int b = 0; b < 360; ++b) {
            const double e = spin::correlation_exact(Orientation::from_degrees(a),
                                                     Orientation::from_degrees(b));
            worst = std::max(worst, std::abs(e + std::cos((a - b) * kDeg)));
        }
    }
    v.require(worst <= 1e-12, "exact grid");
    v.note(fmt::format("1-degree grid max |E + cos| = {:.2e}", worst));

    ex::ExperimentConfig c;
    c.angles = {0.0, 90 * kDeg, 45 * kDeg, 135 * kDeg};
    c.trials = 100000;
    c.master_seed = 1;
    const auto t = ex::run_epr(c);
    const double z = max_z(t, {"E_0_45", "E_0_135", "E_90_45", "E_90_135"});
    v.require(z <= 3.0, "MC within 3 sigma");
    v.note(fmt::format("MC n=1e5 max |z| = {:.2f}", z));
    return v;
}

auto criterion2() -> Verdict {
    Verdict v;
    const lhv::ChshSettings s{Orientation::from_degrees(0), Orientation::from_degrees(90),
                              Orientation::from_degrees(45), Orientation::from_degrees(135)};
    const double q = spin::chsh_value(s.a, s.a_prime, s.b, s.b_prime);
    v.require(std::abs(std::abs(q) - 2 * std::numbers::sqrt2) <= 1e-9, "quantum |S| = 2 sqrt2");
    const auto best = lhv::enumerate_chsh_max(s);
    v.require(best.max_abs_s == 2, "LHV max = 2");
    v.note(fmt::format("S = {:.12f}, LHV max = {}", q, best.max_abs_s));
    return v;
}

auto criterion3() -> Verdict {
    Verdict v;
    double worst = 0.0;
    for (const auto &layout : layouts()) {
        const auto joint = protocol::joint_distribution(protocol::prepare_joint(layout));
        for (SpinValue a : spin::kSpinValues) {
            for (SpinValue b : spin::kSpinValues) {
                double p = 0.0;
                for (std::size_t sa = 0; sa < 3; ++sa) {
                    for (std::size_t sb = 0; sb < 3; ++sb) {
                        p += joint[(2 * sa + (a == SpinValue::Up ? 0 : 1)) * 6 + 2 * sb +
                                   (b == SpinValue::Up ? 0 : 1)];
                    }
                }
                worst = std::max({worst, std::abs(p - 0.25),
                                  std::abs(oracle::value_pair_probability(layout.trine, a, b) - 0.25)});
            }
        }
    }
    v.require(worst <= 1e-12, "exact 1/4");
    v.note(fmt::format("max |P - 1/4| = {:.2e} over 6 bindings", worst));

    const auto &run = toolate_mc();
    std::vector<std::string> labels;
    for (SpinValue a : spin::kSpinValues) {
        for (SpinValue b : spin::kSpinValues) {
            labels.push_back("P_values_" + value_tag(a, b));
        }
    }
    const double z = max_z(run.table, labels);
    v.require(z <= 3.0, "MC within 3 sigma");
    v.note(fmt::format("MC n=1e5 max |z| = {:.2f}", z));
    return v;
}

auto criterion4() -> Verdict {
    Verdict v;
    double same = 0.0;
    double unequal = 0.0;
    double vs_oracle = 0.0;
    for (const auto &layout : layouts()) {
        for (SpinValue val : spin::kSpinValues) {
            const auto state = protocol::oracle_conditional_state(val, val, layout);
            const auto joint = protocol::joint_distribution(state);
            const auto amps = oracle::conditional_exit_amplitudes(layout.trine, val, val);
            const std::size_t o = val == SpinValue::Up ? 0 : 1;
            for (std::size_t sa = 0; sa < 3; ++sa) {
                for (std::size_t sb = 0; sb < 3; ++sb) {
                    const std::size_t i = (2 * sa + o) * 6 + 2 * sb + o;
                    vs_oracle = std::max(vs_oracle, std::abs(joint[i] - std::norm(amps[i])));
                    if (sa == sb) {
                        same = std::max(same, joint[i]);
                    } else {
                        unequal = std::max(unequal, std::abs(joint[i] - 1.0 / 6.0));
                    }
                }
            }
        }
    }
    v.require(same == 0.0, "same-orientation probability exactly 0");
    v.require(unequal <= 1e-12, "unequal pairs 1/6");
    v.require(vs_oracle <= 1e-12, "agrees with exit-basis oracle");
    v.note(fmt::format("max same = {:.1e}, max |p - 1/6| = {:.2e}", same, unequal));

    std::uint64_t forbidden = 0;
    std::uint64_t up_up = 0;
    for (const auto &r : toolate_mc().records) {
        if (r.value_a == r.value_b) {
            up_up += r.value_a == SpinValue::Up ? 1 : 0;
            forbidden += r.slot_a == r.slot_b ? 1 : 0;
        }
    }
    v.require(forbidden == 0, "no same-orientation same-value MC event");
    v.note(fmt::format("MC: {} up_up trials, {} same-orientation events", up_up, forbidden));
    return v;
}

auto criterion5() -> Verdict {
    Verdict v;
    double worst = 0.0;
    for (const auto &layout : layouts()) {
        const auto prepared = protocol::prepare_joint(layout);
        const auto single = protocol::joint_distribution(prepared);
        const auto expected = oracle::prepared_joint_table(layout.trine);
        for (const auto &order : protocol::value_first_orderings()) {
            const auto seq = protocol::sequential_distribution(prepared, order);
            for (std::size_t i = 0; i < seq.size(); ++i) {
                worst = std::max({worst, std::abs(seq[i] - single[i]),
                                  std::abs(seq[i] - expected[i])});
            }
        }
    }
    v.require(worst <= 1e-12, "sequential = single-shot");
    v.note(fmt::format("6 interleavings x 6 bindings, max deviation = {:.2e}", worst));
    return v;
}

auto criterion6() -> Verdict {
    Verdict v;
    const auto report = protocol::verify_states(layouts().front());
    const auto &eq = report.equations;
    v.require(std::abs(eq[0].literal_norm - 1.0) <= 1e-12, "single-particle literal norm 1");
    v.require(std::abs(eq[1].literal_norm - 1.0 / 3.0) <= 1e-12, "pair literal norm 1/3");
    v.require(std::abs(eq[2].literal_norm - 1.0 / 3.0) <= 1e-12, "full literal norm 1/3");
    v.require(std::abs(eq[1].literal_norm - oracle::literal_pair_norm()) <= 1e-12 &&
                  std::abs(eq[2].literal_norm - oracle::literal_full_norm()) <= 1e-12,
              "norms match oracle");
    v.require(std::abs(eq[1].fidelity_vs_oracle - 1.0) <= 1e-12,
              fmt::format("pair fidelity vs oracle up_up = 1 (got {:.3e})",
                          eq[1].fidelity_vs_oracle));
    double zero = 0.0;
    for (const auto &z : report.zero_checks) {
        zero = std::max(zero, z.magnitude);
    }
    v.require(zero <= 1e-14, "same-orientation-same-value amplitudes 0");
    v.note(fmt::format("norms {:.15f}, {:.15f}, {:.15f}", eq[0].literal_norm,
                       eq[1].literal_norm, eq[2].literal_norm));
    v.note(fmt::format("pair magnitude overlap = {:.12f}", eq[1].magnitude_overlap));
    v.note(fmt::format("full fidelity vs prepared (reported only) = {:.12f}, oracle {:.12f}",
                       eq[2].fidelity_vs_oracle, oracle::full_state_fidelity(TrineSet{})));
    v.note(fmt::format("max zero-check amplitude = {:.1e}", zero));
    return v;
}

auto criterion7() -> Verdict {
    Verdict v;
    const std::array<double, 3> expected{4.0 / 9.0, 5.0 / 18.0, 5.0 / 18.0};
    double port_dev = 0.0;
    double model_dev = 0.0;
    double tv_dev = 0.0;
    bool over = true;
    std::mt19937_64 gen(7);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    for (const auto &layout : layouts()) {
        const auto ports = interference::recombine(
            protocol::literal_single_state(SpinValue::Up, layout).state);
        for (std::size_t p = 0; p < 3; ++p) {
            port_dev = std::max(port_dev, std::abs(ports[p] - expected[p]));
        }
        std::vector<lhv::ConspiracyModel> models{
            lhv::ConspiracyModel::uniform(),
            lhv::ConspiracyModel::from_table(
                protocol::joint_distribution(protocol::prepare_joint(layout)))};
        for (int k = 0; k < 5; ++k) {
            protocol::JointTable t{};
            double sum = 0.0;
            for (double &x : t) {
                x = unif(gen);
                sum += x;
            }
            for (double &x : t) {
                x /= sum;
            }
            models.emplace_back(t);
        }
        for (const auto &m : models) {
            const auto pred = lhv::conspiracy_predictions(m, layout);
            for (std::size_t p = 0; p < 3; ++p) {
                model_dev = std::max({model_dev, std::abs(pred.ports_a[p] - 1.0 / 3.0),
                                      std::abs(pred.ports_b[p] - 1.0 / 3.0)});
            }
            const auto d = interference::interference_discriminator(ports, pred.ports_a);
            tv_dev = std::max(tv_dev, std::abs(d.tv_distance - 1.0 / 9.0));
            over = over && d.pass && d.tv_distance > 0.05;
        }
    }
    v.require(port_dev <= 1e-12, "ports (4/9, 5/18, 5/18)");
    v.require(model_dev <= 1e-12, "conspiracy ports uniform");
    v.require(tv_dev <= 1e-12, "TV = 1/9");
    v.require(over, "TV exceeds 0.05");
    v.note(fmt::format("port dev {:.1e}, model dev {:.1e}, |TV - 1/9| {:.1e}", port_dev,
                       model_dev, tv_dev));
    return v;
}

auto criterion8() -> Verdict {
    Verdict v;
    double fid = 0.0;
    double ent = 0.0;
    double mix = 0.0;
    for (const auto &layout : layouts()) {
        const auto r = interference::erase_paths(
            protocol::oracle_conditional_state(SpinValue::Up, SpinValue::Up, layout));
        fid = std::max(fid, std::abs(r.fidelity_to_singlet - 1.0));
        ent = std::max(ent, std::abs(r.entanglement_bits - 1.0));
        const auto m = interference::erase_definite_paths(
            protocol::joint_distribution(protocol::prepare_joint(layout)), layout);
        mix = std::max(mix, std::abs(m.entanglement_bits));
    }
    v.require(fid <= 1e-10, "singlet fidelity 1");
    v.require(ent <= 1e-10, "entropy 1 bit");
    v.require(mix <= 1e-10, "mixture entropy 0");
    v.note(fmt::format("|F - 1| = {:.1e}, |S - 1| = {:.1e}, mixture S = {:.1e}", fid, ent, mix));
    return v;
}

auto slurp(const fs::path &p) -> std::string {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

auto criterion9() -> Verdict {
    Verdict v;
    const fs::path dir = fs::temp_directory_path() / fmt::format("toolate_accept_{}", ::getpid());
    fs::create_directories(dir);
    int compared = 0;
    for (const char *sub : {"epr", "toolate", "interfere", "erase", "lhv", "verify"}) {
        const fs::path out = dir / fmt::format("{}.out", sub);
        const std::string cmd = fmt::format("{} {} --trials 5000 --seed 42 --out {} >/dev/null 2>&1",
                                            TOOLATE_BIN, sub, out.string());
        std::vector<std::string> files;
        for (int rep = 0; rep < 2; ++rep) {
            const int status = std::system(cmd.c_str());
            const int code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
            v.require(code == 0 || (code == 2 && std::string(sub) == "verify"),
                      fmt::format("{} exit code {}", sub, code));
            std::string both = slurp(out);
            if (std::string(sub) == "toolate") {
                both += slurp(dir / fmt::format("{}.records.jsonl", sub));
            }
            v.require(!both.empty(), fmt::format("{} wrote output", sub));
            files.push_back(both);
        }
        v.require(files[0] == files[1], fmt::format("{} byte-identical", sub));
        ++compared;
    }
    fs::remove_all(dir);
    v.note(fmt::format("{} subcommands rerun with seed 42, outputs compared byte for byte",
                       compared));
    return v;
}

auto criterion10() -> Verdict {
    Verdict v;
    auto collect = [](const ParticleLayout &layout) {
        std::vector<double> s;
        const auto prepared = protocol::prepare_joint(layout);
        const auto joint = protocol::joint_distribution(prepared);
        s.insert(s.end(), joint.begin(), joint.end());
        for (const auto &order : protocol::value_first_orderings()) {
            const auto seq = protocol::sequential_distribution(prepared, order);
            s.insert(s.end(), seq.begin(), seq.end());
        }
        for (SpinValue a : spin::kSpinValues) {
            for (SpinValue b : spin::kSpinValues) {
                const auto c = protocol::joint_distribution(
                    protocol::oracle_conditional_state(a, b, layout));
                s.insert(s.end(), c.begin(), c.end());
                const auto e = interference::erase_paths(
                    protocol::oracle_conditional_state(a, b, layout));
                s.push_back(e.success_prob);
                s.push_back(e.entanglement_bits);
                s.push_back(e.fidelity_to_singlet);
            }
        }
        const auto report = protocol::verify_states(layout);
        for (const auto &eq : report.equations) {
            s.push_back(eq.literal_norm);
            s.push_back(eq.fidelity_vs_oracle);
        }
        for (const auto &z : report.zero_checks) {
            s.push_back(z.magnitude);
        }
        const auto ports = interference::recombine(
            protocol::literal_single_state(SpinValue::Up, layout).state);
        s.insert(s.end(), ports.probabilities().begin(), ports.probabilities().end());
        const auto pred = lhv::conspiracy_predictions(
            lhv::ConspiracyModel::from_table(joint), layout);
        s.insert(s.end(), pred.ports_a.probabilities().begin(),
                 pred.ports_a.probabilities().end());
        const auto m = interference::erase_definite_paths(joint, layout);
        s.push_back(m.success_prob);
        s.push_back(m.entanglement_bits);
        return s;
    };
    const auto base = collect(layouts().front());
    double worst = 0.0;
    for (const auto &layout : layouts()) {
        const auto other = collect(layout);
        for (std::size_t i = 0; i < base.size(); ++i) {
            worst = std::max(worst, std::abs(other[i] - base[i]));
        }
    }
    v.require(worst <= 1e-12, "statistics unchanged under all 6 bindings");

    ex::ExperimentConfig c;
    c.protocol = ex::Protocol::Toolate;
    c.trials = 2000;
    c.master_seed = 3;
    const auto ref = ex::run_toolate(c);
    double exact_dev = 0.0;
    for (const auto &b : PortBinding::all()) {
        c.port_binding = b;
        const auto r = ex::run_toolate(c);
        for (std::size_t i = 0; i < r.table.rows.size(); ++i) {
            exact_dev = std::max(exact_dev, std::abs(*r.table.rows[i].exact -
                                                     *ref.table.rows[i].exact));
        }
    }
    v.require(exact_dev <= 1e-12, "experiment tables unchanged");
    v.note(fmt::format("{} statistics x 6 bindings, max deviation = {:.2e}", base.size(),
                       std::max(worst, exact_dev)));
    return v;
}

} // namespace

auto main() -> int {
    const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria{
        {"singlet correlations", criterion1},
        {"CHSH quantum vs local maximum", criterion2},
        {"value-first statistics", criterion3},
        {"orientation anti-correlation", criterion4},
        {"ordering invariance", criterion5},
        {"equation audits", criterion6},
        {"interference discrimination", criterion7},
        {"erasure and swap", criterion8},
        {"reproducibility", criterion9},
        {"relabeling invariance", criterion10},
    };
    int passed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Verdict v;
        try {
            v = criteria[i].second();
        } catch (const std::exception &e) {
            v.require(false, std::string("exception: ") + e.what());
        }
        passed += v.pass ? 1 : 0;
        std::string detail;
        for (const auto &d : v.details) {
            detail += (detail.empty() ? "" : "; ") + d;
        }
        std::printf("criterion %zu: %s  %s (%s)\n", i + 1, v.pass ? "PASS" : "FAIL",
                    criteria[i].first.c_str(), detail.c_str());
        std::fflush(stdout);
    }
    std::printf("summary: %d/%zu criteria pass\n", passed, criteria.size());
    return passed == static_cast<int>(criteria.size()) ? 0 : 1;
}

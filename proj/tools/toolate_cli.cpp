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

// Command-line front end. Exit codes: 0 ok, 1 usage or config error,
// 2 verify found a failing check, 3 I/O error.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "toolate/experiments.hpp"

namespace fs = std::filesystem;
namespace ex = toolate::experiments;
using nlohmann::json;

namespace {

enum ExitCode { kOk = 0, kConfigError = 1, kVerifyFailed = 2, kIoError = 3 };

class IoError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

struct Flags {
    std::string config_path;
    std::string angles;
    std::uint64_t trials = 0;
    std::uint64_t seed = 0;
    std::string out;
    std::string port_binding;
    double threshold = 0.0;
};

auto split_commas(const std::string &text) -> std::vector<std::string> {
    std::vector<std::string> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const auto b = item.find_first_not_of(" \t");
        const auto e = item.find_last_not_of(" \t");
        out.push_back(b == std::string::npos ? "" : item.substr(b, e - b + 1));
    }
    return out;
}

auto parse_degrees(const std::string &text) -> std::vector<double> {
    std::vector<double> out;
    for (const auto &item : split_commas(text)) {
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(item, &used);
        } catch (const std::exception &) {
            used = 0;
        }
        if (item.empty() || used != item.size()) {
            throw ex::ConfigError("bad angle '" + item + "'");
        }
        out.push_back(v * std::numbers::pi / 180.0);
    }
    return out;
}

auto read_file(const std::string &path) -> std::string {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot read " + path);
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_output(const std::string &path, const std::string &text) {
    if (path.empty()) {
        std::cout << text;
        std::cout.flush();
        return;
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out || !(out << text) || !out.flush()) {
        throw IoError("cannot write " + path);
    }
}

auto records_path(const std::string &out) -> std::string {
    fs::path p(out);
    return (p.parent_path() / (p.stem().string() + ".records.jsonl")).string();
}

auto build_config(ex::Protocol protocol, const Flags &flags, const CLI::App &sub)
    -> ex::ExperimentConfig {
    ex::ExperimentConfig config;
    if (!flags.config_path.empty()) {
        json doc;
        try {
            doc = json::parse(read_file(flags.config_path));
        } catch (const json::parse_error &e) {
            throw ex::ConfigError(std::string("config is not valid JSON: ") + e.what());
        }
        config = doc.get<ex::ExperimentConfig>();
        if (doc.contains("protocol") && config.protocol != protocol) {
            throw ex::ConfigError("config protocol '" + ex::to_string(config.protocol) +
                                  "' does not match the subcommand");
        }
    }
    config.protocol = protocol;
    if (sub.count("--angles") > 0) {
        config.angles = parse_degrees(flags.angles);
    }
    if (sub.count("--trials") > 0) {
        config.trials = flags.trials;
    }
    if (sub.count("--seed") > 0) {
        config.master_seed = flags.seed;
    }
    if (sub.count("--out") > 0) {
        config.output_path = flags.out;
    }
    if (sub.count("--threshold") > 0) {
        config.threshold = flags.threshold;
    }
    if (sub.count("--port-binding") > 0) {
        json names = json::array();
        for (const auto &n : split_commas(flags.port_binding)) {
            names.push_back(n);
        }
        json patch = {{"port_binding", names}};
        ex::from_json(patch, config);
    }
    if (const char *env = std::getenv("TOOLATE_THREADS")) {
        char *end = nullptr;
        const long n = std::strtol(env, &end, 10);
        if (end == env || *end != '\0' || n < 1 || n > 1024) {
            throw ex::ConfigError("TOOLATE_THREADS must be an integer in [1, 1024]");
        }
        config.threads = static_cast<unsigned>(n);
    }
    ex::validate(config);
    return config;
}

auto dump(const json &j) -> std::string { return j.dump(2) + "\n"; }

auto run(ex::Protocol protocol, const ex::ExperimentConfig &config) -> int {
    const auto meta = ex::metadata(config);
    switch (protocol) {
    case ex::Protocol::EprStandard: {
        std::ostringstream csv;
        ex::write_csv(csv, ex::run_epr(config), meta);
        write_output(config.output_path, csv.str());
        return kOk;
    }
    case ex::Protocol::Toolate: {
        const auto result = ex::run_toolate(config);
        std::ostringstream csv;
        ex::write_csv(csv, result.table, meta);
        write_output(config.output_path, csv.str());
        if (!config.output_path.empty()) {
            std::ostringstream jsonl;
            const toolate::spin::TrineSet trine(
                toolate::spin::Orientation(ex::effective_angles(config)[0]),
                toolate::spin::Orientation(ex::effective_angles(config)[1]),
                toolate::spin::Orientation(ex::effective_angles(config)[2]));
            ex::write_records(jsonl, result.records, trine, meta);
            write_output(records_path(config.output_path), jsonl.str());
        }
        return kOk;
    }
    case ex::Protocol::Interference:
        write_output(config.output_path, dump(ex::run_interference(config)));
        return kOk;
    case ex::Protocol::Erasure:
        write_output(config.output_path, dump(ex::run_erasure(config)));
        return kOk;
    case ex::Protocol::LhvCompare:
        write_output(config.output_path, dump(ex::run_lhv_compare(config)));
        return kOk;
    case ex::Protocol::Verify: {
        const auto result = ex::run_verify(config);
        write_output(config.output_path, dump(result.report));
        if (!result.ok) {
            for (const auto &c : result.report.at("checks")) {
                if (!c.at("pass").get<bool>()) {
                    std::cerr << "verify: check failed: " << c.at("name").get<std::string>()
                              << " = " << c.at("value").dump() << "\n";
                }
            }
            return kVerifyFailed;
        }
        return kOk;
    }
    }
    return kConfigError;
}

} // namespace

auto main(int argc, char **argv) -> int {
    CLI::App app{"Simulator for the too-late-choice EPR protocol and its baselines",
                 "toolate"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(ex::kArtifactVersion));

    Flags flags;
    const std::vector<std::pair<std::string, ex::Protocol>> commands{
        {"epr", ex::Protocol::EprStandard},
        {"toolate", ex::Protocol::Toolate},
        {"interfere", ex::Protocol::Interference},
        {"erase", ex::Protocol::Erasure},
        {"lhv", ex::Protocol::LhvCompare},
        {"verify", ex::Protocol::Verify}};
    const std::map<std::string, std::string> blurbs{
        {"epr", "singlet correlations and CHSH (CSV)"},
        {"toolate", "value-first protocol: statistics (CSV) and trial records (JSONL)"},
        {"interfere", "recombination ports against conspiracy models (JSON)"},
        {"erase", "path erasure and entanglement swap (JSON)"},
        {"lhv", "quantum predictions against local hidden-variable models (JSON)"},
        {"verify", "state audits and analytic invariants (JSON); exit 2 on failure"}};
    std::vector<std::pair<CLI::App *, ex::Protocol>> subs;
    for (const auto &[name, protocol] : commands) {
        auto *sub = app.add_subcommand(name, blurbs.at(name));
        sub->add_option("--config", flags.config_path, "JSON config file");
        sub->add_option("--angles", flags.angles,
                        "comma-separated degrees (trine, or a,a',b,b' for epr)");
        sub->add_option("--trials", flags.trials, "Monte Carlo trials; 0 = exact only");
        sub->add_option("--seed", flags.seed, "master seed");
        sub->add_option("--out", flags.out, "output file (default stdout)");
        sub->add_option("--port-binding", flags.port_binding,
                        "trine slot at each port, e.g. beta,alpha,gamma");
        sub->add_option("--threshold", flags.threshold, "interference TV threshold");
        subs.emplace_back(sub, protocol);
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp &e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp &e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion &e) {
        return app.exit(e);
    } catch (const CLI::ParseError &e) {
        std::cerr << "error: " << e.what() << "\n\n" << app.help();
        return kConfigError;
    }

    for (const auto &[sub, protocol] : subs) {
        if (!sub->parsed()) {
            continue;
        }
        try {
            return run(protocol, build_config(protocol, flags, *sub));
        } catch (const IoError &e) {
            std::cerr << "error: " << e.what() << "\n";
            return kIoError;
        } catch (const ex::ConfigError &e) {
            std::cerr << "error: " << e.what() << "\n\n" << sub->help();
            return kConfigError;
        }
    }
    return kConfigError;
}

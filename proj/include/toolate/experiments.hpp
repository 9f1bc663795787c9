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
 * Experiment drivers: exact tables, seeded Monte Carlo and the file formats
 * the command-line front end writes.
 */

#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "toolate/interference.hpp"
#include "toolate/protocol.hpp"

namespace toolate::experiments {

inline constexpr const char *kArtifactName = "toolate";
inline constexpr const char *kArtifactVersion = "0.1.0";

enum class Protocol { EprStandard, Toolate, Interference, Erasure, LhvCompare, Verify };

auto to_string(Protocol p) -> std::string;
/// Throws ConfigError for an unknown name.
auto protocol_from_string(const std::string &name) -> Protocol;

/// Raised for any invalid configuration; the CLI maps it to exit code 1.
class ConfigError : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

struct ExperimentConfig {
    Protocol protocol = Protocol::EprStandard;
    /// Radians. Empty selects the protocol default: (0, 90, 45, 135) degrees
    /// for epr_standard, the trine (0, 120, 240) degrees otherwise.
    std::vector<double> angles;
    std::uint64_t trials = 0; ///< 0 = exact only
    std::uint64_t master_seed = 0;
    protocol::PortBinding port_binding;
    std::string output_path;
    double threshold = interference::kDefaultThreshold;
    /// Worker threads for the trial loop. Never changes results, so it is
    /// not part of the serialized config.
    unsigned threads = 1;
};

/// Angles after defaults are applied.
auto effective_angles(const ExperimentConfig &config) -> std::vector<double>;
/// Checks every invariant; throws ConfigError.
void validate(const ExperimentConfig &config);

void to_json(nlohmann::json &j, const ExperimentConfig &config);
/// Missing keys keep their defaults; unknown keys are rejected.
void from_json(const nlohmann::json &j, ExperimentConfig &config);

/// Metadata preamble carried by every output.
auto metadata(const ExperimentConfig &config) -> nlohmann::json;

/// Trial seed: mix64(master_seed, trial).
auto trial_seed(std::uint64_t master_seed, std::uint64_t trial) -> std::uint64_t;

struct EstimateRow {
    std::string label;
    std::optional<double> exact;
    std::optional<double> estimate;
    std::optional<double> std_error;
    std::uint64_t n = 0;
};

struct EstimateTable {
    std::vector<EstimateRow> rows;

    /// Throws std::out_of_range for an unknown label.
    [[nodiscard]] auto at(const std::string &label) const -> const EstimateRow &;
};

/// `# <metadata json>` then `label,exact,estimate,stderr,n`, one row per
/// line. Missing values are left empty; doubles use %.17g.
void write_csv(std::ostream &out, const EstimateTable &table,
               const nlohmann::json &meta);

struct ChiSquare {
    double statistic;
    double p_value;
    std::size_t dof;
};

/**
 * @brief Pearson test of @p observed against @p expected probabilities.
 *
 * Cells with expected count below 5 are pooled into one cell; a pooled cell
 * still below 5 is merged into the smallest remaining cell. A count in a
 * cell with zero expected probability gives an infinite statistic and p = 0.
 * Throws std::invalid_argument when fewer than two cells survive.
 */
auto chi_square(std::span<const std::uint64_t> observed,
                std::span<const double> expected) -> ChiSquare;

/// E(a,b) for each angle pair plus S when four angles (a, a', b, b') are given.
auto run_epr(const ExperimentConfig &config) -> EstimateTable;

/// One trial of the value-first protocol: split (t1), values (t2), then
/// orientations (t3).
struct OutcomeRecord {
    std::uint64_t trial;
    std::uint64_t seed;
    spin::SpinValue value_a;
    spin::SpinValue value_b;
    std::size_t slot_a; ///< orientation index in the trine
    std::size_t slot_b;
};

void to_json(nlohmann::json &j, const OutcomeRecord &record);

struct ToolateRun {
    EstimateTable table;
    std::vector<OutcomeRecord> records;
};

auto run_toolate(const ExperimentConfig &config) -> ToolateRun;

/// JSON-lines stream: a metadata line, then one record per line.
void write_records(std::ostream &out, const std::vector<OutcomeRecord> &records,
                   const spin::TrineSet &trine, const nlohmann::json &meta);

auto run_interference(const ExperimentConfig &config) -> nlohmann::json;
auto run_erasure(const ExperimentConfig &config) -> nlohmann::json;
auto run_lhv_compare(const ExperimentConfig &config) -> nlohmann::json;

struct VerifyRun {
    nlohmann::json report;
    bool ok;
};

/// verify_states plus the analytic invariants, each with its own verdict.
auto run_verify(const ExperimentConfig &config) -> VerifyRun;

} // namespace toolate::experiments

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "dauction/agents.hpp"
#include "dauction/environment.hpp"

namespace dauction {

// Instance source: generate from a spec, load from a file, or take values inline.
struct ProfilePath {
  std::string path;
  bool operator==(const ProfilePath&) const = default;
};
struct InlineProfile {
  std::vector<double> buyers;
  std::vector<double> sellers;
  std::optional<InstanceSpec> generated_from;
  bool operator==(const InlineProfile&) const = default;
};
using InstanceSource = std::variant<InstanceSpec, ProfilePath, InlineProfile>;

struct AlphaRange {
  double lo = 4.0;
  double hi = 8.0;
  bool operator==(const AlphaRange&) const = default;
};
struct AlphaVectors {
  std::vector<double> buyers;
  std::vector<double> sellers;
  bool operator==(const AlphaVectors&) const = default;
};
using AlphaSource = std::variant<AlphaRange, AlphaVectors>;

struct StrategyOverride {
  Side side = Side::buyer;
  std::size_t agent_id = 0;
  StrategyKind kind;
  bool operator==(const StrategyOverride&) const = default;
};

struct ExperimentConfig {
  InstanceSource instance = InstanceSpec{};
  std::uint64_t horizon = 50'000;
  std::uint64_t paths = 100;
  std::uint64_t master_seed = 1;
  NoiseModel noise{};
  std::optional<double> valuation_cap;  // defaults to 1 for bernoulli noise
  AlphaSource alpha = AlphaRange{};
  bool allow_alpha_below_4 = false;
  StrategyKind default_strategy = ConfidenceBound{};
  std::vector<StrategyOverride> overrides;
  bool relaxed = false;
  std::string output_dir = "results";
  std::uint64_t decimation_stride = 0;  // 0 = every round up to 1e4 rounds, else every 10th
  std::optional<double> b_max;          // theory cap; defaults to the largest valuation
  int threads = 0;                      // 0 = OpenMP default

  double effective_valuation_cap() const;
  std::uint64_t effective_stride() const;

  bool operator==(const ExperimentConfig&) const = default;
};

/// Strict parse + validation. Collects every problem and throws one ConfigError.
ExperimentConfig parse_config(const nlohmann::json& doc);
ExperimentConfig load_config_file(const std::string& path);

nlohmann::json config_to_json(const ExperimentConfig& config);

nlohmann::json strategy_to_json(const StrategyKind& kind);
StrategyKind strategy_from_json(const nlohmann::json& doc);

}  // namespace dauction

#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "dauction/config.hpp"
#include "dauction/sim.hpp"
#include "dauction/theory.hpp"

namespace dauction {

// %.9g, with -0 printed as 0 and NaN as "nan".
std::string format_number(double value);

/// Header t,metric,agent_id,mean,q25,q75; rows grouped by t. agent_id is empty
/// for market-wide metrics.
std::string series_csv(const AggregateResult& result);

/// beta = 4, alpha range from the agents' alphas, b_max from the config or the
/// largest valuation.
TheoryParams theory_params_for(const MarketSetup& setup, const ExperimentConfig& config);

// Config as it is echoed in summaries: instance inlined, host-only keys dropped.
nlohmann::json resolved_config_json(const ExperimentConfig& config, const AggregateResult& result);

nlohmann::json summary_json(const AggregateResult& result, const ExperimentConfig& config);

// Two-space indent, trailing newline.
std::string dump_json(const nlohmann::json& doc);

/// Writes series.csv and summary.json into dir, creating it if needed.
/// Throws IoError on any filesystem failure.
void emit_results(const AggregateResult& result, const ExperimentConfig& config,
                  const std::filesystem::path& dir);

void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace dauction

#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "dauction/agents.hpp"
#include "dauction/config.hpp"
#include "dauction/environment.hpp"
#include "dauction/market.hpp"
#include "dauction/metrics.hpp"
#include "dauction/rng.hpp"

namespace dauction {

// Everything a path needs that does not change between rounds.
struct MarketSetup {
  ValuationProfile profile;
  NoiseModel noise;
  std::vector<StrategyKind> buyer_strategies;
  std::vector<StrategyKind> seller_strategies;
  std::vector<double> buyer_alphas;
  std::vector<double> seller_alphas;
  // Set for agents that do not learn (truthful, deviant).
  std::vector<std::optional<double>> buyer_fixed_bids;
  std::vector<std::optional<double>> seller_fixed_bids;
  double valuation_cap = 1.0;
  bool relaxed = false;
};

/// Assigns strategies and alphas to agents and precomputes fixed bids.
/// Throws InvalidInput when the pieces do not fit together.
MarketSetup make_setup(const ExperimentConfig& config, ValuationProfile profile,
                       std::vector<double> buyer_alphas, std::vector<double> seller_alphas);

struct PathState {
  std::uint64_t t = 0;  // rounds completed
  std::vector<AgentBelief> buyers;
  std::vector<AgentBelief> sellers;
  RegretLedger ledger;
  Rng rng;

  // Per-round scratch, reused.
  std::vector<double> buyer_bids;
  std::vector<double> seller_bids;
  RoundOutcome outcome;
  Clearing clearing;
};

PathState initial_state(const MarketSetup& setup, Rng rng);

/// Plays round t+1: bids, clearing, one fresh sample for each trading agent,
/// ledger update. The returned reference lives in state until the next step.
const RoundOutcome& step_round(PathState& state, const MarketSetup& setup);

// Rounds that end up in traces: 1, every multiple of stride, and T.
std::vector<std::uint64_t> trace_rounds(std::uint64_t horizon, std::uint64_t stride);

// Exact per-round counters, independent of the trace stride.
struct PathStats {
  std::uint64_t tail_rounds = 0;          // t > 0.9 T
  std::uint64_t tail_k_at_kstar = 0;
  std::uint64_t tail_priced_rounds = 0;
  double tail_abs_price_dev = 0.0;
  std::uint64_t post_warmup_rounds = 0;   // t > 0.01 T
  std::uint64_t post_warmup_k_below = 0;
  std::uint64_t violations = 0;           // unbalanced trades, or a trader priced out

  bool operator==(const PathStats&) const = default;
};

// Series sampled at trace_rounds(); agent series are point-major.
struct PathTrace {
  std::vector<double> k;
  std::vector<double> price_dev;  // p(t) - p*, NaN when no price or no p*
  std::vector<double> price_dev_abs_cum;
  std::vector<double> social;
  std::vector<double> buyer_regret;   // [point * N + i]
  std::vector<double> seller_regret;  // [point * M + j]
  RegretLedger ledger;
  std::vector<AgentBelief> buyers;
  std::vector<AgentBelief> sellers;
  PathStats stats;
};

PathTrace run_path(const MarketSetup& setup, std::uint64_t horizon, std::uint64_t stride, Rng rng);

/// Path i uses Rng::stream(master_seed, i). threads <= 0 means the OpenMP default.
std::vector<PathTrace> run_paths(const MarketSetup& setup, std::uint64_t horizon,
                                 std::uint64_t stride, std::uint64_t master_seed,
                                 std::uint64_t paths, int threads = 0);
// Reference implementation: same contract, one thread, no OpenMP.
std::vector<PathTrace> run_paths_serial(const MarketSetup& setup, std::uint64_t horizon,
                                        std::uint64_t stride, std::uint64_t master_seed,
                                        std::uint64_t paths);

/// Linear interpolation between order statistics: h = (n-1) q.
/// Sorts values in place. NaN for an empty input.
double quantile(std::vector<double>& values, double q);

struct SeriesBand {
  std::vector<double> mean;
  std::vector<double> q25;
  std::vector<double> q75;
};

struct AggregateResult {
  MarketSetup setup;
  std::optional<InstanceSpec> generated_from;
  std::uint64_t horizon = 0;
  std::uint64_t paths = 0;
  std::vector<std::uint64_t> rounds;
  SeriesBand k;
  SeriesBand price_dev;
  SeriesBand price_dev_abs_cum;
  SeriesBand social;
  std::vector<SeriesBand> buyer_regret;
  std::vector<SeriesBand> seller_regret;
  std::vector<RegretLedger> final_ledgers;  // by path index
  std::vector<PathStats> stats;             // by path index
};

/// Folds path traces in index order; NaN entries are skipped per point.
AggregateResult aggregate(const MarketSetup& setup, std::uint64_t horizon, std::uint64_t stride,
                          const std::vector<PathTrace>& traces);

struct ResolvedInstance {
  ValuationProfile profile;
  std::optional<InstanceSpec> generated_from;
};
ResolvedInstance resolve_instance(const InstanceSource& source);

/// Per-agent alphas: drawn from stream Rng::kAlphaStream (buyers, then sellers)
/// for a range, copied for explicit vectors.
std::pair<std::vector<double>, std::vector<double>> resolve_alphas(const ExperimentConfig& config,
                                                                   const ValuationProfile& profile);

enum class Execution { parallel, serial };

AggregateResult run_experiment(const ExperimentConfig& config,
                               Execution execution = Execution::parallel);

}  // namespace dauction

#pragma once

#include <cstdint>
#include <vector>

#include "dauction/market.hpp"

namespace dauction {

/// Per-round regret of one agent against the oracle outcome, in mean utilities.
/// Optimal buyer: B_i - p* when left out, p(t) - p* when matched.
/// Other buyer:   p(t) - B_i when matched, else 0. Sellers mirror the signs.
double individual_increment(const ValuationProfile& profile, const RoundOutcome& outcome,
                            Side side, std::size_t agent_id);

/// Oracle welfare minus realized welfare, where welfare is the value held by
/// matched buyers plus unmatched sellers after the round.
double social_increment(const ValuationProfile& profile, const RoundOutcome& outcome);

/// |p(t) - p*| when a price was set, else 0. Requires p*.
double price_deviation_increment(const RoundOutcome& outcome, const ValuationProfile& profile);

// Running totals for one sample path. Single writer.
struct RegretLedger {
  std::vector<double> buyer_regret;
  std::vector<double> seller_regret;
  double social_regret = 0.0;
  double price_deviation = 0.0;  // sum of |p(t) - p*|
  std::vector<std::uint64_t> buyer_matches;
  std::vector<std::uint64_t> seller_matches;
  std::uint64_t rounds = 0;

  // Noisy realized utilities, diagnostics only; regret never reads these.
  std::vector<double> buyer_realized_utility;
  std::vector<double> seller_realized_utility;

  RegretLedger() = default;
  RegretLedger(std::size_t n_buyers, std::size_t m_sellers);

  void record(const ValuationProfile& profile, const RoundOutcome& outcome);

  bool operator==(const RegretLedger&) const = default;
};

}  // namespace dauction

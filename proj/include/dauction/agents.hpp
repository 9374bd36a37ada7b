#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "dauction/market.hpp"

namespace dauction {

class Rng;

inline constexpr double kMinProtocolAlpha = 4.0;

// One agent's private estimate of its own valuation; mean = sample_sum / participation_count.
struct AgentBelief {
  Side side = Side::buyer;
  double alpha = kMinProtocolAlpha;
  std::uint64_t participation_count = 0;
  double sample_sum = 0.0;

  // NaN until the first sample.
  double empirical_mean() const;

  bool operator==(const AgentBelief&) const = default;
};

/// UCB bid of a buyer: mean + sqrt(alpha * ln(round_t) / n), or the valuation
/// cap before the first sample.
double ucb_bid(const AgentBelief& belief, std::uint64_t round_t, double valuation_cap);

/// LCB ask of a seller: mean - sqrt(alpha * ln(round_t) / n), or 0 before the
/// first sample. May be negative.
double lcb_bid(const AgentBelief& belief, std::uint64_t round_t);

AgentBelief update_belief(AgentBelief belief, double observed_sample);

struct ConfidenceBound {
  bool operator==(const ConfidenceBound&) const = default;
};
// Bids a fixed value; the agent's true valuation when value is empty.
struct Truthful {
  std::optional<double> value;
  bool operator==(const Truthful&) const = default;
};
// Myopic price-setter deviations against confidence-bound opponents.
struct DeviantBuyerKStar {
  double epsilon = 0.01;
  bool operator==(const DeviantBuyerKStar&) const = default;
};
struct DeviantSellerKStar {
  double epsilon = 0.01;
  bool operator==(const DeviantSellerKStar&) const = default;
};
struct DeviantBoth {
  double epsilon = 0.01;
  bool operator==(const DeviantBoth&) const = default;
};

using StrategyKind =
    std::variant<ConfidenceBound, Truthful, DeviantBuyerKStar, DeviantSellerKStar, DeviantBoth>;

std::string strategy_name(const StrategyKind& kind);
bool is_deviant(const StrategyKind& kind);

/// Fixed bid of a myopic deviant who knows the true profile. Only the K*-th
/// ranked buyer (for buyer deviations) or K*-th ranked seller may deviate.
///   buyer:  max(S_K*, B_K*+1) + eps     (B_K*+1 = -inf when K* = N)
///   seller: min(B_K*, S_K*+1) - eps     (S_K*+1 = +inf when K* = M)
///   both:   the same with S_K* / B_K* replaced by the midpoint p*.
double deviant_bid(const StrategyKind& kind, const ValuationProfile& profile, Side side,
                   std::size_t agent_id);

/// Checks the protocol's alpha >= 4 rule. Returns one message per violation.
std::vector<std::string> check_alphas(std::span<const double> alphas, Side side,
                                      bool allow_below_protocol_min);

std::vector<double> draw_alphas(std::size_t count, double lo, double hi, Rng& rng);

}  // namespace dauction

#include "dauction/metrics.hpp"

#include <cmath>

#include "dauction/error.hpp"

namespace dauction {

double individual_increment(const ValuationProfile& profile, const RoundOutcome& outcome,
                            Side side, std::size_t agent_id) {
  if (side == Side::buyer) {
    if (agent_id >= profile.n_buyers()) throw InvalidInput("buyer id out of range");
    const double value = profile.buyer_values[agent_id];
    const bool matched = outcome.buyer_participates(agent_id);
    if (profile.is_optimal_buyer(agent_id)) {
      return matched ? *outcome.price - *profile.p_star : value - *profile.p_star;
    }
    return matched ? *outcome.price - value : 0.0;
  }
  if (agent_id >= profile.m_sellers()) throw InvalidInput("seller id out of range");
  const double value = profile.seller_values[agent_id];
  const bool matched = outcome.seller_participates(agent_id);
  if (profile.is_optimal_seller(agent_id)) {
    return matched ? *profile.p_star - *outcome.price : *profile.p_star - value;
  }
  return matched ? value - *outcome.price : 0.0;
}

double social_increment(const ValuationProfile& profile, const RoundOutcome& outcome) {
  // Only agents whose status differs from the oracle contribute.
  double lost = 0.0;
  for (std::size_t i = 0; i < profile.n_buyers(); ++i) {
    const bool opt = profile.is_optimal_buyer(i);
    const bool now = outcome.buyer_participates(i);
    if (opt && !now) lost += profile.buyer_values[i];
    if (!opt && now) lost -= profile.buyer_values[i];
  }
  for (std::size_t j = 0; j < profile.m_sellers(); ++j) {
    const bool opt = profile.is_optimal_seller(j);
    const bool now = outcome.seller_participates(j);
    if (!opt && now) lost += profile.seller_values[j];
    if (opt && !now) lost -= profile.seller_values[j];
  }
  return lost;
}

double price_deviation_increment(const RoundOutcome& outcome, const ValuationProfile& profile) {
  if (!profile.p_star) throw InvalidInput("price deviation needs K* >= 1");
  if (outcome.k == 0 || !outcome.price) return 0.0;
  return std::abs(*outcome.price - *profile.p_star);
}

RegretLedger::RegretLedger(std::size_t n_buyers, std::size_t m_sellers)
    : buyer_regret(n_buyers, 0.0),
      seller_regret(m_sellers, 0.0),
      buyer_matches(n_buyers, 0),
      seller_matches(m_sellers, 0),
      buyer_realized_utility(n_buyers, 0.0),
      seller_realized_utility(m_sellers, 0.0) {}

void RegretLedger::record(const ValuationProfile& profile, const RoundOutcome& outcome) {
  for (std::size_t i = 0; i < buyer_regret.size(); ++i) {
    buyer_regret[i] += individual_increment(profile, outcome, Side::buyer, i);
  }
  for (std::size_t j = 0; j < seller_regret.size(); ++j) {
    seller_regret[j] += individual_increment(profile, outcome, Side::seller, j);
  }
  for (std::size_t id : outcome.participating_buyers) ++buyer_matches[id];
  for (std::size_t id : outcome.participating_sellers) ++seller_matches[id];
  social_regret += social_increment(profile, outcome);
  if (profile.p_star) price_deviation += price_deviation_increment(outcome, profile);
  ++rounds;
}

}  // namespace dauction

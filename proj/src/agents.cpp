#include "dauction/agents.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "dauction/error.hpp"
#include "dauction/rng.hpp"

namespace dauction {

namespace {

double confidence_width(const AgentBelief& belief, std::uint64_t round_t) {
  if (round_t < 1) throw InvalidInput("round index must be >= 1");
  return std::sqrt(belief.alpha * std::log(static_cast<double>(round_t)) /
                   static_cast<double>(belief.participation_count));
}

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};

}  // namespace

double AgentBelief::empirical_mean() const {
  if (participation_count == 0) return std::numeric_limits<double>::quiet_NaN();
  return sample_sum / static_cast<double>(participation_count);
}

double ucb_bid(const AgentBelief& belief, std::uint64_t round_t, double valuation_cap) {
  if (belief.side != Side::buyer) throw InvalidInput("ucb_bid expects a buyer belief");
  if (round_t < 1) throw InvalidInput("round index must be >= 1");
  if (belief.participation_count == 0) return valuation_cap;
  return belief.empirical_mean() + confidence_width(belief, round_t);
}

double lcb_bid(const AgentBelief& belief, std::uint64_t round_t) {
  if (belief.side != Side::seller) throw InvalidInput("lcb_bid expects a seller belief");
  if (round_t < 1) throw InvalidInput("round index must be >= 1");
  if (belief.participation_count == 0) return 0.0;
  return belief.empirical_mean() - confidence_width(belief, round_t);
}

AgentBelief update_belief(AgentBelief belief, double observed_sample) {
  if (!std::isfinite(observed_sample)) throw InvalidInput("observation must be finite");
  belief.sample_sum += observed_sample;
  ++belief.participation_count;
  return belief;
}

std::string strategy_name(const StrategyKind& kind) {
  return std::visit(Overloaded{
                        [](const ConfidenceBound&) { return std::string("confidence_bound"); },
                        [](const Truthful&) { return std::string("truthful"); },
                        [](const DeviantBuyerKStar&) { return std::string("deviant_buyer_kstar"); },
                        [](const DeviantSellerKStar&) { return std::string("deviant_seller_kstar"); },
                        [](const DeviantBoth&) { return std::string("deviant_both"); },
                    },
                    kind);
}

bool is_deviant(const StrategyKind& kind) {
  return std::holds_alternative<DeviantBuyerKStar>(kind) ||
         std::holds_alternative<DeviantSellerKStar>(kind) ||
         std::holds_alternative<DeviantBoth>(kind);
}

double deviant_bid(const StrategyKind& kind, const ValuationProfile& profile, Side side,
                   std::size_t agent_id) {
  const std::size_t ks = profile.k_star;
  if (ks == 0) throw InvalidInput("deviation is undefined when no trade happens under truth");
  const auto& rank = side == Side::buyer ? profile.buyer_rank_order : profile.seller_rank_order;
  if (agent_id >= rank.size()) throw InvalidInput("agent id out of range");
  if (rank[ks - 1] != agent_id) {
    throw InvalidInput(std::string("only the K*-th ") + to_string(side) + " sets the price");
  }

  constexpr double inf = std::numeric_limits<double>::infinity();
  const auto buyers = profile.sorted_buyer_values();
  const auto sellers = profile.sorted_seller_values();
  const double b_k = buyers[ks - 1];
  const double s_k = sellers[ks - 1];
  const double b_next = ks < buyers.size() ? buyers[ks] : -inf;
  const double s_next = ks < sellers.size() ? sellers[ks] : inf;

  auto epsilon_of = [](double eps) {
    if (!(eps > 0.0)) throw InvalidInput("deviation epsilon must be > 0");
    return eps;
  };

  return std::visit(
      Overloaded{
          [&](const DeviantBuyerKStar& d) -> double {
            if (side != Side::buyer) throw InvalidInput("deviant_buyer_kstar applies to buyers");
            return std::max(s_k, b_next) + epsilon_of(d.epsilon);
          },
          [&](const DeviantSellerKStar& d) -> double {
            if (side != Side::seller) throw InvalidInput("deviant_seller_kstar applies to sellers");
            return std::min(b_k, s_next) - epsilon_of(d.epsilon);
          },
          [&](const DeviantBoth& d) -> double {
            const double mid = (b_k + s_k) / 2.0;
            if (side == Side::buyer) return std::max(mid, b_next) + epsilon_of(d.epsilon);
            return std::min(mid, s_next) - epsilon_of(d.epsilon);
          },
          [](const auto&) -> double { throw InvalidInput("strategy is not a deviation"); },
      },
      kind);
}

std::vector<std::string> check_alphas(std::span<const double> alphas, Side side,
                                      bool allow_below_protocol_min) {
  std::vector<std::string> problems;
  for (std::size_t i = 0; i < alphas.size(); ++i) {
    const double a = alphas[i];
    if (!std::isfinite(a) || a < 0.0) {
      problems.push_back(std::string(to_string(side)) + " " + std::to_string(i) +
                         ": alpha must be a finite non-negative number");
    } else if (a < kMinProtocolAlpha && !allow_below_protocol_min) {
      problems.push_back(std::string(to_string(side)) + " " + std::to_string(i) + ": alpha " +
                         std::to_string(a) +
                         " is below the protocol minimum min(alpha) >= 4 "
                         "(set allow_alpha_below_4 to override)");
    }
  }
  return problems;
}

std::vector<double> draw_alphas(std::size_t count, double lo, double hi, Rng& rng) {
  std::vector<double> out(count);
  for (auto& a : out) a = rng.uniform(lo, hi);
  return out;
}

}  // namespace dauction

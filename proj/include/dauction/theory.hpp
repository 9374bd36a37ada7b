#pragma once

#include <cstdint>
#include <vector>

#include <json.hpp>

#include "dauction/market.hpp"

namespace dauction {

// beta is the confidence-event scale, 4 by default.
struct TheoryParams {
  double beta = 4.0;
  double alpha_max = 4.0;
  double alpha_min = 4.0;
  double b_max = 1.0;
};

// (sqrt(alpha_max) + sqrt(beta))^2, the numerator shared by every log T term.
double confidence_coefficient(const TheoryParams& params);

struct SocialBound {
  double log_coefficient = 0.0;  // multiplies ln T
  double constant = 0.0;         // M N b_max pi^2 / 6
  double at(std::uint64_t horizon) const;
};

/// Upper bound on expected social-welfare regret: the three gap double sums
/// (participant vs non-participant buyers, sellers, and non-participant pairs)
/// times the confidence coefficient, plus M N b_max pi^2/6.
/// Throws DegenerateInstance on K* = 0 or any non-positive gap, InvalidInput on alpha_min < beta.
SocialBound social_upper_bound(const ValuationProfile& profile, const TheoryParams& params);
double social_upper_bound(const ValuationProfile& profile, const TheoryParams& params,
                          std::uint64_t horizon);

// Price-deviation constants C_b and C_s from the cumulative |p(t) - p*| bound.
struct PriceConstants {
  double c_buyer = 0.0;
  double c_seller = 0.0;
};
PriceConstants price_deviation_constants(const ValuationProfile& profile,
                                         const TheoryParams& params);

struct AgentBound {
  Side side = Side::buyer;
  std::size_t agent_id = 0;
  bool participant = false;
  double sqrt_coefficient = 0.0;  // multiplies sqrt(T ln T); 0 for non-participants
  double log_coefficient = 0.0;   // multiplies ln T (C' for participants)
  double at(std::uint64_t horizon) const;
};

/// Per-agent individual regret bounds, buyers (by id) then sellers (by id).
/// Participants: (sqrt(alpha_max)+sqrt(beta)) sqrt(T ln T) + C' ln T with
/// C'_b,i = (N-K*) c / (B_i - p*) + C_b and C'_s,j = (M-K*) c / (p* - S_j) + C_s.
/// Non-participant buyer: sqrt(M-K*+1) c / (B_K* - B_i) ln T; seller mirrors with N.
std::vector<AgentBound> individual_upper_bounds(const ValuationProfile& profile,
                                                const TheoryParams& params);

// Gap-only upper bounds on C'_b and C'_s (worst case over agents).
PriceConstants participant_constant_caps(const ValuationProfile& profile,
                                         const TheoryParams& params);

/// Closed-form lower bound on the asymptotic social-regret constant:
/// sum_{i>K*} 2 / (min(B_K*, S_K*+1) - B_i) + sum_{j>K*} 2 / (S_j - max(S_K*, B_K*+1)).
double social_lower_bound_constant(const ValuationProfile& profile);

// sqrt(T) / 36, the minimax participant-regret reference line.
double minimax_reference(std::uint64_t horizon);

/// Everything above for one instance, as a JSON report.
nlohmann::json theory_report(const ValuationProfile& profile, const TheoryParams& params,
                             std::uint64_t horizon);

}  // namespace dauction

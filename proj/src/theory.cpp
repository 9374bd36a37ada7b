#include "dauction/theory.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "dauction/error.hpp"

namespace dauction {

using nlohmann::json;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Profile values in rank order plus the sizes every bound needs.
struct Ranked {
  std::vector<double> b;  // b[0] = B_1 (largest)
  std::vector<double> s;  // s[0] = S_1 (smallest)
  std::size_t n = 0;
  std::size_t m = 0;
  std::size_t k = 0;
  double p = 0.0;

  double b_k() const { return b[k - 1]; }
  double s_k() const { return s[k - 1]; }
};

Ranked ranked(const ValuationProfile& profile) {
  if (profile.k_star == 0 || !profile.p_star) {
    throw DegenerateInstance("theory bounds need K* >= 1 (no trade under true valuations)");
  }
  return Ranked{profile.sorted_buyer_values(), profile.sorted_seller_values(),
                profile.n_buyers(), profile.m_sellers(), profile.k_star, *profile.p_star};
}

double inverse_gap(double gap, const char* what) {
  if (!(gap > 0.0)) throw DegenerateInstance(std::string("non-positive gap in ") + what);
  return 1.0 / gap;
}

void check_params(const TheoryParams& params) {
  if (!(params.beta >= 4.0)) throw InvalidInput("beta must be >= 4");
  if (!(params.alpha_min >= params.beta)) {
    throw InvalidInput("bounds hold only for alpha_min >= beta (>= 4)");
  }
  if (!(params.alpha_max >= params.alpha_min)) throw InvalidInput("alpha_max < alpha_min");
  if (!std::isfinite(params.b_max) || params.b_max < 0.0) throw InvalidInput("b_max must be >= 0");
}

double log_t(std::uint64_t horizon) {
  if (horizon < 1) throw InvalidInput("horizon must be >= 1");
  return std::log(static_cast<double>(horizon));
}

}  // namespace

double confidence_coefficient(const TheoryParams& params) {
  const double root = std::sqrt(params.alpha_max) + std::sqrt(params.beta);
  return root * root;
}

double SocialBound::at(std::uint64_t horizon) const {
  return log_coefficient * log_t(horizon) + constant;
}

SocialBound social_upper_bound(const ValuationProfile& profile, const TheoryParams& params) {
  check_params(params);
  const Ranked r = ranked(profile);
  double sum = 0.0;
  for (std::size_t i = 0; i < r.k; ++i) {
    for (std::size_t i2 = r.k; i2 < r.n; ++i2) sum += inverse_gap(r.b[i] - r.b[i2], "B_i - B_i'");
  }
  for (std::size_t j = 0; j < r.k; ++j) {
    for (std::size_t j2 = r.k; j2 < r.m; ++j2) sum += inverse_gap(r.s[j2] - r.s[j], "S_j' - S_j");
  }
  for (std::size_t j2 = r.k; j2 < r.m; ++j2) {
    for (std::size_t i2 = r.k; i2 < r.n; ++i2) sum += inverse_gap(r.s[j2] - r.b[i2], "S_j' - B_i'");
  }
  SocialBound bound;
  bound.log_coefficient = confidence_coefficient(params) * sum;
  bound.constant = static_cast<double>(r.m * r.n) * params.b_max * std::numbers::pi *
                   std::numbers::pi / 6.0;
  return bound;
}

double social_upper_bound(const ValuationProfile& profile, const TheoryParams& params,
                          std::uint64_t horizon) {
  return social_upper_bound(profile, params).at(horizon);
}

PriceConstants price_deviation_constants(const ValuationProfile& profile,
                                         const TheoryParams& params) {
  check_params(params);
  const Ranked r = ranked(profile);
  const double c = confidence_coefficient(params);
  const double buyers_left = static_cast<double>(r.n - r.k + 1);
  const double sellers_left = static_cast<double>(r.m - r.k + 1);

  double twice_cb = 0.0;
  for (std::size_t j = 0; j + 1 < r.k; ++j) twice_cb += c * inverse_gap(r.s_k() - r.s[j], "S_K* - S_j");
  for (std::size_t i = r.k; i < r.n; ++i) {
    twice_cb += c * std::sqrt(sellers_left) * inverse_gap(r.b_k() - r.b[i], "B_K* - B_i");
  }
  for (std::size_t j = r.k; j < r.m; ++j) {
    const double inv = inverse_gap(r.s[j] - r.s_k(), "S_j - S_K*");
    twice_cb += (buyers_left * c + std::sqrt(buyers_left) * c) * inv;
  }

  double twice_cs = 0.0;
  for (std::size_t i = 0; i + 1 < r.k; ++i) twice_cs += c * inverse_gap(r.b[i] - r.b_k(), "B_i - B_K*");
  for (std::size_t j = r.k; j < r.m; ++j) {
    twice_cs += c * std::sqrt(buyers_left) * inverse_gap(r.s[j] - r.s_k(), "S_j - S_K*");
  }
  for (std::size_t i = r.k; i < r.n; ++i) {
    const double inv = inverse_gap(r.b_k() - r.b[i], "B_K* - B_i");
    twice_cs += (sellers_left * c + std::sqrt(sellers_left) * c) * inv;
  }
  return PriceConstants{twice_cb / 2.0, twice_cs / 2.0};
}

double AgentBound::at(std::uint64_t horizon) const {
  const double lt = log_t(horizon);
  return sqrt_coefficient * std::sqrt(static_cast<double>(horizon) * lt) + log_coefficient * lt;
}

std::vector<AgentBound> individual_upper_bounds(const ValuationProfile& profile,
                                                const TheoryParams& params) {
  check_params(params);
  const Ranked r = ranked(profile);
  const double c = confidence_coefficient(params);
  const double lead = std::sqrt(params.alpha_max) + std::sqrt(params.beta);
  const PriceConstants pc = price_deviation_constants(profile, params);

  std::vector<AgentBound> out;
  out.reserve(r.n + r.m);
  for (std::size_t id = 0; id < r.n; ++id) {
    AgentBound bound{Side::buyer, id, profile.is_optimal_buyer(id), 0.0, 0.0};
    const double value = profile.buyer_values[id];
    if (bound.participant) {
      bound.sqrt_coefficient = lead;
      bound.log_coefficient =
          static_cast<double>(r.n - r.k) * c * inverse_gap(value - r.p, "B_i - p*") + pc.c_buyer;
    } else {
      bound.log_coefficient = std::sqrt(static_cast<double>(r.m - r.k + 1)) * c *
                              inverse_gap(r.b_k() - value, "B_K* - B_i");
    }
    out.push_back(bound);
  }
  for (std::size_t id = 0; id < r.m; ++id) {
    AgentBound bound{Side::seller, id, profile.is_optimal_seller(id), 0.0, 0.0};
    const double value = profile.seller_values[id];
    if (bound.participant) {
      bound.sqrt_coefficient = lead;
      bound.log_coefficient =
          static_cast<double>(r.m - r.k) * c * inverse_gap(r.p - value, "p* - S_j") + pc.c_seller;
    } else {
      bound.log_coefficient = std::sqrt(static_cast<double>(r.n - r.k + 1)) * c *
                              inverse_gap(value - r.s_k(), "S_j - S_K*");
    }
    out.push_back(bound);
  }
  return out;
}

PriceConstants participant_constant_caps(const ValuationProfile& profile,
                                         const TheoryParams& params) {
  check_params(params);
  const Ranked r = ranked(profile);
  const double delta = profile.delta.value_or(0.0);
  const double inv = inverse_gap(delta, "minimum gap");
  const double c = confidence_coefficient(params);
  const double nl = static_cast<double>(r.n - r.k + 1);
  const double ml = static_cast<double>(r.m - r.k + 1);
  const double shared = nl * std::sqrt(ml) + std::sqrt(nl) * ml + nl * ml;
  return PriceConstants{(static_cast<double>(r.n) + shared) * c * inv,
                        (static_cast<double>(r.m) + shared) * c * inv};
}

double social_lower_bound_constant(const ValuationProfile& profile) {
  const Ranked r = ranked(profile);
  const double b_next = r.k < r.n ? r.b[r.k] : -kInf;
  const double s_next = r.k < r.m ? r.s[r.k] : kInf;
  const double buyer_edge = std::min(r.b_k(), s_next);
  const double seller_edge = std::max(r.s_k(), b_next);
  double sum = 0.0;
  for (std::size_t i = r.k; i < r.n; ++i) {
    sum += 2.0 * inverse_gap(buyer_edge - r.b[i], "min(B_K*, S_K*+1) - B_i");
  }
  for (std::size_t j = r.k; j < r.m; ++j) {
    sum += 2.0 * inverse_gap(r.s[j] - seller_edge, "S_j - max(S_K*, B_K*+1)");
  }
  return sum;
}

double minimax_reference(std::uint64_t horizon) {
  return std::sqrt(static_cast<double>(horizon)) / 36.0;
}

json theory_report(const ValuationProfile& profile, const TheoryParams& params,
                   std::uint64_t horizon) {
  const SocialBound social = social_upper_bound(profile, params);
  const PriceConstants pc = price_deviation_constants(profile, params);
  const PriceConstants caps = participant_constant_caps(profile, params);

  json agents = json::array();
  for (const AgentBound& b : individual_upper_bounds(profile, params)) {
    agents.push_back(json{{"side", to_string(b.side)},
                          {"agent_id", b.agent_id},
                          {"participant", b.participant},
                          {"sqrt_t_log_t_coefficient", b.sqrt_coefficient},
                          {"log_t_coefficient", b.log_coefficient},
                          {"bound", b.at(horizon)}});
  }

  return json{
      {"horizon", horizon},
      {"params",
       {{"beta", params.beta},
        {"alpha_max", params.alpha_max},
        {"alpha_min", params.alpha_min},
        {"b_max", params.b_max}}},
      {"k_star", profile.k_star},
      {"p_star", *profile.p_star},
      {"delta", profile.delta.value_or(0.0)},
      {"confidence_coefficient", confidence_coefficient(params)},
      {"social_upper_bound",
       {{"log_t_coefficient", social.log_coefficient},
        {"constant", social.constant},
        {"value", social.at(horizon)}}},
      {"price_deviation_constants", {{"c_b", pc.c_buyer}, {"c_s", pc.c_seller}}},
      {"participant_constant_caps", {{"c_b_prime", caps.c_buyer}, {"c_s_prime", caps.c_seller}}},
      {"individual_upper_bounds", agents},
      {"social_lower_bound_constant", social_lower_bound_constant(profile)},
      {"minimax_reference", minimax_reference(horizon)},
  };
}

}  // namespace dauction

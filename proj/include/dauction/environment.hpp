#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include <json.hpp>

#include "dauction/market.hpp"

namespace dauction {

class Rng;

struct NoiseModel {
  enum class Kind { gaussian, bernoulli };
  Kind kind = Kind::bernoulli;

  bool operator==(const NoiseModel&) const = default;
};

const char* to_string(NoiseModel::Kind kind);
NoiseModel::Kind noise_kind_from_string(const std::string& name);

struct InstanceSpec {
  std::size_t n_buyers = 8;
  std::size_t m_sellers = 8;
  std::size_t k_star = 5;
  double min_gap = 0.2;
  double lo = 0.0;
  double hi = 1.0;
  std::uint64_t seed = 0;

  bool operator==(const InstanceSpec&) const = default;
};

inline constexpr std::uint64_t kInstanceDrawBudget = 1'000'000;

/// Rejection sampler: draws all N+M values i.i.d. uniform on [lo, hi] and
/// keeps the first draw whose oracle clearing has exactly K* trades and gap >= min_gap.
/// Throws InvalidInput for a malformed spec and InfeasibleSpec when the budget runs out.
ValuationProfile generate_instance(const InstanceSpec& spec);

/// One noisy observation of a true valuation: value + N(0,1) for gaussian,
/// Bernoulli(value) for bernoulli (value must lie in [0,1]).
double sample_observation(const NoiseModel& noise, double true_value, Rng& rng);

nlohmann::json instance_spec_to_json(const InstanceSpec& spec);
InstanceSpec instance_spec_from_json(const nlohmann::json& doc);

// Profile files: {"buyers": [...], "sellers": [...]} plus derived fields on output.
// Derived fields present on input must agree with the recomputed ones.
nlohmann::json profile_to_json(const ValuationProfile& profile,
                               const std::optional<InstanceSpec>& generated_from = std::nullopt);
ValuationProfile profile_from_json(const nlohmann::json& doc,
                                   std::optional<InstanceSpec>* generated_from = nullptr);

}  // namespace dauction

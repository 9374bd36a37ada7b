#include "dauction/environment.hpp"

#include <cmath>
#include <set>
#include <vector>

#include "dauction/error.hpp"
#include "dauction/rng.hpp"

namespace dauction {

using nlohmann::json;

const char* to_string(NoiseModel::Kind kind) {
  return kind == NoiseModel::Kind::gaussian ? "gaussian" : "bernoulli";
}

NoiseModel::Kind noise_kind_from_string(const std::string& name) {
  if (name == "gaussian") return NoiseModel::Kind::gaussian;
  if (name == "bernoulli") return NoiseModel::Kind::bernoulli;
  throw InvalidInput("unknown noise model '" + name + "' (expected gaussian or bernoulli)");
}

ValuationProfile generate_instance(const InstanceSpec& spec) {
  if (spec.n_buyers < 1 || spec.m_sellers < 1) throw InvalidInput("need N >= 1 and M >= 1");
  if (spec.k_star < 1 || spec.k_star > std::min(spec.n_buyers, spec.m_sellers)) {
    throw InvalidInput("need 1 <= K* <= min(N, M)");
  }
  if (!(spec.min_gap > 0.0) || !std::isfinite(spec.min_gap)) {
    throw InvalidInput("min_gap must be a positive finite number");
  }
  if (!std::isfinite(spec.lo) || !std::isfinite(spec.hi) || !(spec.lo < spec.hi)) {
    throw InvalidInput("value range must satisfy lo < hi");
  }
  // p* sits between a buyer and a seller value that are both >= gap away from it.
  if (spec.hi - spec.lo < 2.0 * spec.min_gap) {
    throw InfeasibleSpec("value range is narrower than twice the requested gap");
  }

  Rng rng(spec.seed);
  std::vector<double> buyers(spec.n_buyers);
  std::vector<double> sellers(spec.m_sellers);
  for (std::uint64_t draw = 0; draw < kInstanceDrawBudget; ++draw) {
    for (auto& b : buyers) b = rng.uniform(spec.lo, spec.hi);
    for (auto& s : sellers) s = rng.uniform(spec.lo, spec.hi);
    ValuationProfile candidate = oracle_solution(buyers, sellers);
    if (candidate.k_star == spec.k_star && candidate.delta && *candidate.delta >= spec.min_gap) {
      return candidate;
    }
  }
  throw InfeasibleSpec("no instance with K*=" + std::to_string(spec.k_star) +
                       " and gap >= " + std::to_string(spec.min_gap) + " within " +
                       std::to_string(kInstanceDrawBudget) + " draws");
}

double sample_observation(const NoiseModel& noise, double true_value, Rng& rng) {
  switch (noise.kind) {
    case NoiseModel::Kind::gaussian:
      return true_value + rng.normal();
    case NoiseModel::Kind::bernoulli:
      if (!(true_value >= 0.0 && true_value <= 1.0)) {
        throw InvalidInput("bernoulli rewards need a true value in [0, 1]");
      }
      return rng.bernoulli(true_value) ? 1.0 : 0.0;
  }
  throw InvalidInput("unknown noise kind");
}

json instance_spec_to_json(const InstanceSpec& spec) {
  return json{{"n_buyers", spec.n_buyers}, {"m_sellers", spec.m_sellers},
              {"k_star", spec.k_star},     {"min_gap", spec.min_gap},
              {"value_range", {spec.lo, spec.hi}}, {"seed", spec.seed}};
}

InstanceSpec instance_spec_from_json(const json& doc) {
  if (!doc.is_object()) throw InvalidInput("instance spec must be an object");
  static const std::set<std::string> known{"n_buyers", "m_sellers", "k_star",
                                           "min_gap",  "value_range", "seed"};
  for (const auto& item : doc.items()) {
    if (!known.contains(item.key())) throw InvalidInput("unknown instance key '" + item.key() + "'");
  }
  InstanceSpec spec;
  try {
    spec.n_buyers = doc.value("n_buyers", spec.n_buyers);
    spec.m_sellers = doc.value("m_sellers", spec.m_sellers);
    spec.k_star = doc.value("k_star", spec.k_star);
    spec.min_gap = doc.value("min_gap", spec.min_gap);
    spec.seed = doc.value("seed", spec.seed);
    if (doc.contains("value_range")) {
      const auto& range = doc.at("value_range");
      if (!range.is_array() || range.size() != 2) {
        throw InvalidInput("value_range must be [lo, hi]");
      }
      spec.lo = range[0].get<double>();
      spec.hi = range[1].get<double>();
    }
  } catch (const json::exception& e) {
    throw InvalidInput(std::string("malformed instance spec: ") + e.what());
  }
  return spec;
}

json profile_to_json(const ValuationProfile& profile,
                     const std::optional<InstanceSpec>& generated_from) {
  json doc{{"buyers", profile.buyer_values},
           {"sellers", profile.seller_values},
           {"k_star", profile.k_star},
           {"optimal_buyers", profile.optimal_buyers},
           {"optimal_sellers", profile.optimal_sellers}};
  doc["p_star"] = profile.p_star ? json(*profile.p_star) : json(nullptr);
  doc["delta"] = profile.delta ? json(*profile.delta) : json(nullptr);
  if (generated_from) doc["generated_from"] = instance_spec_to_json(*generated_from);
  return doc;
}

ValuationProfile profile_from_json(const json& doc, std::optional<InstanceSpec>* generated_from) {
  if (!doc.is_object()) throw InvalidInput("profile document must be an object");
  static const std::set<std::string> known{"buyers",         "sellers", "k_star",
                                           "optimal_buyers", "optimal_sellers", "p_star",
                                           "delta",          "generated_from"};
  for (const auto& item : doc.items()) {
    if (!known.contains(item.key())) throw InvalidInput("unknown profile key '" + item.key() + "'");
  }
  if (!doc.contains("buyers") || !doc.contains("sellers")) {
    throw InvalidInput("profile needs 'buyers' and 'sellers'");
  }
  ValuationProfile profile;
  try {
    profile = oracle_solution(doc.at("buyers").get<std::vector<double>>(),
                              doc.at("sellers").get<std::vector<double>>());
  } catch (const json::exception& e) {
    throw InvalidInput(std::string("malformed profile: ") + e.what());
  }

  // Derived fields present on input must match the recomputed ones.
  const json derived = profile_to_json(profile);
  for (const char* key : {"k_star", "optimal_buyers", "optimal_sellers", "p_star", "delta"}) {
    if (doc.contains(key) && doc.at(key) != derived.at(key)) {
      throw InvalidInput(std::string("profile field '") + key +
                         "' disagrees with the values it was derived from");
    }
  }
  if (generated_from) {
    generated_from->reset();
    if (doc.contains("generated_from")) *generated_from = instance_spec_from_json(doc.at("generated_from"));
  }
  return profile;
}

}  // namespace dauction

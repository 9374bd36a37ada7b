#include "dauction/config.hpp"

#include <cmath>
#include <fstream>
#include <functional>
#include <set>

#include "dauction/error.hpp"

namespace dauction {

using nlohmann::json;

namespace {

std::string join_problems(const std::vector<std::string>& problems) {
  std::string text = "invalid configuration:";
  for (const auto& p : problems) text += "\n  - " + p;
  return text;
}

// Accumulates problems instead of stopping at the first one.
class Collector {
 public:
  void fail(std::string message) { problems_.push_back(std::move(message)); }

  template <class Fn>
  void field(const json& doc, const char* key, Fn&& read) {
    if (!doc.contains(key)) return;
    try {
      read(doc.at(key));
    } catch (const json::exception& e) {
      fail(std::string(key) + ": " + e.what());
    } catch (const InvalidInput& e) {
      fail(std::string(key) + ": " + e.what());
    }
  }

  void unknown_keys(const json& doc, const std::set<std::string>& known, const std::string& where) {
    for (const auto& item : doc.items()) {
      if (!known.contains(item.key())) fail("unknown key '" + item.key() + "' in " + where);
    }
  }

  void append(const std::vector<std::string>& more) {
    problems_.insert(problems_.end(), more.begin(), more.end());
  }

  const std::vector<std::string>& problems() const { return problems_; }

 private:
  std::vector<std::string> problems_;
};

std::uint64_t read_count(const json& v) {
  if (!v.is_number_integer()) throw InvalidInput("expected an integer");
  if (v.is_number_unsigned()) return v.get<std::uint64_t>();
  const auto signed_value = v.get<std::int64_t>();
  if (signed_value < 0) throw InvalidInput("expected a non-negative integer");
  return static_cast<std::uint64_t>(signed_value);
}

double read_number(const json& v) {
  if (!v.is_number()) throw InvalidInput("expected a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) throw InvalidInput("expected a finite number");
  return x;
}

InstanceSource instance_from_json(const json& doc) {
  if (!doc.is_object() || doc.size() != 1) {
    throw InvalidInput("instance must be exactly one of {generate}, {profile_path}, {profile}");
  }
  if (doc.contains("generate")) return instance_spec_from_json(doc.at("generate"));
  if (doc.contains("profile_path")) {
    if (!doc.at("profile_path").is_string()) throw InvalidInput("profile_path must be a string");
    return ProfilePath{doc.at("profile_path").get<std::string>()};
  }
  if (doc.contains("profile")) {
    std::optional<InstanceSpec> origin;
    const ValuationProfile profile = profile_from_json(doc.at("profile"), &origin);
    return InlineProfile{profile.buyer_values, profile.seller_values, origin};
  }
  throw InvalidInput("unknown instance source '" + doc.begin().key() + "'");
}

json instance_to_json(const InstanceSource& source) {
  return std::visit(
      [](const auto& s) -> json {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, InstanceSpec>) {
          return json{{"generate", instance_spec_to_json(s)}};
        } else if constexpr (std::is_same_v<T, ProfilePath>) {
          return json{{"profile_path", s.path}};
        } else {
          json profile{{"buyers", s.buyers}, {"sellers", s.sellers}};
          if (s.generated_from) profile["generated_from"] = instance_spec_to_json(*s.generated_from);
          return json{{"profile", profile}};
        }
      },
      source);
}

AlphaSource alpha_from_json(const json& doc) {
  if (!doc.is_object()) throw InvalidInput("alpha must be an object");
  if (doc.contains("range")) {
    if (doc.size() != 1) throw InvalidInput("alpha.range cannot be combined with other keys");
    const auto& r = doc.at("range");
    if (!r.is_array() || r.size() != 2) throw InvalidInput("alpha.range must be [lo, hi]");
    AlphaRange range{read_number(r[0]), read_number(r[1])};
    if (range.lo > range.hi) throw InvalidInput("alpha.range needs lo <= hi");
    return range;
  }
  for (const auto& item : doc.items()) {
    if (item.key() != "buyers" && item.key() != "sellers") {
      throw InvalidInput("unknown key '" + item.key() + "' in alpha");
    }
  }
  if (!doc.contains("buyers") || !doc.contains("sellers")) {
    throw InvalidInput("alpha needs either range or both buyers and sellers vectors");
  }
  return AlphaVectors{doc.at("buyers").get<std::vector<double>>(),
                      doc.at("sellers").get<std::vector<double>>()};
}

json alpha_to_json(const AlphaSource& alpha) {
  if (const auto* r = std::get_if<AlphaRange>(&alpha)) return json{{"range", {r->lo, r->hi}}};
  const auto& v = std::get<AlphaVectors>(alpha);
  return json{{"buyers", v.buyers}, {"sellers", v.sellers}};
}

Side side_from_string(const std::string& s) {
  if (s == "buyer") return Side::buyer;
  if (s == "seller") return Side::seller;
  throw InvalidInput("side must be 'buyer' or 'seller'");
}

}  // namespace

ConfigError::ConfigError(std::vector<std::string> problems)
    : std::invalid_argument(join_problems(problems)), problems_(std::move(problems)) {}

double ExperimentConfig::effective_valuation_cap() const {
  if (valuation_cap) return *valuation_cap;
  return 1.0;
}

std::uint64_t ExperimentConfig::effective_stride() const {
  if (decimation_stride > 0) return decimation_stride;
  return horizon <= 10'000 ? 1 : 10;
}

json strategy_to_json(const StrategyKind& kind) {
  json doc{{"kind", strategy_name(kind)}};
  std::visit(
      [&](const auto& s) {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Truthful>) {
          if (s.value) doc["value"] = *s.value;
        } else if constexpr (!std::is_same_v<T, ConfidenceBound>) {
          doc["epsilon"] = s.epsilon;
        }
      },
      kind);
  return doc;
}

StrategyKind strategy_from_json(const json& doc) {
  std::string name;
  json params = json::object();
  if (doc.is_string()) {
    name = doc.get<std::string>();
  } else if (doc.is_object() && doc.contains("kind") && doc.at("kind").is_string()) {
    name = doc.at("kind").get<std::string>();
    params = doc;
    params.erase("kind");
  } else {
    throw InvalidInput("strategy must be a name or an object with 'kind'");
  }

  auto only = [&](std::initializer_list<const char*> allowed) {
    for (const auto& item : params.items()) {
      bool ok = false;
      for (const char* a : allowed) ok = ok || item.key() == a;
      if (!ok) throw InvalidInput("unknown key '" + item.key() + "' for strategy " + name);
    }
  };
  auto epsilon = [&]() {
    const double eps = params.contains("epsilon") ? read_number(params.at("epsilon")) : 0.01;
    if (!(eps > 0.0)) throw InvalidInput("deviation epsilon must be > 0");
    return eps;
  };

  if (name == "confidence_bound") {
    only({});
    return ConfidenceBound{};
  }
  if (name == "truthful") {
    only({"value"});
    Truthful t;
    if (params.contains("value")) t.value = read_number(params.at("value"));
    return t;
  }
  if (name == "deviant_buyer_kstar") {
    only({"epsilon"});
    return DeviantBuyerKStar{epsilon()};
  }
  if (name == "deviant_seller_kstar") {
    only({"epsilon"});
    return DeviantSellerKStar{epsilon()};
  }
  if (name == "deviant_both") {
    only({"epsilon"});
    return DeviantBoth{epsilon()};
  }
  throw InvalidInput("unknown strategy '" + name + "'");
}

ExperimentConfig parse_config(const json& doc) {
  if (!doc.is_object()) throw ConfigError({"configuration must be a JSON object"});

  static const std::set<std::string> known{
      "instance", "horizon",   "paths",   "master_seed", "noise",
      "valuation_cap", "alpha", "allow_alpha_below_4", "strategy", "overrides",
      "relaxed",  "output_dir", "decimation_stride", "b_max", "threads"};

  Collector c;
  c.unknown_keys(doc, known, "configuration");
  ExperimentConfig cfg;

  c.field(doc, "instance", [&](const json& v) { cfg.instance = instance_from_json(v); });
  c.field(doc, "horizon", [&](const json& v) { cfg.horizon = read_count(v); });
  c.field(doc, "paths", [&](const json& v) { cfg.paths = read_count(v); });
  c.field(doc, "master_seed", [&](const json& v) { cfg.master_seed = read_count(v); });
  c.field(doc, "noise", [&](const json& v) { cfg.noise.kind = noise_kind_from_string(v.get<std::string>()); });
  c.field(doc, "valuation_cap", [&](const json& v) { cfg.valuation_cap = read_number(v); });
  c.field(doc, "alpha", [&](const json& v) { cfg.alpha = alpha_from_json(v); });
  c.field(doc, "allow_alpha_below_4", [&](const json& v) { cfg.allow_alpha_below_4 = v.get<bool>(); });
  c.field(doc, "strategy", [&](const json& v) { cfg.default_strategy = strategy_from_json(v); });
  c.field(doc, "overrides", [&](const json& v) {
    if (!v.is_array()) throw InvalidInput("overrides must be an array");
    for (const auto& item : v) {
      if (!item.is_object()) throw InvalidInput("each override must be an object");
      for (const auto& kv : item.items()) {
        if (kv.key() != "side" && kv.key() != "id" && kv.key() != "strategy") {
          throw InvalidInput("unknown key '" + kv.key() + "' in override");
        }
      }
      StrategyOverride o;
      o.side = side_from_string(item.at("side").get<std::string>());
      o.agent_id = read_count(item.at("id"));
      o.kind = strategy_from_json(item.at("strategy"));
      cfg.overrides.push_back(std::move(o));
    }
  });
  c.field(doc, "relaxed", [&](const json& v) { cfg.relaxed = v.get<bool>(); });
  c.field(doc, "output_dir", [&](const json& v) { cfg.output_dir = v.get<std::string>(); });
  c.field(doc, "decimation_stride", [&](const json& v) { cfg.decimation_stride = read_count(v); });
  c.field(doc, "b_max", [&](const json& v) { cfg.b_max = read_number(v); });
  c.field(doc, "threads", [&](const json& v) {
    const auto t = read_count(v);
    if (t > 4096) throw InvalidInput("threads must be <= 4096");
    cfg.threads = static_cast<int>(t);
  });

  if (cfg.horizon < 1) c.fail("horizon: must be >= 1");
  if (cfg.paths < 1) c.fail("paths: must be >= 1");
  if (cfg.noise.kind == NoiseModel::Kind::gaussian && !cfg.valuation_cap) {
    c.fail("valuation_cap: required for gaussian noise (cold-start buyer bid)");
  }
  if (cfg.b_max && *cfg.b_max < 0.0) c.fail("b_max: must be >= 0");

  if (const auto* r = std::get_if<AlphaRange>(&cfg.alpha)) {
    const double ends[] = {r->lo, r->hi};
    for (const auto& p : check_alphas(ends, Side::buyer, cfg.allow_alpha_below_4)) {
      c.fail("alpha.range: " + p.substr(p.find(':') + 2));
    }
  } else {
    const auto& v = std::get<AlphaVectors>(cfg.alpha);
    c.append(check_alphas(v.buyers, Side::buyer, cfg.allow_alpha_below_4));
    c.append(check_alphas(v.sellers, Side::seller, cfg.allow_alpha_below_4));
  }

  std::set<std::pair<int, std::size_t>> seen;
  for (const auto& o : cfg.overrides) {
    if (!seen.insert({static_cast<int>(o.side), o.agent_id}).second) {
      c.fail(std::string("overrides: duplicate entry for ") + to_string(o.side) + " " +
             std::to_string(o.agent_id));
    }
  }

  if (!c.problems().empty()) throw ConfigError(c.problems());
  return cfg;
}

ExperimentConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file '" + path + "'");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError({std::string("config is not well-formed JSON: ") + e.what()});
  }
  return parse_config(doc);
}

json config_to_json(const ExperimentConfig& cfg) {
  json doc{{"instance", instance_to_json(cfg.instance)},
           {"horizon", cfg.horizon},
           {"paths", cfg.paths},
           {"master_seed", cfg.master_seed},
           {"noise", to_string(cfg.noise.kind)},
           {"alpha", alpha_to_json(cfg.alpha)},
           {"allow_alpha_below_4", cfg.allow_alpha_below_4},
           {"strategy", strategy_to_json(cfg.default_strategy)},
           {"relaxed", cfg.relaxed},
           {"output_dir", cfg.output_dir},
           {"decimation_stride", cfg.decimation_stride},
           {"threads", cfg.threads}};
  if (cfg.valuation_cap) doc["valuation_cap"] = *cfg.valuation_cap;
  if (cfg.b_max) doc["b_max"] = *cfg.b_max;
  json overrides = json::array();
  for (const auto& o : cfg.overrides) {
    overrides.push_back(
        json{{"side", to_string(o.side)}, {"id", o.agent_id}, {"strategy", strategy_to_json(o.kind)}});
  }
  doc["overrides"] = overrides;
  return doc;
}

}  // namespace dauction

#include "dauction/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "dauction/error.hpp"

namespace dauction {

using nlohmann::json;

namespace {

json band_at(const SeriesBand& b, std::size_t p) {
  return json{{"mean", b.mean[p]}, {"q25", b.q25[p]}, {"q75", b.q75[p]}};
}

// Mean and quartiles over paths of one final-ledger quantity.
template <class Get>
json across_paths(const std::vector<RegretLedger>& ledgers, Get get) {
  std::vector<double> values;
  values.reserve(ledgers.size());
  double sum = 0.0;
  for (const auto& l : ledgers) {
    values.push_back(get(l));
    sum += values.back();
  }
  const double mean = sum / static_cast<double>(values.size());
  const double q25 = quantile(values, 0.25);
  const double q75 = quantile(values, 0.75);
  return json{{"mean", mean}, {"q25", q25}, {"q75", q75}};
}

double ratio(std::uint64_t num, std::uint64_t den) {
  return den == 0 ? std::numeric_limits<double>::quiet_NaN()
                  : static_cast<double>(num) / static_cast<double>(den);
}

}  // namespace

std::string format_number(double value) {
  if (std::isnan(value)) return "nan";
  if (value == 0.0) return "0";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.9g", value);
  return buf;
}

std::string series_csv(const AggregateResult& r) {
  std::string out = "t,metric,agent_id,mean,q25,q75\n";
  auto row = [&](std::uint64_t t, const char* metric, const std::string& id, const SeriesBand& b,
                 std::size_t p) {
    out += std::to_string(t);
    out += ',';
    out += metric;
    out += ',';
    out += id;
    out += ',';
    out += format_number(b.mean[p]);
    out += ',';
    out += format_number(b.q25[p]);
    out += ',';
    out += format_number(b.q75[p]);
    out += '\n';
  };
  for (std::size_t p = 0; p < r.rounds.size(); ++p) {
    const std::uint64_t t = r.rounds[p];
    row(t, "K", "", r.k, p);
    row(t, "price_dev", "", r.price_dev, p);
    row(t, "price_dev_abs_cum", "", r.price_dev_abs_cum, p);
    row(t, "regret_social", "", r.social, p);
    for (std::size_t i = 0; i < r.buyer_regret.size(); ++i) {
      row(t, "regret_buyer", std::to_string(i), r.buyer_regret[i], p);
    }
    for (std::size_t j = 0; j < r.seller_regret.size(); ++j) {
      row(t, "regret_seller", std::to_string(j), r.seller_regret[j], p);
    }
  }
  return out;
}

TheoryParams theory_params_for(const MarketSetup& setup, const ExperimentConfig& config) {
  TheoryParams params;
  std::vector<double> alphas = setup.buyer_alphas;
  alphas.insert(alphas.end(), setup.seller_alphas.begin(), setup.seller_alphas.end());
  if (!alphas.empty()) {
    params.alpha_max = *std::max_element(alphas.begin(), alphas.end());
    params.alpha_min = *std::min_element(alphas.begin(), alphas.end());
  }
  if (config.b_max) {
    params.b_max = *config.b_max;
  } else {
    const auto& p = setup.profile;
    double top = 0.0;
    for (double v : p.buyer_values) top = std::max(top, v);
    for (double v : p.seller_values) top = std::max(top, v);
    params.b_max = top;
  }
  return params;
}

json resolved_config_json(const ExperimentConfig& config, const AggregateResult& result) {
  json doc = config_to_json(config);
  json profile{{"buyers", result.setup.profile.buyer_values},
               {"sellers", result.setup.profile.seller_values}};
  if (result.generated_from) profile["generated_from"] = instance_spec_to_json(*result.generated_from);
  doc["instance"] = json{{"profile", profile}};
  doc.erase("output_dir");
  doc.erase("threads");
  return doc;
}

json summary_json(const AggregateResult& r, const ExperimentConfig& config) {
  json doc;
  doc["config"] = resolved_config_json(config, r);
  doc["seeds"] = json{{"master_seed", config.master_seed},
                      {"path_stream", "master_seed ^ (0x9E3779B97F4A7C15 * (path + 1))"},
                      {"alpha_stream", Rng::kAlphaStream}};
  doc["instance"] = profile_to_json(r.setup.profile, r.generated_from);
  doc["alphas"] = json{{"buyers", r.setup.buyer_alphas}, {"sellers", r.setup.seller_alphas}};

  json strategies{{"buyers", json::array()}, {"sellers", json::array()}};
  for (const auto& s : r.setup.buyer_strategies) strategies["buyers"].push_back(strategy_name(s));
  for (const auto& s : r.setup.seller_strategies) strategies["sellers"].push_back(strategy_name(s));
  doc["strategies"] = strategies;

  const auto& ledgers = r.final_ledgers;
  json final_values;
  final_values["t"] = r.horizon;
  final_values["paths"] = r.paths;
  final_values["regret_social"] = across_paths(ledgers, [](const RegretLedger& l) { return l.social_regret; });
  final_values["price_dev_abs_cum"] =
      across_paths(ledgers, [](const RegretLedger& l) { return l.price_deviation; });
  json buyers = json::array();
  for (std::size_t i = 0; i < r.setup.profile.n_buyers(); ++i) {
    json entry = across_paths(ledgers, [i](const RegretLedger& l) { return l.buyer_regret[i]; });
    entry["id"] = i;
    entry["matches_mean"] = across_paths(ledgers, [i](const RegretLedger& l) {
                              return static_cast<double>(l.buyer_matches[i]);
                            })["mean"];
    entry["realized_utility_mean"] = across_paths(ledgers, [i](const RegretLedger& l) {
                                       return l.buyer_realized_utility[i];
                                     })["mean"];
    buyers.push_back(entry);
  }
  json sellers = json::array();
  for (std::size_t j = 0; j < r.setup.profile.m_sellers(); ++j) {
    json entry = across_paths(ledgers, [j](const RegretLedger& l) { return l.seller_regret[j]; });
    entry["id"] = j;
    entry["matches_mean"] = across_paths(ledgers, [j](const RegretLedger& l) {
                              return static_cast<double>(l.seller_matches[j]);
                            })["mean"];
    entry["realized_utility_mean"] = across_paths(ledgers, [j](const RegretLedger& l) {
                                       return l.seller_realized_utility[j];
                                     })["mean"];
    sellers.push_back(entry);
  }
  final_values["regret_buyer"] = buyers;
  final_values["regret_seller"] = sellers;
  doc["final"] = final_values;

  try {
    doc["theory"] = theory_report(r.setup.profile, theory_params_for(r.setup, config), r.horizon);
  } catch (const DegenerateInstance& e) {
    doc["theory"] = json{{"error", e.what()}};
  } catch (const InvalidInput& e) {
    doc["theory"] = json{{"error", e.what()}};
  }

  PathStats total;
  for (const auto& s : r.stats) {
    total.tail_rounds += s.tail_rounds;
    total.tail_k_at_kstar += s.tail_k_at_kstar;
    total.tail_priced_rounds += s.tail_priced_rounds;
    total.tail_abs_price_dev += s.tail_abs_price_dev;
    total.post_warmup_rounds += s.post_warmup_rounds;
    total.post_warmup_k_below += s.post_warmup_k_below;
    total.violations += s.violations;
  }
  doc["diagnostics"] = json{
      {"tail_share_k_equals_kstar", ratio(total.tail_k_at_kstar, total.tail_rounds)},
      {"tail_mean_abs_price_dev",
       total.tail_priced_rounds == 0
           ? std::numeric_limits<double>::quiet_NaN()
           : total.tail_abs_price_dev / static_cast<double>(total.tail_priced_rounds)},
      {"post_warmup_share_k_below_kstar",
       ratio(total.post_warmup_k_below, total.post_warmup_rounds)},
      {"mechanism_violations", total.violations},
      {"final_k", band_at(r.k, r.rounds.size() - 1)}};
  return doc;
}

std::string dump_json(const json& doc) { return doc.dump(2) + "\n"; }

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  out.close();
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

void emit_results(const AggregateResult& result, const ExperimentConfig& config,
                  const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory '" + dir.string() + "': " + ec.message());
  write_text_file(dir / "series.csv", series_csv(result));
  write_text_file(dir / "summary.json", dump_json(summary_json(result, config)));
}

}  // namespace dauction

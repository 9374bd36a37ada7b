#include "dauction/sim.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <fstream>
#include <limits>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "dauction/error.hpp"

namespace dauction {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::optional<double> fixed_bid(const StrategyKind& kind, const ValuationProfile& profile,
                                Side side, std::size_t id) {
  if (std::holds_alternative<ConfidenceBound>(kind)) return std::nullopt;
  if (const auto* t = std::get_if<Truthful>(&kind)) {
    if (t->value) return *t->value;
    return side == Side::buyer ? profile.buyer_values[id] : profile.seller_values[id];
  }
  return deviant_bid(kind, profile, side, id);
}

void check_values_for_noise(const NoiseModel& noise, const ValuationProfile& profile) {
  if (noise.kind != NoiseModel::Kind::bernoulli) return;
  auto in_unit = [](double v) { return v >= 0.0 && v <= 1.0; };
  if (!std::all_of(profile.buyer_values.begin(), profile.buyer_values.end(), in_unit) ||
      !std::all_of(profile.seller_values.begin(), profile.seller_values.end(), in_unit)) {
    throw InvalidInput("bernoulli noise needs every valuation in [0, 1]");
  }
}

bool round_is_sound(const RoundOutcome& out, bool relaxed) {
  if (!relaxed && out.participating_buyers.size() != out.participating_sellers.size()) return false;
  if (out.participating_buyers.empty() && out.participating_sellers.empty()) return true;
  if (!out.price) return false;
  const double p = *out.price;
  for (std::size_t i : out.participating_buyers) {
    if (out.bids.buyer_bids[i] < p) return false;
  }
  for (std::size_t j : out.participating_sellers) {
    if (out.bids.seller_bids[j] > p) return false;
  }
  return true;
}

double mean_skipping_nan(const std::vector<double>& values) {
  double sum = 0.0;
  std::size_t n = 0;
  for (double v : values) {
    if (std::isnan(v)) continue;
    sum += v;
    ++n;
  }
  return n == 0 ? kNaN : sum / static_cast<double>(n);
}

// Gathers point p of every path (in path order) into column, then summarizes.
template <class Get>
SeriesBand band(std::size_t points, const std::vector<PathTrace>& traces, Get get) {
  SeriesBand out;
  out.mean.resize(points);
  out.q25.resize(points);
  out.q75.resize(points);
  std::vector<double> column;
  column.reserve(traces.size());
  for (std::size_t p = 0; p < points; ++p) {
    column.clear();
    for (const auto& tr : traces) column.push_back(get(tr, p));
    out.mean[p] = mean_skipping_nan(column);
    std::erase_if(column, [](double v) { return std::isnan(v); });
    out.q25[p] = quantile(column, 0.25);
    out.q75[p] = quantile(column, 0.75);
  }
  return out;
}

}  // namespace

MarketSetup make_setup(const ExperimentConfig& config, ValuationProfile profile,
                       std::vector<double> buyer_alphas, std::vector<double> seller_alphas) {
  const std::size_t n = profile.n_buyers();
  const std::size_t m = profile.m_sellers();
  if (buyer_alphas.size() != n || seller_alphas.size() != m) {
    throw InvalidInput("alpha vectors must have one entry per buyer and per seller (" +
                       std::to_string(n) + " and " + std::to_string(m) + ")");
  }
  check_values_for_noise(config.noise, profile);
  if (config.relaxed && !profile.p_star) {
    throw InvalidInput("relaxed mode posts p*, which is undefined when K* = 0");
  }
  const double cap = config.effective_valuation_cap();
  if (!std::isfinite(cap)) throw InvalidInput("valuation_cap must be finite");

  MarketSetup s;
  s.noise = config.noise;
  s.valuation_cap = cap;
  s.relaxed = config.relaxed;
  s.buyer_strategies.assign(n, config.default_strategy);
  s.seller_strategies.assign(m, config.default_strategy);
  for (const auto& o : config.overrides) {
    auto& target = o.side == Side::buyer ? s.buyer_strategies : s.seller_strategies;
    if (o.agent_id >= target.size()) {
      throw InvalidInput(std::string("override names ") + to_string(o.side) + " " +
                         std::to_string(o.agent_id) + ", which does not exist");
    }
    target[o.agent_id] = o.kind;
  }
  s.buyer_fixed_bids.resize(n);
  s.seller_fixed_bids.resize(m);
  for (std::size_t i = 0; i < n; ++i) {
    s.buyer_fixed_bids[i] = fixed_bid(s.buyer_strategies[i], profile, Side::buyer, i);
  }
  for (std::size_t j = 0; j < m; ++j) {
    s.seller_fixed_bids[j] = fixed_bid(s.seller_strategies[j], profile, Side::seller, j);
  }
  s.buyer_alphas = std::move(buyer_alphas);
  s.seller_alphas = std::move(seller_alphas);
  s.profile = std::move(profile);
  return s;
}

PathState initial_state(const MarketSetup& setup, Rng rng) {
  PathState st;
  st.rng = rng;
  const std::size_t n = setup.profile.n_buyers();
  const std::size_t m = setup.profile.m_sellers();
  st.buyers.resize(n);
  st.sellers.resize(m);
  for (std::size_t i = 0; i < n; ++i) st.buyers[i] = AgentBelief{Side::buyer, setup.buyer_alphas[i]};
  for (std::size_t j = 0; j < m; ++j) {
    st.sellers[j] = AgentBelief{Side::seller, setup.seller_alphas[j]};
  }
  st.ledger = RegretLedger(n, m);
  st.buyer_bids.resize(n);
  st.seller_bids.resize(m);
  return st;
}

const RoundOutcome& step_round(PathState& st, const MarketSetup& setup) {
  const ValuationProfile& prof = setup.profile;
  // A bid for round r uses ln(r - 1); rounds 1 and 2 both carry zero width.
  const std::uint64_t log_round = std::max<std::uint64_t>(st.t, 1);

  for (std::size_t i = 0; i < st.buyers.size(); ++i) {
    const auto& fixed = setup.buyer_fixed_bids[i];
    st.buyer_bids[i] = fixed ? *fixed : ucb_bid(st.buyers[i], log_round, setup.valuation_cap);
  }
  for (std::size_t j = 0; j < st.sellers.size(); ++j) {
    const auto& fixed = setup.seller_fixed_bids[j];
    st.seller_bids[j] = fixed ? *fixed : lcb_bid(st.sellers[j], log_round);
  }

  if (setup.relaxed) {
    st.clearing.clear_fixed(st.buyer_bids, st.seller_bids, *prof.p_star, st.outcome);
  } else {
    st.clearing.clear(st.buyer_bids, st.seller_bids, st.outcome);
  }

  const RoundOutcome& out = st.outcome;
  for (std::size_t i : out.participating_buyers) {
    const double x = sample_observation(setup.noise, prof.buyer_values[i], st.rng);
    st.ledger.buyer_realized_utility[i] += x - *out.price;
    if (!setup.buyer_fixed_bids[i]) st.buyers[i] = update_belief(st.buyers[i], x);
  }
  for (std::size_t j : out.participating_sellers) {
    const double x = sample_observation(setup.noise, prof.seller_values[j], st.rng);
    st.ledger.seller_realized_utility[j] += *out.price - x;
    if (!setup.seller_fixed_bids[j]) st.sellers[j] = update_belief(st.sellers[j], x);
  }
  st.ledger.record(prof, out);
  ++st.t;
  return out;
}

std::vector<std::uint64_t> trace_rounds(std::uint64_t horizon, std::uint64_t stride) {
  if (stride == 0) throw InvalidInput("trace stride must be >= 1");
  std::vector<std::uint64_t> out;
  for (std::uint64_t t = 1; t <= horizon; ++t) {
    if (t == 1 || t % stride == 0 || t == horizon) out.push_back(t);
  }
  return out;
}

PathTrace run_path(const MarketSetup& setup, std::uint64_t horizon, std::uint64_t stride, Rng rng) {
  if (horizon < 1) throw InvalidInput("horizon must be >= 1");
  if (stride == 0) throw InvalidInput("trace stride must be >= 1");
  const std::size_t n = setup.profile.n_buyers();
  const std::size_t m = setup.profile.m_sellers();
  const auto& p_star = setup.profile.p_star;
  const std::size_t k_star = setup.profile.k_star;

  PathState st = initial_state(setup, rng);
  PathTrace tr;
  const std::size_t points = trace_rounds(horizon, stride).size();
  tr.k.reserve(points);
  tr.price_dev.reserve(points);
  tr.price_dev_abs_cum.reserve(points);
  tr.social.reserve(points);
  tr.buyer_regret.reserve(points * n);
  tr.seller_regret.reserve(points * m);

  // t > horizon - horizon/10 is the final 10%; t > horizon/100 is past warm-up.
  const std::uint64_t tail_start = horizon - horizon / 10;
  const std::uint64_t warmup_end = horizon / 100;

  for (std::uint64_t t = 1; t <= horizon; ++t) {
    const RoundOutcome& out = step_round(st, setup);
    const bool priced = out.price && p_star && out.k > 0;
    const double dev = priced ? *out.price - *p_star : kNaN;

    if (!round_is_sound(out, setup.relaxed)) ++tr.stats.violations;
    if (t > tail_start) {
      ++tr.stats.tail_rounds;
      if (out.k == k_star) ++tr.stats.tail_k_at_kstar;
      if (priced) {
        ++tr.stats.tail_priced_rounds;
        tr.stats.tail_abs_price_dev += std::abs(dev);
      }
    }
    if (t > warmup_end) {
      ++tr.stats.post_warmup_rounds;
      if (out.k < k_star) ++tr.stats.post_warmup_k_below;
    }

    if (t == 1 || t % stride == 0 || t == horizon) {
      tr.k.push_back(static_cast<double>(out.k));
      tr.price_dev.push_back(dev);
      tr.price_dev_abs_cum.push_back(st.ledger.price_deviation);
      tr.social.push_back(st.ledger.social_regret);
      tr.buyer_regret.insert(tr.buyer_regret.end(), st.ledger.buyer_regret.begin(),
                             st.ledger.buyer_regret.end());
      tr.seller_regret.insert(tr.seller_regret.end(), st.ledger.seller_regret.begin(),
                              st.ledger.seller_regret.end());
    }
  }
  tr.ledger = std::move(st.ledger);
  tr.buyers = std::move(st.buyers);
  tr.sellers = std::move(st.sellers);
  return tr;
}

std::vector<PathTrace> run_paths_serial(const MarketSetup& setup, std::uint64_t horizon,
                                        std::uint64_t stride, std::uint64_t master_seed,
                                        std::uint64_t paths) {
  std::vector<PathTrace> out;
  out.reserve(paths);
  for (std::uint64_t p = 0; p < paths; ++p) {
    out.push_back(run_path(setup, horizon, stride, Rng::stream(master_seed, p)));
  }
  return out;
}

std::vector<PathTrace> run_paths(const MarketSetup& setup, std::uint64_t horizon,
                                 std::uint64_t stride, std::uint64_t master_seed,
                                 std::uint64_t paths, int threads) {
#ifdef _OPENMP
  std::vector<PathTrace> out(paths);
  std::exception_ptr failure;
  const auto count = static_cast<std::int64_t>(paths);
  const int team = threads > 0 ? threads : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic, 1) num_threads(team)
  for (std::int64_t p = 0; p < count; ++p) {
    try {
      out[static_cast<std::size_t>(p)] =
          run_path(setup, horizon, stride, Rng::stream(master_seed, static_cast<std::uint64_t>(p)));
    } catch (...) {
#pragma omp critical(dauction_path_failure)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  return out;
#else
  (void)threads;
  return run_paths_serial(setup, horizon, stride, master_seed, paths);
#endif
}

double quantile(std::vector<double>& values, double q) {
  if (values.empty()) return kNaN;
  if (!(q >= 0.0 && q <= 1.0)) throw InvalidInput("quantile level must lie in [0, 1]");
  std::sort(values.begin(), values.end());
  const double h = static_cast<double>(values.size() - 1) * q;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  return values[lo] + (h - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

AggregateResult aggregate(const MarketSetup& setup, std::uint64_t horizon, std::uint64_t stride,
                          const std::vector<PathTrace>& traces) {
  if (traces.empty()) throw InvalidInput("nothing to aggregate");
  AggregateResult agg;
  agg.setup = setup;
  agg.horizon = horizon;
  agg.paths = traces.size();
  agg.rounds = trace_rounds(horizon, stride);
  const std::size_t points = agg.rounds.size();
  for (const auto& tr : traces) {
    if (tr.k.size() != points) throw InvalidInput("trace length does not match the horizon");
  }

  agg.k = band(points, traces, [](const PathTrace& t, std::size_t p) { return t.k[p]; });
  agg.price_dev =
      band(points, traces, [](const PathTrace& t, std::size_t p) { return t.price_dev[p]; });
  agg.price_dev_abs_cum = band(
      points, traces, [](const PathTrace& t, std::size_t p) { return t.price_dev_abs_cum[p]; });
  agg.social = band(points, traces, [](const PathTrace& t, std::size_t p) { return t.social[p]; });

  const std::size_t n = setup.profile.n_buyers();
  const std::size_t m = setup.profile.m_sellers();
  for (std::size_t i = 0; i < n; ++i) {
    agg.buyer_regret.push_back(band(points, traces, [&](const PathTrace& t, std::size_t p) {
      return t.buyer_regret[p * n + i];
    }));
  }
  for (std::size_t j = 0; j < m; ++j) {
    agg.seller_regret.push_back(band(points, traces, [&](const PathTrace& t, std::size_t p) {
      return t.seller_regret[p * m + j];
    }));
  }
  for (const auto& tr : traces) {
    agg.final_ledgers.push_back(tr.ledger);
    agg.stats.push_back(tr.stats);
  }
  return agg;
}

ResolvedInstance resolve_instance(const InstanceSource& source) {
  if (const auto* spec = std::get_if<InstanceSpec>(&source)) {
    return {generate_instance(*spec), *spec};
  }
  if (const auto* file = std::get_if<ProfilePath>(&source)) {
    std::ifstream in(file->path);
    if (!in) throw IoError("cannot open profile file '" + file->path + "'");
    nlohmann::json doc;
    try {
      doc = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
      throw InvalidInput("profile file '" + file->path + "' is not valid JSON: " + e.what());
    }
    ResolvedInstance r;
    r.profile = profile_from_json(doc, &r.generated_from);
    return r;
  }
  const auto& inline_profile = std::get<InlineProfile>(source);
  return {oracle_solution(inline_profile.buyers, inline_profile.sellers),
          inline_profile.generated_from};
}

std::pair<std::vector<double>, std::vector<double>> resolve_alphas(const ExperimentConfig& config,
                                                                   const ValuationProfile& profile) {
  if (const auto* range = std::get_if<AlphaRange>(&config.alpha)) {
    Rng rng = Rng::stream(config.master_seed, Rng::kAlphaStream);
    auto buyers = draw_alphas(profile.n_buyers(), range->lo, range->hi, rng);
    auto sellers = draw_alphas(profile.m_sellers(), range->lo, range->hi, rng);
    return {std::move(buyers), std::move(sellers)};
  }
  const auto& v = std::get<AlphaVectors>(config.alpha);
  return {v.buyers, v.sellers};
}

AggregateResult run_experiment(const ExperimentConfig& config, Execution execution) {
  ResolvedInstance inst = resolve_instance(config.instance);
  auto [buyer_alphas, seller_alphas] = resolve_alphas(config, inst.profile);
  const MarketSetup setup =
      make_setup(config, std::move(inst.profile), std::move(buyer_alphas), std::move(seller_alphas));
  const std::uint64_t stride = config.effective_stride();
  const auto traces =
      execution == Execution::parallel
          ? run_paths(setup, config.horizon, stride, config.master_seed, config.paths, config.threads)
          : run_paths_serial(setup, config.horizon, stride, config.master_seed, config.paths);
  AggregateResult agg = aggregate(setup, config.horizon, stride, traces);
  agg.generated_from = inst.generated_from;
  return agg;
}

}  // namespace dauction

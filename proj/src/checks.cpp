#include "dauction/checks.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "dauction/market.hpp"
#include "dauction/metrics.hpp"
#include "dauction/report.hpp"
#include "dauction/rng.hpp"
#include "dauction/sim.hpp"

namespace dauction {

namespace {

// Largest K for which some K buyers all bid at least every ask of some K sellers.
std::size_t brute_force_k(const BidProfile& bids) {
  const std::size_t n = bids.buyer_bids.size();
  const std::size_t m = bids.seller_bids.size();
  std::size_t best = 0;
  for (std::uint32_t bm = 0; bm < (1u << n); ++bm) {
    double low_bid = INFINITY;
    std::size_t nb = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (bm >> i & 1u) {
        low_bid = std::min(low_bid, bids.buyer_bids[i]);
        ++nb;
      }
    }
    if (nb <= best) continue;
    for (std::uint32_t sm = 0; sm < (1u << m); ++sm) {
      if (static_cast<std::size_t>(__builtin_popcount(sm)) != nb) continue;
      double high_ask = -INFINITY;
      for (std::size_t j = 0; j < m; ++j) {
        if (sm >> j & 1u) high_ask = std::max(high_ask, bids.seller_bids[j]);
      }
      if (low_bid >= high_ask) {
        best = nb;
        break;
      }
    }
  }
  return best;
}

// Agents that outrank id: strictly better bid, or equal bid and smaller id.
template <class Better>
std::size_t rank_of(const std::vector<double>& v, std::size_t id, Better better) {
  std::size_t r = 0;
  for (std::size_t o = 0; o < v.size(); ++o) {
    if (better(v[o], v[id]) || (v[o] == v[id] && o < id)) ++r;
  }
  return r;
}

bool matches_brute_force(const BidProfile& bids, const RoundOutcome& out) {
  const std::size_t k = brute_force_k(bids);
  if (out.k != k) return false;
  std::vector<std::size_t> buyers;
  std::vector<std::size_t> sellers;
  double kth_bid = 0.0;
  double kth_ask = 0.0;
  for (std::size_t i = 0; i < bids.buyer_bids.size(); ++i) {
    const std::size_t r = rank_of(bids.buyer_bids, i, std::greater<>());
    if (r < k) buyers.push_back(i);
    if (k > 0 && r == k - 1) kth_bid = bids.buyer_bids[i];
  }
  for (std::size_t j = 0; j < bids.seller_bids.size(); ++j) {
    const std::size_t r = rank_of(bids.seller_bids, j, std::less<>());
    if (r < k) sellers.push_back(j);
    if (k > 0 && r == k - 1) kth_ask = bids.seller_bids[j];
  }
  if (buyers != out.participating_buyers || sellers != out.participating_sellers) return false;
  if (k == 0) return !out.price.has_value();
  return out.price && *out.price == (kth_bid + kth_ask) / 2.0;
}

BidProfile random_bids(Rng& rng, std::size_t max_side) {
  BidProfile b;
  const auto n = 1 + static_cast<std::size_t>(rng.next() % max_side);
  const auto m = 1 + static_cast<std::size_t>(rng.next() % max_side);
  // Coarse 0.1 grid half of the time.
  const bool grid = rng.bernoulli(0.5);
  auto draw = [&]() { return grid ? 0.25 * static_cast<double>(rng.next() % 5) : rng.uniform(); };
  for (std::size_t i = 0; i < n; ++i) b.buyer_bids.push_back(draw());
  for (std::size_t j = 0; j < m; ++j) b.seller_bids.push_back(draw());
  return b;
}

ExperimentConfig small_config(const std::vector<double>& buyers, const std::vector<double>& sellers,
                              std::uint64_t seed) {
  ExperimentConfig c;
  c.instance = InlineProfile{buyers, sellers, std::nullopt};
  c.horizon = 400;
  c.paths = 4;
  c.master_seed = seed;
  return c;
}

CheckResult check_clearing(std::uint64_t seed) {
  Rng rng = Rng::stream(seed, 1);
  for (int trial = 0; trial < 500; ++trial) {
    const BidProfile b = random_bids(rng, 5);
    if (!matches_brute_force(b, clear_market(b))) {
      return {"clearing_matches_brute_force", false, "mismatch on trial " + std::to_string(trial)};
    }
  }
  return {"clearing_matches_brute_force", true, "500 random profiles"};
}

CheckResult check_monotonicity(std::uint64_t seed) {
  Rng rng = Rng::stream(seed, 2);
  for (int trial = 0; trial < 2000; ++trial) {
    BidProfile b = random_bids(rng, 5);
    const RoundOutcome before = clear_market(b);
    const bool buyer_side = rng.bernoulli(0.5);
    auto& side = buyer_side ? b.buyer_bids : b.seller_bids;
    const auto id = static_cast<std::size_t>(rng.next() % side.size());
    const bool was_in =
        buyer_side ? before.buyer_participates(id) : before.seller_participates(id);
    // A trader who becomes more aggressive keeps trading; an outsider who backs off stays out.
    const double step = rng.uniform(0.0, 0.5);
    const bool more_aggressive = was_in;
    side[id] += (buyer_side == more_aggressive) ? step : -step;
    const RoundOutcome after = clear_market(b);
    const bool now_in = buyer_side ? after.buyer_participates(id) : after.seller_participates(id);
    if (was_in != now_in) {
      return {"bid_monotonicity", false, "trial " + std::to_string(trial)};
    }
  }
  return {"bid_monotonicity", true, "2000 single-bid perturbations"};
}

CheckResult check_truthful(std::uint64_t seed) {
  Rng rng = Rng::stream(seed, 3);
  for (int trial = 0; trial < 20; ++trial) {
    const BidProfile b = random_bids(rng, 4);
    ExperimentConfig c = small_config(b.buyer_bids, b.seller_bids, seed + trial);
    c.default_strategy = Truthful{};
    const AggregateResult r = run_experiment(c, Execution::serial);
    for (const auto& l : r.final_ledgers) {
      bool zero = l.social_regret == 0.0 && l.price_deviation == 0.0;
      for (double v : l.buyer_regret) zero = zero && v == 0.0;
      for (double v : l.seller_regret) zero = zero && v == 0.0;
      if (!zero) return {"truthful_zero_regret", false, "trial " + std::to_string(trial)};
    }
  }
  return {"truthful_zero_regret", true, "20 instances"};
}

CheckResult check_paths(std::uint64_t seed) {
  Rng rng = Rng::stream(seed, 4);
  for (int trial = 0; trial < 10; ++trial) {
    const BidProfile b = random_bids(rng, 4);
    const ExperimentConfig c = small_config(b.buyer_bids, b.seller_bids, seed + trial);
    const auto inst = resolve_instance(c.instance);
    auto [ba, sa] = resolve_alphas(c, inst.profile);
    const MarketSetup setup = make_setup(c, inst.profile, ba, sa);
    const auto traces = run_paths_serial(setup, c.horizon, 1, c.master_seed, c.paths);
    for (const auto& tr : traces) {
      if (tr.stats.violations != 0) {
        return {"budget_balance_and_accounting", false, "unbalanced round, trial " + std::to_string(trial)};
      }
      for (std::size_t i = 0; i < tr.buyers.size(); ++i) {
        if (tr.buyers[i].participation_count != tr.ledger.buyer_matches[i]) {
          return {"budget_balance_and_accounting", false, "buyer sample count, trial " + std::to_string(trial)};
        }
      }
      for (std::size_t j = 0; j < tr.sellers.size(); ++j) {
        if (tr.sellers[j].participation_count != tr.ledger.seller_matches[j]) {
          return {"budget_balance_and_accounting", false, "seller sample count, trial " + std::to_string(trial)};
        }
      }
    }
  }
  return {"budget_balance_and_accounting", true, "10 instances x 4 paths x 400 rounds"};
}

CheckResult check_social_sign(std::uint64_t seed) {
  Rng rng = Rng::stream(seed, 5);
  int tested = 0;
  for (int trial = 0; trial < 3000; ++trial) {
    const BidProfile values = random_bids(rng, 5);
    const ValuationProfile prof = oracle_solution(values.buyer_bids, values.seller_bids);
    BidProfile bids;
    for (std::size_t i = 0; i < prof.n_buyers(); ++i) bids.buyer_bids.push_back(rng.uniform());
    for (std::size_t j = 0; j < prof.m_sellers(); ++j) bids.seller_bids.push_back(rng.uniform());
    const RoundOutcome out = clear_market(bids);
    if (out.k < prof.k_star) continue;
    ++tested;
    if (social_increment(prof, out) < -1e-12) {
      return {"social_increment_nonnegative", false, "trial " + std::to_string(trial)};
    }
  }
  return {"social_increment_nonnegative", true, std::to_string(tested) + " rounds with K(t) >= K*"};
}

CheckResult check_parallel(std::uint64_t seed) {
  ExperimentConfig c = small_config({0.9, 0.7, 0.4}, {0.1, 0.3, 0.8}, seed);
  c.paths = 6;
  c.threads = 3;
  const AggregateResult a = run_experiment(c, Execution::parallel);
  const AggregateResult b = run_experiment(c, Execution::serial);
  const bool same = series_csv(a) == series_csv(b) &&
                    dump_json(summary_json(a, c)) == dump_json(summary_json(b, c));
  return {"parallel_equals_serial", same, "6 paths, 3 threads"};
}

CheckResult check_quantile() {
  std::vector<double> v{4.0, 1.0, 3.0, 2.0};
  const double q25 = quantile(v, 0.25);
  const double q75 = quantile(v, 0.75);
  return {"quantile_convention", q25 == 1.75 && q75 == 3.25, "{1,2,3,4}: q25 1.75, q75 3.25"};
}

}  // namespace

std::vector<CheckResult> run_property_checks(std::uint64_t seed) {
  std::vector<CheckResult> out;
  auto guarded = [&](const char* name, auto&& fn) {
    try {
      out.push_back(fn());
    } catch (const std::exception& e) {
      out.push_back({name, false, std::string("threw: ") + e.what()});
    }
  };
  guarded("clearing_matches_brute_force", [&] { return check_clearing(seed); });
  guarded("bid_monotonicity", [&] { return check_monotonicity(seed); });
  guarded("truthful_zero_regret", [&] { return check_truthful(seed); });
  guarded("budget_balance_and_accounting", [&] { return check_paths(seed); });
  guarded("social_increment_nonnegative", [&] { return check_social_sign(seed); });
  guarded("parallel_equals_serial", [&] { return check_parallel(seed); });
  guarded("quantile_convention", [] { return check_quantile(); });
  return out;
}

}  // namespace dauction

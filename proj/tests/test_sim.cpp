#include <gtest/gtest.h>

#include <cmath>
#include <cstring>

#include "dauction/error.hpp"
#include "dauction/report.hpp"
#include "dauction/sim.hpp"

namespace {

using namespace dauction;

ExperimentConfig inline_config(std::vector<double> buyers, std::vector<double> sellers) {
  ExperimentConfig c;
  c.instance = InlineProfile{std::move(buyers), std::move(sellers), std::nullopt};
  c.horizon = 300;
  c.paths = 3;
  c.master_seed = 5;
  return c;
}

MarketSetup setup_for(const ExperimentConfig& c) {
  auto inst = resolve_instance(c.instance);
  auto [ba, sa] = resolve_alphas(c, inst.profile);
  return make_setup(c, inst.profile, ba, sa);
}

bool same_bits(double a, double b) { return std::memcmp(&a, &b, sizeof a) == 0; }

bool same_bits(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!same_bits(a[i], b[i])) return false;
  }
  return true;
}

bool same_trace(const PathTrace& a, const PathTrace& b) {
  return same_bits(a.k, b.k) && same_bits(a.price_dev, b.price_dev) &&
         same_bits(a.price_dev_abs_cum, b.price_dev_abs_cum) && same_bits(a.social, b.social) &&
         same_bits(a.buyer_regret, b.buyer_regret) && same_bits(a.seller_regret, b.seller_regret) &&
         a.ledger == b.ledger && a.buyers == b.buyers && a.sellers == b.sellers && a.stats == b.stats;
}

TEST(StepRound, ColdStartEveryoneTrades) {
  auto c = inline_config({0.9, 0.6}, {0.1, 0.3});
  c.valuation_cap = 1.4;
  const MarketSetup s = setup_for(c);
  PathState st = initial_state(s, Rng(1));
  const RoundOutcome& out = step_round(st, s);
  EXPECT_EQ(st.t, 1u);
  EXPECT_EQ(out.bids.buyer_bids, (std::vector<double>{1.4, 1.4}));
  EXPECT_EQ(out.bids.seller_bids, (std::vector<double>{0.0, 0.0}));
  EXPECT_EQ(out.k, 2u);
  EXPECT_EQ(*out.price, 0.7);
  for (const auto& b : st.buyers) EXPECT_EQ(b.participation_count, 1u);
  for (const auto& b : st.sellers) EXPECT_EQ(b.participation_count, 1u);
}

TEST(StepRound, SecondRoundBidsTheSampleMean) {
  // ln(1) = 0 in round 2, so every learner bids exactly its first sample.
  auto c = inline_config({0.9, 0.6}, {0.1, 0.3});
  const MarketSetup s = setup_for(c);
  PathState st = initial_state(s, Rng(2));
  step_round(st, s);
  const auto buyers = st.buyers;
  const auto sellers = st.sellers;
  const RoundOutcome& out = step_round(st, s);
  for (std::size_t i = 0; i < 2; ++i) {
    EXPECT_EQ(out.bids.buyer_bids[i], buyers[i].empirical_mean());
    EXPECT_EQ(out.bids.seller_bids[i], sellers[i].empirical_mean());
  }
}

TEST(StepRound, RelaxedBuyerTradesAtPStar) {
  auto c = inline_config({0.7}, {0.3});
  c.relaxed = true;
  c.noise.kind = NoiseModel::Kind::gaussian;
  c.valuation_cap = 1.0;
  c.overrides.push_back({Side::seller, 0, Truthful{}});
  const MarketSetup s = setup_for(c);
  PathState st = initial_state(s, Rng(3));
  for (int r = 0; r < 200; ++r) {
    const RoundOutcome& out = step_round(st, s);
    ASSERT_EQ(*out.price, 0.5);
    ASSERT_EQ(out.participating_sellers.size(), 1u);
    ASSERT_EQ(out.buyer_participates(0), out.bids.buyer_bids[0] >= 0.5);
  }
  EXPECT_GE(st.ledger.buyer_regret[0], 0.0);
}

TEST(StepRound, TruthfulPlayReproducesTheOracle) {
  auto c = inline_config({0.9, 0.8, 0.4}, {0.2, 0.5, 0.85});
  c.default_strategy = Truthful{};
  const MarketSetup s = setup_for(c);
  const RoundOutcome oracle = clear_market({s.profile.buyer_values, s.profile.seller_values});
  PathState st = initial_state(s, Rng(4));
  for (int r = 0; r < 100; ++r) ASSERT_EQ(step_round(st, s), oracle);
  EXPECT_EQ(st.ledger.social_regret, 0.0);
  for (double v : st.ledger.buyer_regret) EXPECT_EQ(v, 0.0);
  for (double v : st.ledger.seller_regret) EXPECT_EQ(v, 0.0);
  // Fixed-bid agents never learn.
  for (const auto& b : st.buyers) EXPECT_EQ(b.participation_count, 0u);
}

TEST(StepRound, DeviantBidIsFrozen) {
  auto c = inline_config({0.9, 0.8, 0.4}, {0.2, 0.5, 0.85});
  c.overrides.push_back({Side::buyer, 1, DeviantBuyerKStar{0.01}});
  const MarketSetup s = setup_for(c);
  ASSERT_TRUE(s.buyer_fixed_bids[1]);
  EXPECT_DOUBLE_EQ(*s.buyer_fixed_bids[1], 0.51);
  PathState st = initial_state(s, Rng(5));
  for (int r = 0; r < 200; ++r) ASSERT_EQ(step_round(st, s).bids.buyer_bids[1], *s.buyer_fixed_bids[1]);
  EXPECT_EQ(st.buyers[1].participation_count, 0u);
}

TEST(PathInvariants, ConservationAccountingAndClock) {
  auto c = inline_config({0.9, 0.7, 0.55, 0.2}, {0.1, 0.35, 0.6, 0.8, 0.95});
  const MarketSetup s = setup_for(c);
  PathState st = initial_state(s, Rng::stream(9, 0));
  std::vector<std::uint64_t> bm(4, 0), sm(5, 0);
  for (std::uint64_t r = 1; r <= 3000; ++r) {
    const RoundOutcome& out = step_round(st, s);
    ASSERT_EQ(st.t, r);
    ASSERT_EQ(out.participating_buyers.size(), out.participating_sellers.size());
    for (auto i : out.participating_buyers) ++bm[i];
    for (auto j : out.participating_sellers) ++sm[j];
    std::uint64_t buyer_samples = 0, matches = 0;
    for (std::size_t i = 0; i < 4; ++i) {
      buyer_samples += st.buyers[i].participation_count;
      matches += st.ledger.buyer_matches[i];
    }
    ASSERT_EQ(buyer_samples, matches);
  }
  for (std::size_t i = 0; i < 4; ++i) EXPECT_EQ(st.buyers[i].participation_count, bm[i]);
  for (std::size_t j = 0; j < 5; ++j) EXPECT_EQ(st.sellers[j].participation_count, sm[j]);
}

TEST(RunPath, SingleRoundEqualsStep) {
  auto c = inline_config({0.9, 0.6}, {0.1, 0.3});
  const MarketSetup s = setup_for(c);
  const PathTrace tr = run_path(s, 1, 1, Rng(8));
  PathState st = initial_state(s, Rng(8));
  const RoundOutcome& out = step_round(st, s);
  ASSERT_EQ(tr.k.size(), 1u);
  EXPECT_EQ(tr.k[0], static_cast<double>(out.k));
  EXPECT_EQ(tr.price_dev[0], *out.price - *s.profile.p_star);
  EXPECT_EQ(tr.ledger, st.ledger);
  EXPECT_EQ(tr.social[0], st.ledger.social_regret);
}

TEST(RunPath, SameSeedSameBits) {
  auto c = inline_config({0.9, 0.7, 0.55, 0.2}, {0.1, 0.35, 0.6, 0.8});
  const MarketSetup s = setup_for(c);
  EXPECT_TRUE(same_trace(run_path(s, 2000, 7, Rng(77)), run_path(s, 2000, 7, Rng(77))));
  EXPECT_FALSE(same_trace(run_path(s, 2000, 7, Rng(77)), run_path(s, 2000, 7, Rng(78))));
}

TEST(RunPath, DecimationKeepsExactLedger) {
  auto c = inline_config({0.9, 0.7, 0.55, 0.2}, {0.1, 0.35, 0.6, 0.8});
  const MarketSetup s = setup_for(c);
  const PathTrace full = run_path(s, 995, 1, Rng(6));
  const PathTrace thin = run_path(s, 995, 10, Rng(6));
  EXPECT_EQ(full.ledger, thin.ledger);
  EXPECT_EQ(full.stats, thin.stats);
  const auto rounds = trace_rounds(995, 10);
  ASSERT_EQ(thin.k.size(), rounds.size());
  for (std::size_t p = 0; p < rounds.size(); ++p) {
    EXPECT_EQ(thin.social[p], full.social[rounds[p] - 1]);
  }
}

TEST(TraceRounds, FirstStrideAndLast) {
  EXPECT_EQ(trace_rounds(1, 10), std::vector<std::uint64_t>{1});
  EXPECT_EQ(trace_rounds(25, 10), (std::vector<std::uint64_t>{1, 10, 20, 25}));
  EXPECT_EQ(trace_rounds(4, 1), (std::vector<std::uint64_t>{1, 2, 3, 4}));
  EXPECT_THROW(trace_rounds(4, 0), InvalidInput);
}

TEST(RunPaths, ParallelMatchesSerialForAnyThreadCount) {
  auto c = inline_config({0.9, 0.7, 0.55, 0.2}, {0.1, 0.35, 0.6, 0.8});
  const MarketSetup s = setup_for(c);
  const auto serial = run_paths_serial(s, 1500, 10, 3, 9);
  for (int threads : {1, 2, 8}) {
    const auto par = run_paths(s, 1500, 10, 3, 9, threads);
    ASSERT_EQ(par.size(), serial.size());
    for (std::size_t p = 0; p < par.size(); ++p) ASSERT_TRUE(same_trace(par[p], serial[p]));
  }
  for (std::uint64_t p = 0; p < 9; ++p) {
    EXPECT_TRUE(same_trace(serial[p], run_path(s, 1500, 10, Rng::stream(3, p))));
  }
}

TEST(RunExperiment, ThreadCountDoesNotChangeOutputs) {
  auto c = inline_config({0.9, 0.7, 0.55, 0.2}, {0.1, 0.35, 0.6, 0.8});
  c.paths = 7;
  c.threads = 1;
  const auto one = run_experiment(c);
  c.threads = 8;
  const auto eight = run_experiment(c);
  EXPECT_EQ(series_csv(one), series_csv(eight));
  EXPECT_EQ(dump_json(summary_json(one, c)), dump_json(summary_json(eight, c)));
}

TEST(Quantile, LinearInterpolation) {
  std::vector<double> v{3.0, 1.0, 4.0, 2.0};
  EXPECT_EQ(quantile(v, 0.25), 1.75);
  EXPECT_EQ(quantile(v, 0.75), 3.25);
  EXPECT_EQ(quantile(v, 0.0), 1.0);
  EXPECT_EQ(quantile(v, 1.0), 4.0);
  EXPECT_EQ(quantile(v, 0.5), 2.5);
  std::vector<double> one{7.0};
  EXPECT_EQ(quantile(one, 0.25), 7.0);
  std::vector<double> none;
  EXPECT_TRUE(std::isnan(quantile(none, 0.5)));
}

TEST(Aggregate, SinglePathEqualsTrace) {
  auto c = inline_config({0.9, 0.7, 0.55}, {0.1, 0.35, 0.6});
  const MarketSetup s = setup_for(c);
  const auto traces = run_paths_serial(s, 500, 5, 1, 1);
  const auto agg = aggregate(s, 500, 5, traces);
  EXPECT_TRUE(same_bits(agg.social.mean, traces[0].social));
  EXPECT_TRUE(same_bits(agg.social.q25, traces[0].social));
  EXPECT_TRUE(same_bits(agg.social.q75, traces[0].social));
  EXPECT_TRUE(same_bits(agg.k.mean, traces[0].k));
  EXPECT_TRUE(same_bits(agg.price_dev.mean, traces[0].price_dev));
  for (std::size_t p = 0; p < agg.rounds.size(); ++p) {
    EXPECT_EQ(agg.buyer_regret[2].mean[p], traces[0].buyer_regret[p * 3 + 2]);
  }
}

TEST(Aggregate, MeanAndQuartilesAcrossPaths) {
  auto c = inline_config({0.9}, {0.1});
  const MarketSetup s = setup_for(c);
  std::vector<PathTrace> traces(4, run_path(s, 1, 1, Rng(1)));
  for (int p = 0; p < 4; ++p) traces[p].social = {static_cast<double>(p + 1)};
  traces[1].price_dev = {std::nan("")};
  traces[2].price_dev = {std::nan("")};
  traces[0].price_dev = {1.0};
  traces[3].price_dev = {3.0};
  const auto agg = aggregate(s, 1, 1, traces);
  EXPECT_EQ(agg.social.mean[0], 2.5);
  EXPECT_EQ(agg.social.q25[0], 1.75);
  EXPECT_EQ(agg.social.q75[0], 3.25);
  // NaN entries are skipped, not counted as zero.
  EXPECT_EQ(agg.price_dev.mean[0], 2.0);
  EXPECT_EQ(agg.price_dev.q25[0], 1.5);
}

TEST(MakeSetup, RejectsMismatches) {
  auto c = inline_config({0.9, 0.8, 0.4}, {0.2, 0.5, 0.85});
  const auto inst = resolve_instance(c.instance);
  EXPECT_THROW(make_setup(c, inst.profile, {4, 4}, {4, 4, 4}), InvalidInput);
  auto bad_override = c;
  bad_override.overrides.push_back({Side::seller, 3, Truthful{}});
  EXPECT_THROW(make_setup(bad_override, inst.profile, {4, 4, 4}, {4, 4, 4}), InvalidInput);
  auto not_setter = c;
  not_setter.overrides.push_back({Side::buyer, 0, DeviantBuyerKStar{0.01}});
  EXPECT_THROW(make_setup(not_setter, inst.profile, {4, 4, 4}, {4, 4, 4}), InvalidInput);
  auto relaxed = inline_config({0.1}, {0.9});
  relaxed.relaxed = true;
  EXPECT_THROW(setup_for(relaxed), InvalidInput);
  auto out_of_unit = inline_config({1.5}, {0.2});
  EXPECT_THROW(setup_for(out_of_unit), InvalidInput);
  out_of_unit.noise.kind = NoiseModel::Kind::gaussian;
  out_of_unit.valuation_cap = 2.0;
  EXPECT_NO_THROW(setup_for(out_of_unit));
}

TEST(ResolveAlphas, RangeDrawsUseAlphaStream) {
  auto c = inline_config({0.9, 0.8}, {0.2, 0.5, 0.6});
  c.alpha = AlphaRange{4.0, 8.0};
  const auto inst = resolve_instance(c.instance);
  const auto [b, s] = resolve_alphas(c, inst.profile);
  Rng rng = Rng::stream(c.master_seed, Rng::kAlphaStream);
  ASSERT_EQ(b.size(), 2u);
  ASSERT_EQ(s.size(), 3u);
  for (double a : b) EXPECT_EQ(a, rng.uniform(4.0, 8.0));
  for (double a : s) EXPECT_EQ(a, rng.uniform(4.0, 8.0));
}

TEST(Property, InformationFlowDominanceOnFlagship) {
  ExperimentConfig c;  // flagship instance spec and alpha range by default
  c.paths = 10;
  const auto agg = run_experiment(c);
  std::uint64_t rounds = 0, below = 0;
  for (const auto& s : agg.stats) {
    rounds += s.post_warmup_rounds;
    below += s.post_warmup_k_below;
    EXPECT_EQ(s.violations, 0u);
  }
  EXPECT_LT(static_cast<double>(below) / static_cast<double>(rounds), 0.05);
}

}  // namespace

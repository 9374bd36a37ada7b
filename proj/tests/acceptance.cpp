// Runs every acceptance criterion at its stated tolerance; one PASS/FAIL line each.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>

#include "dauction/report.hpp"
#include "dauction/sim.hpp"
#include "dauction/theory.hpp"

using namespace dauction;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

int failures = 0;

void report(int id, const char* name, bool pass, const std::string& detail) {
  if (!pass) ++failures;
  std::printf("[%s] criterion %d %s: %s\n", pass ? "PASS" : "FAIL", id, name, detail.c_str());
  std::fflush(stdout);
}

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

// Exhaustive maximizer of the break-even condition: the largest K such that
// some K buyers all bid at least every ask of some K sellers.
struct Brute {
  std::size_t k = 0;
  std::optional<double> price;
  std::vector<std::size_t> buyers;
  std::vector<std::size_t> sellers;
};

Brute brute_force(const BidProfile& b) {
  const std::size_t n = b.buyer_bids.size();
  const std::size_t m = b.seller_bids.size();
  Brute best;
  for (std::uint32_t bm = 1; bm < (1u << n); ++bm) {
    const auto kb = static_cast<std::size_t>(__builtin_popcount(bm));
    if (kb < best.k) continue;
    double low = INFINITY;
    for (std::size_t i = 0; i < n; ++i) {
      if (bm >> i & 1u) low = std::min(low, b.buyer_bids[i]);
    }
    for (std::uint32_t sm = 1; sm < (1u << m); ++sm) {
      if (static_cast<std::size_t>(__builtin_popcount(sm)) != kb) continue;
      double high = -INFINITY;
      for (std::size_t j = 0; j < m; ++j) {
        if (sm >> j & 1u) high = std::max(high, b.seller_bids[j]);
      }
      if (low >= high) best.k = kb;
    }
  }
  if (best.k == 0) return best;
  // Participants: the k best bids on each side, equal bids going to the lower id.
  auto pick = [&](const std::vector<double>& v, auto better) {
    std::vector<std::size_t> chosen;
    double edge = 0.0;
    for (std::size_t a = 0; a < v.size(); ++a) {
      std::size_t ahead = 0;
      for (std::size_t o = 0; o < v.size(); ++o) {
        if (better(v[o], v[a]) || (v[o] == v[a] && o < a)) ++ahead;
      }
      if (ahead < best.k) chosen.push_back(a);
      if (ahead == best.k - 1) edge = v[a];
    }
    return std::make_pair(chosen, edge);
  };
  const auto [buyers, bid] = pick(b.buyer_bids, std::greater<>());
  const auto [sellers, ask] = pick(b.seller_bids, std::less<>());
  best.buyers = buyers;
  best.sellers = sellers;
  best.price = (bid + ask) / 2.0;
  return best;
}

bool agrees(const BidProfile& b) {
  const RoundOutcome out = clear_market(b);
  const Brute e = brute_force(b);
  return out.k == e.k && out.price == e.price && out.participating_buyers == e.buyers &&
         out.participating_sellers == e.sellers;
}

void criterion1() {
  const auto start = Clock::now();
  std::mt19937_64 gen(1);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  int mismatches = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    BidProfile b;
    const std::size_t n = 1 + gen() % 6;
    const std::size_t m = 1 + gen() % 6;
    for (std::size_t i = 0; i < n; ++i) b.buyer_bids.push_back(u(gen));
    for (std::size_t j = 0; j < m; ++j) b.seller_bids.push_back(u(gen));
    if (!agrees(b)) ++mismatches;
  }
  const double grid[] = {0.0, 0.25, 0.5, 0.75, 1.0};
  int profiles = 0;
  for (double b0 : grid)
    for (double b1 : grid)
      for (double s0 : grid)
        for (double s1 : grid) {
          ++profiles;
          if (!agrees({{b0, b1}, {s0, s1}})) ++mismatches;
        }
  const double secs = seconds_since(start);
  report(1, "mechanism oracle equivalence", mismatches == 0 && secs < 10.0,
         std::to_string(mismatches) + " mismatches over 1000 random + " + std::to_string(profiles) +
             " grid profiles in " + fmt("%.2f s (limit 10 s)", secs));
}

struct Flagship {
  ExperimentConfig config;
  AggregateResult result;
  double seconds = 0.0;
};

Flagship run_flagship() {
  Flagship f;
  // Defaults: N = M = 8, K* = 5, gap 0.2, alpha ~ U[4, 8], Bernoulli, T = 50000, 100 paths.
  f.config = ExperimentConfig{};
  const auto start = Clock::now();
  f.result = run_experiment(f.config);
  f.seconds = seconds_since(start);
  return f;
}

void criterion2(const Flagship& f) {
  std::uint64_t violations = 0;
  for (const auto& s : f.result.stats) violations += s.violations;

  std::mt19937_64 gen(2);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  int bad = 0;
  for (int trial = 0; trial < 10000; ++trial) {
    BidProfile b;
    const std::size_t n = 1 + gen() % 8;
    const std::size_t m = 1 + gen() % 8;
    for (std::size_t i = 0; i < n; ++i) b.buyer_bids.push_back(u(gen));
    for (std::size_t j = 0; j < m; ++j) b.seller_bids.push_back(u(gen));
    const RoundOutcome before = clear_market(b);
    const bool buyer = gen() % 2 == 0;
    const std::size_t id = buyer ? gen() % n : gen() % m;
    const bool was_in = buyer ? before.buyer_participates(id) : before.seller_participates(id);
    if (buyer) {
      b.buyer_bids[id] += u(gen);
    } else {
      b.seller_bids[id] -= u(gen);
    }
    const RoundOutcome after = clear_market(b);
    const bool now_in = buyer ? after.buyer_participates(id) : after.seller_participates(id);
    if (after.k < before.k || (was_in && !now_in)) ++bad;
  }
  const std::uint64_t rounds = f.result.paths * f.result.horizon;
  report(2, "budget balance and monotonicity", violations == 0 && bad == 0,
         std::to_string(violations) + " unbalanced or non-individually-rational rounds of " +
             std::to_string(rounds) + "; " + std::to_string(bad) +
             " monotonicity failures in 10000 perturbations");
}

void criterion3() {
  std::mt19937_64 gen(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  int nonzero = 0;
  int runs = 0;
  auto check = [&](ExperimentConfig c) {
    c.default_strategy = Truthful{};
    const auto r = run_experiment(c);
    ++runs;
    for (const auto& l : r.final_ledgers) {
      bool zero = l.social_regret == 0.0;
      for (double v : l.buyer_regret) zero = zero && v == 0.0;
      for (double v : l.seller_regret) zero = zero && v == 0.0;
      if (!zero) ++nonzero;
    }
  };
  for (int trial = 0; trial < 40; ++trial) {
    ExperimentConfig c;
    std::vector<double> bv(1 + gen() % 8), sv(1 + gen() % 8);
    for (auto& v : bv) v = u(gen);
    for (auto& v : sv) v = u(gen);
    c.instance = InlineProfile{bv, sv, std::nullopt};
    c.horizon = 1 + gen() % 3000;
    c.paths = 3;
    c.master_seed = gen();
    check(c);
  }
  ExperimentConfig flagship;
  flagship.paths = 2;
  check(flagship);
  report(3, "truthful fixed point", nonzero == 0,
         std::to_string(nonzero) + " paths with nonzero regret across " + std::to_string(runs) +
             " truthful runs (exact zero required)");
}

void criterion4(const Flagship& f) {
  const AggregateResult& r = f.result;
  std::uint64_t tail = 0, tail_k = 0, priced = 0;
  double dev = 0.0;
  for (const auto& s : r.stats) {
    tail += s.tail_rounds;
    tail_k += s.tail_k_at_kstar;
    priced += s.tail_priced_rounds;
    dev += s.tail_abs_price_dev;
  }
  const double share = static_cast<double>(tail_k) / static_cast<double>(tail);
  const double mean_dev = dev / static_cast<double>(priced);

  const TheoryParams params = theory_params_for(r.setup, f.config);
  const std::uint64_t T = r.horizon;
  const double paths = static_cast<double>(r.paths);
  double social = 0.0;
  for (const auto& l : r.final_ledgers) social += l.social_regret;
  social /= paths;
  const double social_bound = social_upper_bound(r.setup.profile, params, T);

  bool nonpart_ok = true;
  bool part_ok = true;
  double worst_nonpart = 0.0;
  double worst_part = 0.0;
  for (const AgentBound& b : individual_upper_bounds(r.setup.profile, params)) {
    double mean = 0.0;
    for (const auto& l : r.final_ledgers) {
      mean += b.side == Side::buyer ? l.buyer_regret[b.agent_id] : l.seller_regret[b.agent_id];
    }
    mean /= paths;
    const double bound = b.at(T);
    if (b.participant) {
      part_ok = part_ok && std::abs(mean) <= bound;
      worst_part = std::max(worst_part, std::abs(mean) / bound);
    } else {
      nonpart_ok = nonpart_ok && mean <= bound;
      worst_nonpart = std::max(worst_nonpart, mean / bound);
    }
  }
  const bool a = share >= 0.90;
  const bool b = mean_dev <= 0.05;
  const bool c = social <= social_bound;
  const bool runtime = f.seconds <= 300.0;
  std::ostringstream d;
  d << "(a) K=K* share in final 10% " << fmt("%.4f", share) << " (>= 0.90); "
    << "(b) mean |p-p*| in final 10% " << fmt("%.5f", mean_dev) << " (<= 0.05); "
    << "(c) mean R_SW(T) " << fmt("%.1f", social) << " <= bound " << fmt("%.1f", social_bound) << "; "
    << "(d) worst non-participant regret/bound " << fmt("%.4f", worst_nonpart) << "; "
    << "(e) worst participant |regret|/bound " << fmt("%.4f", worst_part) << "; "
    << "runtime " << fmt("%.1f s", f.seconds) << " (limit 300 s)";
  report(4, "flagship run", a && b && c && nonpart_ok && part_ok && runtime, d.str());
}

double mean_at(const SeriesBand& band, const std::vector<std::uint64_t>& rounds, std::uint64_t t) {
  const auto it = std::find(rounds.begin(), rounds.end(), t);
  if (it == rounds.end()) return std::nan("");
  return band.mean[static_cast<std::size_t>(it - rounds.begin())];
}

void criterion5(const Flagship& f) {
  // R_SW(t) does not depend on the horizon, so the shorter horizons are read off the same paths.
  const auto& r = f.result;
  double lo = INFINITY, hi = -INFINITY;
  std::string detail = "R_SW(T)/ln T:";
  for (std::uint64_t t : {12500ULL, 25000ULL, 50000ULL}) {
    const double v = mean_at(r.social, r.rounds, t) / std::log(static_cast<double>(t));
    lo = std::min(lo, v);
    hi = std::max(hi, v);
    detail += " T=" + std::to_string(t) + " " + fmt("%.3f", v) + ";";
  }
  const double spread = hi / lo - 1.0;
  report(5, "logarithmic social-regret growth", std::isfinite(spread) && spread <= 0.25,
         detail + " max/min - 1 = " + fmt("%.4f", spread) + " (<= 0.25)");
}

void criterion6(const Flagship& f) {
  const auto& r = f.result;
  const double full = mean_at(r.price_dev_abs_cum, r.rounds, r.horizon);
  const double quarter = mean_at(r.price_dev_abs_cum, r.rounds, r.horizon / 4);
  const double ratio = full / quarter;
  report(6, "sqrt(T) participant signature", ratio >= 1.5 && ratio <= 3.5,
         "mean sum|p-p*| at T " + fmt("%.3f", full) + ", at T/4 " + fmt("%.3f", quarter) +
             ", ratio " + fmt("%.4f", ratio) + " (in [1.5, 3.5])");
}

void criterion7() {
  TheoryParams p;
  p.alpha_max = 4.0;
  p.alpha_min = 4.0;
  p.b_max = 1.0;
  const auto three = oracle_solution({0.9, 0.8, 0.4}, {0.2, 0.5, 0.85});
  const SocialBound sb = social_upper_bound(three, p);
  const double coef = 16.0 * (1 / 0.5 + 1 / 0.4 + 1 / 0.65 + 1 / 0.35 + 1 / 0.45);
  const double constant = 9.0 * std::numbers::pi * std::numbers::pi / 6.0;
  const double nonpart = individual_upper_bounds(three, p)[2].log_coefficient;
  const double lb = social_lower_bound_constant(oracle_solution({0.9, 0.3}, {0.5}));
  auto rel = [](double a, double b) { return std::abs(a - b) / std::abs(b); };
  const double e1 = rel(sb.log_coefficient, coef);
  const double e2 = rel(sb.constant, constant);
  const double e3 = rel(nonpart, std::sqrt(2.0) * 16.0 / 0.4);
  const double e4 = rel(lb, 10.0 / 3.0);
  const double worst = std::max({e1, e2, e3, e4});
  std::ostringstream d;
  d << "social " << fmt("%.6f", sb.log_coefficient) << " ln T + " << fmt("%.6f", sb.constant)
    << ", non-participant " << fmt("%.6f", nonpart) << " ln T, lower-bound constant "
    << fmt("%.9f", lb) << "; worst relative error " << fmt("%.2e", worst) << " (<= 1e-9)";
  report(7, "theory calculators", worst <= 1e-9, d.str());
}

void criterion8() {
  ExperimentConfig c;
  c.instance = InlineProfile{{0.7}, {0.3}, std::nullopt};
  c.relaxed = true;
  c.noise.kind = NoiseModel::Kind::gaussian;
  c.valuation_cap = 1.0;
  c.alpha = AlphaVectors{{4.0}, {4.0}};
  c.overrides.push_back({Side::seller, 0, Truthful{}});
  c.horizon = 10000;
  c.paths = 200;
  c.master_seed = 8;
  const auto r = run_experiment(c);
  double min_mean = INFINITY;
  for (double v : r.buyer_regret[0].mean) min_mean = std::min(min_mean, v);
  const auto summary = summary_json(r, c);
  const double emitted = summary["theory"]["minimax_reference"].get<double>();
  const double formula = std::sqrt(10000.0) / 36.0;
  const double final_mean = r.buyer_regret[0].mean.back();
  const bool pass = min_mean >= 0.0 && emitted == formula && minimax_reference(10000) == formula;
  report(8, "relaxed fixed-price mode", pass,
         "min over t of mean buyer regret " + fmt("%.4f", min_mean) + " (>= 0); final mean " +
             fmt("%.3f", final_mean) + " vs reference sqrt(T)/36 = " + fmt("%.6f", emitted) +
             " (formula " + fmt("%.6f", formula) + ")");
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void criterion9(const Flagship& first) {
  const auto root = std::filesystem::temp_directory_path() / "dauction_acceptance";
  std::filesystem::remove_all(root);
  emit_results(first.result, first.config, root / "a");
  const Flagship second = run_flagship();
  emit_results(second.result, second.config, root / "b");
  const std::string csv_a = slurp(root / "a" / "series.csv");
  const std::string csv_b = slurp(root / "b" / "series.csv");
  const std::string sum_a = slurp(root / "a" / "summary.json");
  const std::string sum_b = slurp(root / "b" / "summary.json");
  std::filesystem::remove_all(root);
  report(9, "determinism", !csv_a.empty() && csv_a == csv_b && sum_a == sum_b,
         "series.csv " + std::to_string(csv_a.size()) + " bytes " +
             (csv_a == csv_b ? "identical" : "DIFFERENT") + ", summary.json " +
             std::to_string(sum_a.size()) + " bytes " + (sum_a == sum_b ? "identical" : "DIFFERENT"));
}

}  // namespace

int main() {
  try {
    criterion1();
    const Flagship flagship = run_flagship();
    criterion2(flagship);
    criterion3();
    criterion4(flagship);
    criterion5(flagship);
    criterion6(flagship);
    criterion7();
    criterion8();
    criterion9(flagship);
  } catch (const std::exception& e) {
    std::printf("[FAIL] acceptance aborted: %s\n", e.what());
    return 1;
  }
  std::printf("%d criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "dauction/checks.hpp"
#include "dauction/config.hpp"
#include "dauction/error.hpp"
#include "dauction/report.hpp"
#include "dauction/sim.hpp"
#include "dauction/theory.hpp"

using nlohmann::json;
using namespace dauction;

namespace {

struct RunFlags {
  std::string config_path;
  std::optional<std::uint64_t> horizon;
  std::optional<std::uint64_t> paths;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<int> threads;
  std::string instance_path;
  bool serial = false;
};

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError({"'" + path + "' is not well-formed JSON: " + e.what()});
  }
}

// Writes command-line flags into the config document ahead of validation.
ExperimentConfig build_config(const RunFlags& f) {
  json doc = f.config_path.empty() ? json::object() : read_json_file(f.config_path);
  if (!doc.is_object()) throw ConfigError({"configuration must be a JSON object"});
  if (f.horizon) doc["horizon"] = *f.horizon;
  if (f.paths) doc["paths"] = *f.paths;
  if (f.seed) doc["master_seed"] = *f.seed;
  if (f.out) doc["output_dir"] = *f.out;
  if (f.threads) doc["threads"] = *f.threads;
  if (!f.instance_path.empty()) doc["instance"] = json{{"profile_path", f.instance_path}};
  return parse_config(doc);
}

void add_run_flags(CLI::App* cmd, RunFlags& f) {
  cmd->add_option("--config", f.config_path, "experiment config (JSON)");
  cmd->add_option("--horizon", f.horizon, "rounds per path (T)");
  cmd->add_option("--paths", f.paths, "independent sample paths");
  cmd->add_option("--seed", f.seed, "master seed");
  cmd->add_option("--out", f.out, "output directory");
  cmd->add_option("--threads", f.threads, "worker threads (0 = OpenMP default)");
  cmd->add_flag("--serial", f.serial, "use the single-threaded reference path runner");
}

int do_run(const RunFlags& f) {
  const ExperimentConfig config = build_config(f);
  const AggregateResult result =
      run_experiment(config, f.serial ? Execution::serial : Execution::parallel);
  emit_results(result, config, config.output_dir);
  std::cerr << "wrote " << config.output_dir << "/series.csv and summary.json\n";
  return 0;
}

int do_bounds(const std::string& instance_path, const std::string& config_path,
              std::uint64_t horizon, std::optional<double> alpha_max,
              std::optional<double> alpha_min, std::optional<double> b_max) {
  ValuationProfile profile;
  if (!instance_path.empty()) {
    profile = profile_from_json(read_json_file(instance_path));
  } else {
    RunFlags f;
    f.config_path = config_path;
    profile = resolve_instance(build_config(f).instance).profile;
  }
  TheoryParams params;
  params.alpha_max = alpha_max.value_or(4.0);
  params.alpha_min = alpha_min.value_or(std::min(4.0, params.alpha_max));
  if (b_max) {
    params.b_max = *b_max;
  } else {
    params.b_max = 0.0;
    for (double v : profile.buyer_values) params.b_max = std::max(params.b_max, v);
    for (double v : profile.seller_values) params.b_max = std::max(params.b_max, v);
  }
  json doc{{"instance", profile_to_json(profile)}, {"theory", theory_report(profile, params, horizon)}};
  std::cout << dump_json(doc);
  return 0;
}

int do_gen(const std::string& config_path, InstanceSpec spec, bool spec_from_flags,
           const std::string& out) {
  if (!config_path.empty() && !spec_from_flags) {
    RunFlags f;
    f.config_path = config_path;
    const auto cfg = build_config(f);
    const auto* s = std::get_if<InstanceSpec>(&cfg.instance);
    if (!s) throw InvalidInput("gen needs a config whose instance is a generate spec");
    spec = *s;
  }
  const std::string text = dump_json(profile_to_json(generate_instance(spec), spec));
  if (out.empty() || out == "-") {
    std::cout << text;
  } else {
    write_text_file(out, text);
  }
  return 0;
}

int do_check(std::uint64_t seed) {
  bool all = true;
  for (const auto& r : run_property_checks(seed)) {
    std::cout << (r.passed ? "PASS " : "FAIL ") << r.name << "  (" << r.detail << ")\n";
    all = all && r.passed;
  }
  return all ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Repeated double auction with confidence-bound learners"};
  app.require_subcommand(1);

  RunFlags run_flags;
  auto* run = app.add_subcommand("run", "run an experiment and write series.csv + summary.json");
  add_run_flags(run, run_flags);

  RunFlags replay_flags;
  auto* replay = app.add_subcommand("replay", "re-run a saved instance file with a given seed");
  add_run_flags(replay, replay_flags);
  replay->add_option("--instance", replay_flags.instance_path, "profile file from gen")->required();

  std::string bounds_instance;
  std::string bounds_config;
  std::uint64_t bounds_horizon = 50'000;
  std::optional<double> alpha_max;
  std::optional<double> alpha_min;
  std::optional<double> b_max;
  auto* bounds = app.add_subcommand("bounds", "print the theory report for an instance");
  auto* bounds_inst_opt = bounds->add_option("--instance", bounds_instance, "profile file");
  bounds->add_option("--config", bounds_config, "take the instance from a config")
      ->excludes(bounds_inst_opt);
  bounds->add_option("--horizon", bounds_horizon, "T for the evaluated bounds");
  bounds->add_option("--alpha-max", alpha_max, "largest exploration parameter (default 4)");
  bounds->add_option("--alpha-min", alpha_min, "smallest exploration parameter");
  bounds->add_option("--b-max", b_max, "utility cap (default: largest valuation)");

  std::string gen_config;
  std::string gen_out;
  InstanceSpec spec;
  auto* gen = app.add_subcommand("gen", "draw an instance and write it as a profile file");
  gen->add_option("--config", gen_config, "take the instance spec from a config");
  gen->add_option("--out", gen_out, "output file (default stdout)");
  auto* g_n = gen->add_option("--buyers", spec.n_buyers, "N");
  auto* g_m = gen->add_option("--sellers", spec.m_sellers, "M");
  auto* g_k = gen->add_option("--k-star", spec.k_star, "optimal trade count");
  auto* g_gap = gen->add_option("--min-gap", spec.min_gap, "minimum |value - p*|");
  auto* g_lo = gen->add_option("--lo", spec.lo, "lower end of the value range");
  auto* g_hi = gen->add_option("--hi", spec.hi, "upper end of the value range");
  auto* g_seed = gen->add_option("--seed", spec.seed, "generator seed");

  std::uint64_t check_seed = 1;
  auto* check = app.add_subcommand("check", "run the property suites on small instances");
  check->add_option("--seed", check_seed, "seed for the random instances");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n\n" << app.help();
    return 2;
  }

  try {
    if (*run) return do_run(run_flags);
    if (*replay) return do_run(replay_flags);
    if (*bounds) {
      return do_bounds(bounds_instance, bounds_config, bounds_horizon, alpha_max, alpha_min, b_max);
    }
    if (*gen) {
      const bool from_flags = g_n->count() + g_m->count() + g_k->count() + g_gap->count() +
                                  g_lo->count() + g_hi->count() + g_seed->count() > 0;
      return do_gen(gen_config, spec, from_flags, gen_out);
    }
    if (*check) return do_check(check_seed);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const IoError& e) {
    std::cerr << "I/O error: " << e.what() << "\n";
    return 3;
  } catch (const InfeasibleSpec& e) {
    std::cerr << "infeasible instance spec: " << e.what() << "\n";
    return 4;
  } catch (const DegenerateInstance& e) {
    std::cerr << "degenerate instance: " << e.what() << "\n";
    return 5;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}

#include <CLI11.hpp>

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "app_config.hpp"
#include "commands.hpp"
#include "freqbias/errors.hpp"
#include "freqbias/version.hpp"
#include "manifest.hpp"

namespace {

using freqbias::cli::json;

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Frequency-bias inference for longitudinal variant-adoption data"};
  app.set_version_flag("--version", FREQBIAS_VERSION);
  app.require_subcommand(1);

  // Global options, registered on the top-level app and on every
  // subcommand so they work in either position.
  std::uint64_t seed = 42;
  int workers = 0;
  std::string config_path;
  std::string out_dir = ".";
  const auto add_globals = [&](CLI::App& target) {
    target.add_option("--seed", seed, "Master seed; every stochastic stage derives its own")
        ->capture_default_str();
    target.add_option("--workers", workers, "Worker threads (0 = all hardware threads)")
        ->capture_default_str();
    target.add_option("--config", config_path,
                      "JSON config file, or a previous run's manifest.json to replay it");
    target.add_option("--out-dir", out_dir, "Directory for output files")->capture_default_str();
  };
  add_globals(app);

  std::optional<freqbias::cli::RunRequest> request;

  // Defaults (< config file < flags) with the overlay applied only for
  // flags the user actually passed, at either option position.
  const auto base_config = [&](CLI::App* sub, const std::string& command) {
    json cfg = freqbias::cli::default_config(command);
    if (!config_path.empty()) {
      freqbias::cli::merge_config(cfg, freqbias::cli::load_config_file(config_path, command),
                                  config_path);
    }
    if (app.count("--seed") + sub->count("--seed") > 0) cfg["seed"] = seed;
    if (app.count("--out-dir") + sub->count("--out-dir") > 0) cfg["out_dir"] = out_dir;
    return cfg;
  };
  const auto submit = [&](const std::string& command, json cfg) {
    request = freqbias::cli::RunRequest{command, std::move(cfg), workers, config_path};
  };

  // Shared option storage; each value is copied into the resolved config
  // only when its flag was given.
  std::string events_path;
  std::string table_path;
  int range_from = 0;
  int range_to = 0;
  int population_size = 729;
  double innovation_rate = 0.037;
  int warmup_steps = 200;
  int record_steps = 32;
  double bias = 0.0;
  int y_max = 142;
  int neutral_reps = 100;
  int horizon = 400;
  int reps = 100;
  int iterations = 100000;
  double tolerance = 0.01;
  double prior_low = -0.2;
  double prior_high = 0.2;
  int gof_pseudo = 1000;
  int cv_folds = 20;
  std::vector<double> cv_tolerances;
  int per_model = 50000;
  int trees = 1000;
  std::int64_t bootstrap_rows = 0;
  int mtry = 0;
  int min_node_size = 1;
  double bias_bound = 0.2;
  bool save_reference = false;
  bool save_forest = false;

  const auto add_sim_params = [&](CLI::App* sub) {
    sub->add_option("--population-size", population_size, "Agents per generation (N)")
        ->capture_default_str();
    sub->add_option("--innovation-rate", innovation_rate, "Per-copy innovation probability (mu)")
        ->capture_default_str();
    sub->add_option("--warmup-steps", warmup_steps, "Discarded generations before recording")
        ->capture_default_str();
  };
  const auto overlay_sim_params = [&](CLI::App* sub, json& cfg) {
    if (sub->count("--population-size")) cfg["population_size"] = population_size;
    if (sub->count("--innovation-rate")) cfg["innovation_rate"] = innovation_rate;
    if (sub->count("--warmup-steps")) cfg["warmup_steps"] = warmup_steps;
  };

  // ingest ------------------------------------------------------------------
  auto* ingest = app.add_subcommand(
      "ingest", "Tally an adoption-event CSV into a frequency table and estimate N and mu");
  add_globals(*ingest);
  ingest->add_option("events", events_path, "Event CSV with rows timepoint,variant_id,adopter_id");
  ingest->add_option("--from", range_from, "First timepoint kept (default: earliest observed)");
  ingest->add_option("--to", range_to, "Last timepoint kept (default: latest observed)");
  ingest->callback([&] {
    json cfg = base_config(ingest, "ingest");
    if (ingest->count("events")) cfg["events"] = events_path;
    if (ingest->count("--from")) cfg["from"] = range_from;
    if (ingest->count("--to")) cfg["to"] = range_to;
    submit("ingest", std::move(cfg));
  });

  // simulate ----------------------------------------------------------------
  auto* simulate =
      app.add_subcommand("simulate", "Run one transmission simulation and write its table");
  add_globals(*simulate);
  add_sim_params(simulate);
  simulate->add_option("--bias", bias, "Frequency bias b (negative = conformity)")
      ->capture_default_str();
  simulate->add_option("--record-steps", record_steps, "Recorded generations")
      ->capture_default_str();
  simulate->callback([&] {
    json cfg = base_config(simulate, "simulate");
    overlay_sim_params(simulate, cfg);
    if (simulate->count("--bias")) cfg["bias"] = bias;
    if (simulate->count("--record-steps")) cfg["record_steps"] = record_steps;
    submit("simulate", std::move(cfg));
  });

  // turnover ----------------------------------------------------------------
  auto* turnover = app.add_subcommand(
      "turnover", "Turn-over profile, diversity and fitted exponent of a frequency table");
  add_globals(*turnover);
  add_sim_params(turnover);
  turnover->add_option("table", table_path, "Frequency table (CSV, or JSON if named *.json)");
  turnover->add_option("--y-max", y_max, "Largest top-list size")->capture_default_str();
  turnover->add_option("--neutral-reps", neutral_reps,
                       "Neutral baseline replicates for the KS comparison (0 = skip)");
  turnover->callback([&] {
    json cfg = base_config(turnover, "turnover");
    overlay_sim_params(turnover, cfg);
    if (turnover->count("table")) cfg["table"] = table_path;
    if (turnover->count("--y-max")) cfg["y_max"] = y_max;
    if (turnover->count("--neutral-reps")) cfg["neutral_reps"] = neutral_reps;
    submit("turnover", std::move(cfg));
  });

  // warmup ------------------------------------------------------------------
  auto* warmup = app.add_subcommand(
      "warmup", "Mean neutral diversity trajectory and the step where it plateaus");
  add_globals(*warmup);
  warmup->add_option("--population-size", population_size, "Agents per generation (N)")
      ->capture_default_str();
  warmup->add_option("--innovation-rate", innovation_rate, "Per-copy innovation probability (mu)")
      ->capture_default_str();
  warmup->add_option("--horizon", horizon, "Generations simulated per replicate")
      ->capture_default_str();
  warmup->add_option("--reps", reps, "Replicates averaged")->capture_default_str();
  warmup->callback([&] {
    json cfg = base_config(warmup, "warmup");
    if (warmup->count("--population-size")) cfg["population_size"] = population_size;
    if (warmup->count("--innovation-rate")) cfg["innovation_rate"] = innovation_rate;
    if (warmup->count("--horizon")) cfg["horizon"] = horizon;
    if (warmup->count("--reps")) cfg["reps"] = reps;
    submit("warmup", std::move(cfg));
  });

  // infer -------------------------------------------------------------------
  auto* infer = app.add_subcommand(
      "infer", "Rejection-ABC posterior for the bias b behind an observed table");
  add_globals(*infer);
  add_sim_params(infer);
  infer->add_option("table", table_path, "Observed frequency table");
  infer->add_option("--y-max", y_max, "Largest top-list size")->capture_default_str();
  infer->add_option("--iterations", iterations, "Reference simulations")->capture_default_str();
  infer->add_option("--tolerance", tolerance, "Accepted fraction epsilon")->capture_default_str();
  infer->add_option("--prior-low", prior_low, "Lower bound of the uniform prior on b")
      ->capture_default_str();
  infer->add_option("--prior-high", prior_high, "Upper bound of the uniform prior on b")
      ->capture_default_str();
  infer->add_option("--gof", gof_pseudo,
                    "Goodness-of-fit stage with this many pseudo-observed draws");
  infer->add_option("--cv", cv_folds, "Cross-validation stage with this many held-out rows");
  infer->add_option("--cv-tolerances", cv_tolerances,
                    "Tolerances compared by the cross-validation stage")
      ->delimiter(',');
  infer->add_flag("--save-reference,!--no-save-reference", save_reference,
                  "Write the full reference table (default: on)");
  infer->callback([&] {
    json cfg = base_config(infer, "infer");
    overlay_sim_params(infer, cfg);
    if (infer->count("table")) cfg["table"] = table_path;
    if (infer->count("--y-max")) cfg["y_max"] = y_max;
    if (infer->count("--iterations")) cfg["iterations"] = iterations;
    if (infer->count("--tolerance")) cfg["tolerance"] = tolerance;
    if (infer->count("--prior-low")) cfg["prior_low"] = prior_low;
    if (infer->count("--prior-high")) cfg["prior_high"] = prior_high;
    if (infer->count("--gof")) cfg["gof_pseudo"] = gof_pseudo;
    if (infer->count("--cv")) cfg["cv_folds"] = cv_folds;
    if (infer->count("--cv-tolerances")) cfg["cv_tolerances"] = cv_tolerances;
    if (infer->count("--save-reference") + infer->count("--no-save-reference")) {
      cfg["save_reference"] = save_reference;
    }
    submit("infer", std::move(cfg));
  });

  // choose ------------------------------------------------------------------
  auto* choose = app.add_subcommand(
      "choose", "Random-forest model choice between conformity, novelty and neutrality");
  add_globals(*choose);
  add_sim_params(choose);
  choose->add_option("table", table_path, "Observed frequency table");
  choose->add_option("--y-max", y_max, "Largest top-list size")->capture_default_str();
  choose->add_option("--per-model", per_model, "Reference simulations per candidate model")
      ->capture_default_str();
  choose->add_option("--trees", trees, "Trees in the classification forest")
      ->capture_default_str();
  choose->add_option("--bootstrap-rows", bootstrap_rows,
                     "Bootstrap sample size per tree (0 = reference row count)");
  choose->add_option("--mtry", mtry, "Features tried per split (0 = floor(sqrt(F)))");
  choose->add_option("--min-node-size", min_node_size, "Smallest splittable node")
      ->capture_default_str();
  choose->add_option("--bias-bound", bias_bound, "Half-width of the biased models' priors")
      ->capture_default_str();
  choose->add_flag("--save-reference", save_reference,
                   "Write the labeled reference table and its column schema");
  choose->add_flag("--save-forest", save_forest, "Write the forest and LDA projection as JSON");
  choose->callback([&] {
    json cfg = base_config(choose, "choose");
    overlay_sim_params(choose, cfg);
    if (choose->count("table")) cfg["table"] = table_path;
    if (choose->count("--y-max")) cfg["y_max"] = y_max;
    if (choose->count("--per-model")) cfg["per_model"] = per_model;
    if (choose->count("--trees")) cfg["trees"] = trees;
    if (choose->count("--bootstrap-rows")) cfg["bootstrap_rows"] = bootstrap_rows;
    if (choose->count("--mtry")) cfg["mtry"] = mtry;
    if (choose->count("--min-node-size")) cfg["min_node_size"] = min_node_size;
    if (choose->count("--bias-bound")) cfg["bias_bound"] = bias_bound;
    if (choose->count("--save-reference")) cfg["save_reference"] = save_reference;
    if (choose->count("--save-forest")) cfg["save_forest"] = save_forest;
    submit("choose", std::move(cfg));
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "freqbias: " << e.what() << "\n";
    return 2;
  } catch (const freqbias::InputError& e) {
    std::cerr << "freqbias: error: " << e.what() << "\n";
    return 2;
  }

  if (!request) {
    std::cerr << "freqbias: no command given\n";
    return 2;
  }
  try {
    freqbias::cli::run_command(*request);
  } catch (const freqbias::InputError& e) {
    std::cerr << "freqbias: error: " << e.what() << "\n";
    return 2;
  } catch (const freqbias::DegenerateError& e) {
    std::cerr << "freqbias: error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "freqbias: error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

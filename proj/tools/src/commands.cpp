#include "commands.hpp"

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "freqbias/abc.hpp"
#include "freqbias/corpus.hpp"
#include "freqbias/errors.hpp"
#include "freqbias/format.hpp"
#include "freqbias/frequency_table.hpp"
#include "freqbias/parallel.hpp"
#include "freqbias/rf.hpp"
#include "freqbias/rng.hpp"
#include "freqbias/simulator.hpp"
#include "freqbias/stats.hpp"
#include "manifest.hpp"

namespace freqbias::cli {
namespace {

// ---------------------------------------------------------------------------
// Typed access to resolved configuration values.  The defaults guarantee the
// keys exist; these guards catch hand-written config files of the wrong shape.

const json& member(const json& cfg, const char* key) {
  if (!cfg.contains(key)) {
    throw InputError(std::string("configuration key '") + key + "' is missing");
  }
  return cfg.at(key);
}

int as_int(const json& cfg, const char* key) {
  const json& value = member(cfg, key);
  if (!value.is_number_integer()) {
    throw InputError(std::string("configuration key '") + key + "' must be an integer");
  }
  return value.get<int>();
}

std::int64_t as_i64(const json& cfg, const char* key) {
  const json& value = member(cfg, key);
  if (!value.is_number_integer()) {
    throw InputError(std::string("configuration key '") + key + "' must be an integer");
  }
  return value.get<std::int64_t>();
}

std::uint64_t as_u64(const json& cfg, const char* key) {
  const json& value = member(cfg, key);
  if (!value.is_number_unsigned() && !(value.is_number_integer() && value.get<std::int64_t>() >= 0)) {
    throw InputError(std::string("configuration key '") + key +
                     "' must be a non-negative integer");
  }
  return value.get<std::uint64_t>();
}

double as_double(const json& cfg, const char* key) {
  const json& value = member(cfg, key);
  if (!value.is_number()) {
    throw InputError(std::string("configuration key '") + key + "' must be a number");
  }
  return value.get<double>();
}

bool as_bool(const json& cfg, const char* key) {
  const json& value = member(cfg, key);
  if (!value.is_boolean()) {
    throw InputError(std::string("configuration key '") + key + "' must be true or false");
  }
  return value.get<bool>();
}

std::vector<double> as_double_array(const json& cfg, const char* key) {
  const json& value = member(cfg, key);
  if (!value.is_array() || value.empty()) {
    throw InputError(std::string("configuration key '") + key +
                     "' must be a non-empty array of numbers");
  }
  std::vector<double> out;
  out.reserve(value.size());
  for (const auto& element : value) {
    if (!element.is_number()) {
      throw InputError(std::string("configuration key '") + key +
                       "' must be a non-empty array of numbers");
    }
    out.push_back(element.get<double>());
  }
  return out;
}

std::string absolute_path(const std::string& path) {
  return std::filesystem::absolute(path).lexically_normal().string();
}

/// Resolves a required input-file key to an absolute path, rewriting the
/// config in place so the manifest replays from any working directory.
std::string resolve_input_path(json& cfg, const char* key, const char* what) {
  const json& value = member(cfg, key);
  if (!value.is_string() || value.get<std::string>().empty()) {
    throw InputError(std::string("no ") + what +
                     " given (pass the positional argument or config key '" + key + "')");
  }
  const std::string abs = absolute_path(value.get<std::string>());
  cfg[key] = abs;
  return abs;
}

/// Short human-readable number for the stdout summary lines; all file
/// output uses exact round-trip formatting instead.
std::string fmt4(double value) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", value);
  return buf;
}

SimulationConfig sim_template_from(const json& cfg, int record_steps) {
  SimulationConfig sim;
  sim.population_size = as_int(cfg, "population_size");
  sim.innovation_rate = as_double(cfg, "innovation_rate");
  sim.warmup_steps = as_int(cfg, "warmup_steps");
  sim.record_steps = record_steps;
  return sim;
}

/// Digests the config file (when one was given) into the manifest's
/// input list; the resolved values it contributed are already in cfg.
void note_config_input(RunRecorder& recorder, const RunRequest& request) {
  if (request.config_path.empty()) return;
  const std::string abs = absolute_path(request.config_path);
  recorder.note_input(abs, read_text_file(abs));
}

struct LoadedTable {
  FrequencyTable table;
  SummaryStats stats;
  int y_max = 0;
};

/// Reads, digests and summarizes the observed frequency table named by
/// cfg["table"] (CSV, or JSON for a ".json" path).
LoadedTable load_observed(RunRecorder& recorder, const json& cfg) {
  const std::string path = cfg.at("table").get<std::string>();
  const std::string bytes = read_text_file(path);
  recorder.note_input(path, bytes);
  LoadedTable loaded;
  loaded.table = path.size() >= 5 && path.compare(path.size() - 5, 5, ".json") == 0
                     ? table_from_json_text(bytes)
                     : table_from_csv(bytes);
  loaded.y_max = as_int(cfg, "y_max");
  loaded.stats =
      summarize(loaded.table, loaded.y_max, static_cast<int>(loaded.table.n_timepoints()));
  return loaded;
}

std::string turnover_csv(const std::vector<double>& mean_turnover) {
  std::string out = "y,mean_turnover\n";
  for (std::size_t y = 0; y < mean_turnover.size(); ++y) {
    out += std::to_string(y + 1) + "," + format_double(mean_turnover[y]) + "\n";
  }
  return out;
}

// ---------------------------------------------------------------------------
// ingest

void run_ingest(json cfg, const RunRequest& request) {
  const std::string events_path = resolve_input_path(cfg, "events", "event file");
  RunRecorder recorder("ingest", cfg, resolve_workers(request.workers));
  note_config_input(recorder, request);

  const std::string bytes = read_text_file(events_path);
  recorder.note_input(events_path, bytes);
  const EventLog log = parse_events(bytes);

  TimeRange range = log.timepoint_range;
  if (!cfg.at("from").is_null()) range.lo = as_int(cfg, "from");
  if (!cfg.at("to").is_null()) range.hi = as_int(cfg, "to");

  const FrequencyTable table = build_frequency_table(log, range);
  EmpiricalParams params;
  params.population_size = estimate_population_size(log, range);
  params.innovation_rate = estimate_innovation_rate(table);

  recorder.write_output("freq_table.csv", table_to_csv(table));
  recorder.write_output("freq_table.json", table_to_json_text(table));

  json params_json;
  params_json["schema_version"] = 1;
  params_json["population_size"] = params.population_size;
  params_json["innovation_rate"] = params.innovation_rate;
  params_json["timepoint_range"] = json::array({range.lo, range.hi});
  params_json["n_timepoints"] = table.n_timepoints();
  params_json["n_variants"] = table.n_variants();
  recorder.write_output("params.json", params_json.dump(2) + "\n");
  recorder.finish();

  std::cout << "ingested " << log.events.size() << " events over timepoints [" << range.lo << ", "
            << range.hi << "]: " << table.n_variants() << " variants, N = "
            << params.population_size << ", mu = " << fmt4(params.innovation_rate) << "\n"
            << "outputs in " << recorder.out_dir() << "\n";
}

// ---------------------------------------------------------------------------
// simulate

void run_simulate(json cfg, const RunRequest& request) {
  RunRecorder recorder("simulate", cfg, resolve_workers(request.workers));
  note_config_input(recorder, request);

  SimulationConfig sim = sim_template_from(cfg, as_int(cfg, "record_steps"));
  sim.bias = as_double(cfg, "bias");
  sim.seed = stage_seed(as_u64(cfg, "seed"), "simulate");
  const SimulationOutput output = run_simulation(sim);

  recorder.write_output("freq_table.csv", table_to_csv(output.table));

  json sim_json;
  sim_json["schema_version"] = 1;
  sim_json["population_size"] = sim.population_size;
  sim_json["innovation_rate"] = sim.innovation_rate;
  sim_json["bias"] = sim.bias;
  sim_json["warmup_steps"] = sim.warmup_steps;
  sim_json["record_steps"] = sim.record_steps;
  sim_json["run_seed"] = sim.seed;
  sim_json["n_variants"] = output.table.n_variants();
  sim_json["total_variants_created"] = output.total_variants_created;
  recorder.write_output("sim.json", sim_json.dump(2) + "\n");
  recorder.finish();

  std::cout << "simulated " << sim.record_steps << " timepoints at b = " << fmt4(sim.bias) << ": "
            << output.table.n_variants() << " recorded variants ("
            << output.total_variants_created << " ever minted)\n"
            << "outputs in " << recorder.out_dir() << "\n";
}

// ---------------------------------------------------------------------------
// turnover

void run_turnover(json cfg, const RunRequest& request) {
  resolve_input_path(cfg, "table", "frequency table");
  RunRecorder recorder("turnover", cfg, resolve_workers(request.workers));
  note_config_input(recorder, request);

  const LoadedTable observed = load_observed(recorder, cfg);
  const SummaryStats& stats = observed.stats;

  recorder.write_output("turnover_profile.csv", turnover_csv(stats.mean_turnover_by_size));

  std::string diversity = "timepoint,simpson_d\n";
  for (std::size_t t = 0; t < observed.table.n_timepoints(); ++t) {
    diversity += std::to_string(observed.table.timepoints[t]) + "," +
                 format_double(stats.diversity_by_timepoint[t]) + "\n";
  }
  recorder.write_output("diversity.csv", diversity);

  const TurnoverProfile profile = fit_turnover_profile(stats.mean_turnover_by_size);
  json fit_json;
  fit_json["schema_version"] = 1;
  fit_json["coefficient"] = profile.coefficient;
  fit_json["exponent"] = stats.exponent_x;
  fit_json["y_max"] = observed.y_max;
  fit_json["n_timepoints"] = observed.table.n_timepoints();
  fit_json["mean_diversity"] = stats.mean_diversity;
  recorder.write_output("turnover_fit.json", fit_json.dump(2) + "\n");

  const int neutral_reps = as_int(cfg, "neutral_reps");
  if (neutral_reps > 0) {
    SimulationConfig base =
        sim_template_from(cfg, static_cast<int>(observed.table.n_timepoints()));
    base.bias = 0;
    const std::uint64_t stage = stage_seed(as_u64(cfg, "seed"), "turnover.baseline");
    std::vector<SummaryStats> reps(neutral_reps);
    parallel_for(static_cast<std::size_t>(neutral_reps), request.workers, [&](std::size_t i) {
      SimulationConfig sim = base;
      sim.seed = derive_seed(stage, i);
      reps[i] = summarize(run_simulation(sim).table, observed.y_max, base.record_steps);
    });

    std::vector<double> neutral_mean(observed.y_max, 0.0);
    double exponent_mean = 0;
    for (const SummaryStats& rep : reps) {
      for (int y = 0; y < observed.y_max; ++y) neutral_mean[y] += rep.mean_turnover_by_size[y];
      exponent_mean += rep.exponent_x;
    }
    for (double& value : neutral_mean) value /= neutral_reps;
    exponent_mean /= neutral_reps;
    double exponent_var = 0;
    for (const SummaryStats& rep : reps) {
      const double diff = rep.exponent_x - exponent_mean;
      exponent_var += diff * diff;
    }
    const double exponent_sd =
        neutral_reps > 1 ? std::sqrt(exponent_var / (neutral_reps - 1)) : 0.0;

    recorder.write_output("neutral_profile.csv", turnover_csv(neutral_mean));

    const KsResult ks = ks_two_sample(stats.mean_turnover_by_size, neutral_mean);
    json ks_json;
    ks_json["schema_version"] = 1;
    ks_json["statistic"] = ks.statistic;
    ks_json["p_value"] = ks.p_value;
    ks_json["neutral_reps"] = neutral_reps;
    ks_json["observed_exponent"] = stats.exponent_x;
    ks_json["neutral_exponent_mean"] = exponent_mean;
    ks_json["neutral_exponent_sd"] = exponent_sd;
    recorder.write_output("ks_report.json", ks_json.dump(2) + "\n");
    recorder.finish();

    std::cout << "fitted exponent x = " << fmt4(stats.exponent_x) << " (neutral baseline "
              << fmt4(exponent_mean) << " +/- " << fmt4(exponent_sd) << " over " << neutral_reps
              << " reps); KS statistic " << fmt4(ks.statistic) << ", p = " << fmt4(ks.p_value)
              << "\n"
              << "outputs in " << recorder.out_dir() << "\n";
    return;
  }

  recorder.finish();
  std::cout << "fitted z_y = " << fmt4(profile.coefficient) << " * y^" << fmt4(stats.exponent_x)
            << ", mean Simpson diversity " << fmt4(stats.mean_diversity) << "\n"
            << "outputs in " << recorder.out_dir() << "\n";
}

// ---------------------------------------------------------------------------
// warmup

void run_warmup(json cfg, const RunRequest& request) {
  RunRecorder recorder("warmup", cfg, resolve_workers(request.workers));
  note_config_input(recorder, request);

  const int horizon = as_int(cfg, "horizon");
  const int reps = as_int(cfg, "reps");
  const WarmupCurve curve =
      estimate_warmup(as_double(cfg, "innovation_rate"), as_int(cfg, "population_size"), horizon,
                      reps, stage_seed(as_u64(cfg, "seed"), "warmup"), request.workers);

  std::string curve_csv = "step,mean_diversity\n";
  for (std::size_t step = 0; step < curve.mean_diversity.size(); ++step) {
    curve_csv += std::to_string(step + 1) + "," + format_double(curve.mean_diversity[step]) + "\n";
  }
  recorder.write_output("warmup_curve.csv", curve_csv);

  json warmup_json;
  warmup_json["schema_version"] = 1;
  warmup_json["population_size"] = as_int(cfg, "population_size");
  warmup_json["innovation_rate"] = as_double(cfg, "innovation_rate");
  warmup_json["horizon"] = horizon;
  warmup_json["iterations"] = reps;
  warmup_json["plateau_step"] = curve.plateau_step;
  warmup_json["final_diversity"] = curve.mean_diversity.back();
  recorder.write_output("warmup.json", warmup_json.dump(2) + "\n");
  recorder.finish();

  std::cout << "mean diversity plateaus from step " << curve.plateau_step << " (final D = "
            << fmt4(curve.mean_diversity.back()) << " over " << reps << " neutral runs)\n"
            << "outputs in " << recorder.out_dir() << "\n";
}

// ---------------------------------------------------------------------------
// infer

void run_infer(json cfg, const RunRequest& request) {
  resolve_input_path(cfg, "table", "frequency table");
  RunRecorder recorder("infer", cfg, resolve_workers(request.workers));
  note_config_input(recorder, request);

  const LoadedTable loaded = load_observed(recorder, cfg);
  const ObservedStats observed{loaded.stats.exponent_x, loaded.stats.mean_diversity};

  RejectionConfig rejection;
  rejection.iterations = as_int(cfg, "iterations");
  rejection.tolerance = as_double(cfg, "tolerance");
  rejection.prior_low = as_double(cfg, "prior_low");
  rejection.prior_high = as_double(cfg, "prior_high");
  rejection.validate();

  const std::uint64_t master = as_u64(cfg, "seed");
  const SimulationConfig base =
      sim_template_from(cfg, static_cast<int>(loaded.table.n_timepoints()));
  const std::vector<ReferenceRow> reference = generate_reference(
      rejection, base, loaded.y_max, stage_seed(master, "infer.reference"), request.workers);
  if (as_bool(cfg, "save_reference")) {
    recorder.write_output("reference.csv", reference_to_csv(reference));
  }

  const Posterior posterior = rejection_abc(observed, reference, rejection.tolerance);

  std::string accepted = "b\n";
  for (const double b : posterior.accepted_b) accepted += format_double(b) + "\n";
  recorder.write_output("accepted_b.csv", accepted);

  json posterior_json;
  posterior_json["schema_version"] = 1;
  posterior_json["median"] = posterior.median;
  posterior_json["hdpi_low"] = posterior.hdpi_low;
  posterior_json["hdpi_high"] = posterior.hdpi_high;
  posterior_json["hdpi_mass"] = 0.95;
  posterior_json["n_accepted"] = posterior.accepted_b.size();
  posterior_json["iterations"] = rejection.iterations;
  posterior_json["tolerance"] = rejection.tolerance;
  posterior_json["prior_low"] = rejection.prior_low;
  posterior_json["prior_high"] = rejection.prior_high;
  posterior_json["observed"] = json{{"x", observed.x}, {"mean_D", observed.mean_D}};
  recorder.write_output("posterior.json", posterior_json.dump(2) + "\n");

  std::string gof_line;
  const int gof_pseudo = as_int(cfg, "gof_pseudo");
  if (gof_pseudo > 0) {
    const double p = goodness_of_fit(observed, reference, rejection.tolerance, gof_pseudo,
                                     stage_seed(master, "infer.gof"));
    json gof_json;
    gof_json["schema_version"] = 1;
    gof_json["p_value"] = p;
    gof_json["n_pseudo"] = gof_pseudo;
    gof_json["tolerance"] = rejection.tolerance;
    recorder.write_output("gof.json", gof_json.dump(2) + "\n");
    gof_line = "goodness of fit: p = " + fmt4(p) + " (" + std::to_string(gof_pseudo) +
               " pseudo-observed draws)\n";
  }

  std::string cv_line;
  const int cv_folds = as_int(cfg, "cv_folds");
  if (cv_folds > 0) {
    const std::vector<double> tolerances = as_double_array(cfg, "cv_tolerances");
    const std::vector<double> errors =
        cross_validate(reference, tolerances, cv_folds, stage_seed(master, "infer.cv"));
    json cv_json;
    cv_json["schema_version"] = 1;
    cv_json["n_folds"] = cv_folds;
    cv_json["tolerances"] = tolerances;
    cv_json["errors"] = errors;
    recorder.write_output("cv.json", cv_json.dump(2) + "\n");
    cv_line = "cross-validation errors:";
    for (std::size_t i = 0; i < tolerances.size(); ++i) {
      cv_line += std::string(i == 0 ? " " : ", ") + fmt4(errors[i]) + " at eps " +
                 fmt4(tolerances[i]);
    }
    cv_line += "\n";
  }
  recorder.finish();

  std::cout << "posterior median b = " << fmt4(posterior.median) << ", 95% HDPI ["
            << fmt4(posterior.hdpi_low) << ", " << fmt4(posterior.hdpi_high) << "] ("
            << posterior.accepted_b.size() << " of " << rejection.iterations
            << " iterations accepted)\n"
            << gof_line << cv_line << "outputs in " << recorder.out_dir() << "\n";
}

// ---------------------------------------------------------------------------
// choose

void run_choose(json cfg, const RunRequest& request) {
  resolve_input_path(cfg, "table", "frequency table");
  RunRecorder recorder("choose", cfg, resolve_workers(request.workers));
  note_config_input(recorder, request);

  const LoadedTable loaded = load_observed(recorder, cfg);
  const std::uint64_t master = as_u64(cfg, "seed");
  const SimulationConfig base =
      sim_template_from(cfg, static_cast<int>(loaded.table.n_timepoints()));

  const int per_model = as_int(cfg, "per_model");
  const ReferenceTable table =
      build_reference_table(per_model, base, loaded.y_max, as_double(cfg, "bias_bound"),
                            stage_seed(master, "choose.reference"), request.workers);

  ForestConfig forest_config;
  forest_config.n_trees = as_int(cfg, "trees");
  forest_config.bootstrap_rows = as_i64(cfg, "bootstrap_rows");
  forest_config.mtry = as_int(cfg, "mtry");
  forest_config.min_node_size = as_int(cfg, "min_node_size");
  forest_config.seed = stage_seed(master, "choose.forest");
  forest_config.workers = request.workers;
  const Forest forest = grow_forest(table, forest_config);

  const std::vector<double> observed = observed_features(loaded.stats, table.lda);
  ModelChoiceResult result = classify_observed(forest, observed);
  const std::vector<double> oob_curve = oob_error_curve(forest, table);
  result.oob_error = oob_curve.back();
  result.posterior_probability = posterior_probability(forest, table, observed, request.workers);
  const auto importance = gini_importance(forest);

  const auto [observed_ld1, observed_ld2] = table.lda.project(loaded.stats.flatten());

  json choice;
  choice["schema_version"] = 1;
  choice["selected"] = model_name(result.selected);
  choice["tie"] = result.tie;
  json votes;
  for (int m = 0; m < kNumModels; ++m) {
    votes[model_name(static_cast<Model>(m))] = result.votes[m];
  }
  choice["votes"] = votes;
  choice["n_trees"] = forest.trees.size();
  choice["posterior_probability"] = result.posterior_probability;
  choice["oob_error"] = result.oob_error;
  choice["per_model"] = per_model;
  choice["observed"] = json{{"x", loaded.stats.exponent_x},
                            {"mean_D", loaded.stats.mean_diversity},
                            {"ld1", observed_ld1},
                            {"ld2", observed_ld2}};
  recorder.write_output("choice.json", choice.dump(2) + "\n");

  std::string importance_csv = "feature,importance\n";
  for (const auto& [index, value] : importance) {
    importance_csv += table.feature_names[index] + "," + format_double(value) + "\n";
  }
  recorder.write_output("importance.csv", importance_csv);

  std::string oob_csv = "trees,oob_error\n";
  for (std::size_t k = 0; k < oob_curve.size(); ++k) {
    oob_csv += std::to_string(k + 1) + "," + format_double(oob_curve[k]) + "\n";
  }
  recorder.write_output("oob_curve.csv", oob_csv);

  // LDA plane of the reference plus the observed point; the two projected
  // coordinates are the last two feature columns of every row.
  std::string lda_csv = "label,b,ld1,ld2\n";
  const std::size_t n_features = table.n_features();
  for (std::size_t i = 0; i < table.n_rows(); ++i) {
    lda_csv += std::string(model_name(table.labels[i])) + "," + format_double(table.b_values[i]) +
               "," + format_double(table.features[i][n_features - 2]) + "," +
               format_double(table.features[i][n_features - 1]) + "\n";
  }
  lda_csv += "observed,," + format_double(observed_ld1) + "," + format_double(observed_ld2) + "\n";
  recorder.write_output("lda_projection.csv", lda_csv);

  if (as_bool(cfg, "save_reference")) {
    recorder.write_output("reference_table.csv", reference_table_to_csv(table));
    json schema;
    schema["schema_version"] = 1;
    schema["feature_names"] = table.feature_names;
    recorder.write_output("reference_schema.json", schema.dump(2) + "\n");
  }
  if (as_bool(cfg, "save_forest")) {
    recorder.write_output("forest.json", forest_to_json(forest));
    recorder.write_output("lda.json", lda_to_json(table.lda));
  }
  recorder.finish();

  std::cout << "selected " << model_name(result.selected) << (result.tie ? " (tie)" : "")
            << ": votes";
  for (int m = 0; m < kNumModels; ++m) {
    std::cout << (m == 0 ? " " : " / ") << result.votes[m];
  }
  std::cout << " of " << forest.trees.size() << " trees, posterior probability "
            << fmt4(result.posterior_probability) << ", OOB error " << fmt4(result.oob_error)
            << "\n"
            << "outputs in " << recorder.out_dir() << "\n";
}

}  // namespace

void run_command(const RunRequest& request) {
  json cfg = request.cfg;
  cfg["out_dir"] = absolute_path(cfg.at("out_dir").get<std::string>());
  if (request.command == "ingest") {
    run_ingest(std::move(cfg), request);
  } else if (request.command == "simulate") {
    run_simulate(std::move(cfg), request);
  } else if (request.command == "turnover") {
    run_turnover(std::move(cfg), request);
  } else if (request.command == "warmup") {
    run_warmup(std::move(cfg), request);
  } else if (request.command == "infer") {
    run_infer(std::move(cfg), request);
  } else if (request.command == "choose") {
    run_choose(std::move(cfg), request);
  } else {
    throw std::logic_error("run_command: unknown command '" + request.command + "'");
  }
}

}  // namespace freqbias::cli

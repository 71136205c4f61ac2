// Acceptance gate for the whole pipeline: nine numbered end-to-end
// criteria, each printing exactly one [PASS] / [FAIL] / [SKIP] line.
//
//   acceptance [--only 1,4,7] [--workers N] [--observed table.csv]
//
// Criterion 9 needs a real observed frequency table; it is skipped
// unless --observed (or FREQBIAS_OBSERVED_TABLE) supplies one.  The
// others are fully self-contained and seeded, so every run reproduces
// the same numbers.  Exit code 0 iff nothing failed.

#include <sys/wait.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "freqbias/abc.hpp"
#include "freqbias/errors.hpp"
#include "freqbias/rf.hpp"
#include "freqbias/rng.hpp"
#include "freqbias/simulator.hpp"
#include "freqbias/stats.hpp"

using namespace freqbias;
namespace fs = std::filesystem;

namespace {

int g_workers = 1;
std::string g_observed_path;

/// The desk-scale simulation every criterion shares: the empirical N and
/// mu, a warm-up past the diversity plateau, and 32 recorded steps.
SimulationConfig base_sim() {
  SimulationConfig config;
  config.population_size = 729;
  config.innovation_rate = 0.037;
  config.warmup_steps = 200;
  config.record_steps = 32;
  return config;
}

constexpr int kYMax = 142;
constexpr std::uint64_t kMaster = 42;

double elapsed_s(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

/// One-sample Kolmogorov test against Uniform(0,1), independent of the
/// library's two-sample version.
double ks_uniform_p(std::vector<double> p) {
  std::sort(p.begin(), p.end());
  const double n = static_cast<double>(p.size());
  double d = 0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    d = std::max(d, std::max((static_cast<double>(i) + 1) / n - p[i],
                             p[i] - static_cast<double>(i) / n));
  }
  const double t = std::sqrt(n) * d;
  if (t < 0.1) return 1.0;
  double sum = 0;
  for (int k = 1; k <= 200; ++k) {
    const double term = std::exp(-2.0 * k * k * t * t);
    sum += (k % 2 == 1 ? 2.0 : -2.0) * term;
    if (term < 1e-12) break;
  }
  return std::clamp(sum, 0.0, 1.0);
}

SummaryStats simulate_and_summarize(const SimulationConfig& config) {
  return summarize(run_simulation(config).table, kYMax, config.record_steps);
}

// ---------------------------------------------------------------------------
// 1. Neutral exponent: the fitted x of unbiased runs sits near 0.86.

bool criterion_1() {
  const auto start = std::chrono::steady_clock::now();
  const std::uint64_t stage = stage_seed(kMaster, "acceptance.c1");
  double sum_x = 0;
  for (int i = 0; i < 100; ++i) {
    SimulationConfig config = base_sim();
    config.seed = derive_seed(stage, i);
    sum_x += simulate_and_summarize(config).exponent_x;
  }
  const double mean_x = sum_x / 100.0;
  const double seconds = elapsed_s(start);
  const bool pass = mean_x >= 0.7 && mean_x <= 1.0 && seconds < 600;
  std::printf("[%s] criterion 1: neutral mean x = %.4f, want [0.7, 1.0] (100 runs, %.1f s, "
              "budget 600)\n",
              pass ? "PASS" : "FAIL", mean_x, seconds);
  return pass;
}

// ---------------------------------------------------------------------------
// 2. Bias ordering: x falls and mean diversity rises as b increases.

bool criterion_2() {
  const auto start = std::chrono::steady_clock::now();
  const std::uint64_t stage = stage_seed(kMaster, "acceptance.c2");
  const double biases[3] = {-0.1, 0.0, 0.1};
  double mean_x[3] = {0, 0, 0};
  double mean_d[3] = {0, 0, 0};
  for (int bi = 0; bi < 3; ++bi) {
    for (int rep = 0; rep < 100; ++rep) {
      SimulationConfig config = base_sim();
      config.bias = biases[bi];
      config.seed = derive_seed(stage, static_cast<std::uint64_t>(bi) * 100 + rep);
      const SummaryStats stats = simulate_and_summarize(config);
      mean_x[bi] += stats.exponent_x / 100.0;
      mean_d[bi] += stats.mean_diversity / 100.0;
    }
  }
  const bool x_falls = mean_x[0] > mean_x[1] && mean_x[1] > mean_x[2];
  const bool d_rises = mean_d[0] < mean_d[1] && mean_d[1] < mean_d[2];
  const bool pass = x_falls && d_rises;
  std::printf("[%s] criterion 2: x %.3f > %.3f > %.3f and D %.3f < %.3f < %.3f over b = "
              "{-0.1, 0, +0.1} (%.0f s)\n",
              pass ? "PASS" : "FAIL", mean_x[0], mean_x[1], mean_x[2], mean_d[0], mean_d[1],
              mean_d[2], elapsed_s(start));
  return pass;
}

// ---------------------------------------------------------------------------
// 3. Parameter recovery: the 95% HDPI catches b = -0.05.

bool criterion_3() {
  const auto start = std::chrono::steady_clock::now();
  const double true_b = -0.05;
  const std::uint64_t obs_stage = stage_seed(kMaster, "acceptance.c3.observed");
  const std::uint64_t ref_stage = stage_seed(kMaster, "acceptance.c3.reference");
  RejectionConfig rc;
  rc.iterations = 10000;
  rc.tolerance = 0.01;
  rc.prior_low = -0.2;
  rc.prior_high = 0.2;

  int hits = 0;
  for (int rep = 0; rep < 20; ++rep) {
    SimulationConfig obs_sim = base_sim();
    obs_sim.bias = true_b;
    obs_sim.seed = derive_seed(obs_stage, rep);
    const SummaryStats obs = simulate_and_summarize(obs_sim);
    const auto reference =
        generate_reference(rc, base_sim(), kYMax, derive_seed(ref_stage, rep), g_workers);
    const Posterior post =
        rejection_abc({obs.exponent_x, obs.mean_diversity}, reference, rc.tolerance);
    hits += post.hdpi_low <= true_b && true_b <= post.hdpi_high ? 1 : 0;
  }
  const double seconds = elapsed_s(start);
  const bool pass = hits >= 18 && seconds < 1800;
  std::printf("[%s] criterion 3: HDPI contains -0.05 in %d/20 repetitions, want >= 18 "
              "(%.0f s, budget 1800)\n",
              pass ? "PASS" : "FAIL", hits, seconds);
  return pass;
}

// ---------------------------------------------------------------------------
// 4. Goodness-of-fit calibration: pseudo-observed p-values are uniform.

bool criterion_4() {
  const auto start = std::chrono::steady_clock::now();
  const int R = 2000;
  const int n_obs = 200;
  RejectionConfig rc;
  rc.iterations = R + n_obs;
  rc.tolerance = 0.01;
  rc.prior_low = -0.2;
  rc.prior_high = 0.2;
  const auto rows = generate_reference(rc, base_sim(), kYMax,
                                       stage_seed(kMaster, "acceptance.c4.reference"),
                                       g_workers);
  const std::vector<ReferenceRow> reference(rows.begin(), rows.begin() + R);
  const std::uint64_t gof_stage = stage_seed(kMaster, "acceptance.c4.gof");
  std::vector<double> pvals(n_obs);
  for (int j = 0; j < n_obs; ++j) {
    const ReferenceRow& obs = rows[static_cast<std::size_t>(R + j)];
    pvals[static_cast<std::size_t>(j)] = goodness_of_fit(
        {obs.x, obs.mean_D}, reference, rc.tolerance, 400, derive_seed(gof_stage, j));
  }
  const double p = ks_uniform_p(pvals);
  const bool pass = p >= 0.01;
  std::printf("[%s] criterion 4: KS-vs-uniform p = %.3f over 200 gof p-values, want >= 0.01 "
              "(%.0f s)\n",
              pass ? "PASS" : "FAIL", p, elapsed_s(start));
  return pass;
}

// ---------------------------------------------------------------------------
// 5. Cross-validation monotonicity: error weakly increases with epsilon.

bool criterion_5() {
  const auto start = std::chrono::steady_clock::now();
  const std::vector<double> tolerances{0.005, 0.01, 0.05};
  RejectionConfig rc;
  rc.iterations = 10000;
  rc.tolerance = 0.01;
  rc.prior_low = -0.2;
  rc.prior_high = 0.2;
  int monotone = 0;
  for (int s = 0; s < 5; ++s) {
    const auto reference = generate_reference(
        rc, base_sim(), kYMax,
        derive_seed(stage_seed(kMaster, "acceptance.c5.reference"), s), g_workers);
    const auto errors =
        cross_validate(reference, tolerances, 100,
                       derive_seed(stage_seed(kMaster, "acceptance.c5.cv"), s));
    monotone += errors[0] <= errors[1] && errors[1] <= errors[2] ? 1 : 0;
  }
  const bool pass = monotone >= 4;
  std::printf("[%s] criterion 5: CV error weakly increasing in %d/5 experiments, want >= 4 "
              "(%.0f s)\n",
              pass ? "PASS" : "FAIL", monotone, elapsed_s(start));
  return pass;
}

// ---------------------------------------------------------------------------
// 6. Model choice at desk scale: one forest, forty fresh observations.

bool criterion_6() {
  const auto start = std::chrono::steady_clock::now();
  const ReferenceTable table =
      build_reference_table(5000, base_sim(), kYMax, 0.2,
                            stage_seed(kMaster, "acceptance.c6.reference"), g_workers);
  ForestConfig fc;
  fc.n_trees = 500;
  fc.seed = stage_seed(kMaster, "acceptance.c6.forest");
  fc.workers = g_workers;
  const Forest forest = grow_forest(table, fc);
  const double oob = oob_error_curve(forest, table).back();

  bool votes_ok = true;
  int correct[2] = {0, 0};
  const double target_b[2] = {-0.15, 0.15};
  const Model target_model[2] = {Model::conformity, Model::novelty};
  const char* stage_name[2] = {"acceptance.c6.observed.conformity",
                               "acceptance.c6.observed.novelty"};
  for (int side = 0; side < 2; ++side) {
    const std::uint64_t stage = stage_seed(kMaster, stage_name[side]);
    for (int i = 0; i < 20; ++i) {
      SimulationConfig obs_sim = base_sim();
      obs_sim.bias = target_b[side];
      obs_sim.seed = derive_seed(stage, i);
      const SummaryStats stats = simulate_and_summarize(obs_sim);
      const ModelChoiceResult result =
          classify_observed(forest, observed_features(stats, table.lda));
      votes_ok = votes_ok && result.votes[0] + result.votes[1] + result.votes[2] == 500;
      correct[side] += result.selected == target_model[side] ? 1 : 0;
    }
  }
  const bool pass = oob <= 0.15 && correct[0] >= 18 && correct[1] >= 18 && votes_ok;
  std::printf("[%s] criterion 6: OOB %.3f (want <= 0.15), conformity %d/20, novelty %d/20 "
              "(want >= 18), votes %s sum to 500 (%.0f s)\n",
              pass ? "PASS" : "FAIL", oob, correct[0], correct[1],
              votes_ok ? "always" : "DO NOT", elapsed_s(start));
  return pass;
}

// ---------------------------------------------------------------------------
// 7. Exact unit identities.

bool criterion_7() {
  bool pass = true;

  pass = pass && std::abs(simpson_diversity({7}) - 0.0) <= 1e-12;
  pass = pass && std::abs(simpson_diversity({1, 1, 1, 1}) - 0.75) <= 1e-12;
  pass = pass && std::abs(simpson_diversity({3, 1}) - 0.375) <= 1e-12;

  std::vector<double> profile;
  for (int y = 1; y <= 20; ++y) profile.push_back(2.0 * std::pow(y, 0.86));
  const TurnoverProfile fit = fit_turnover_profile(profile);
  pass = pass && std::abs(fit.coefficient - 2.0) <= 1e-9;
  pass = pass && std::abs(fit.exponent - 0.86) <= 1e-9;

  const KsResult same = ks_two_sample({1, 2, 3}, {1, 2, 3});
  pass = pass && same.statistic == 0.0 && same.p_value == 1.0;
  const KsResult disjoint = ks_two_sample({1, 2, 3}, {7, 8, 9});
  pass = pass && disjoint.statistic == 1.0;

  std::printf("[%s] criterion 7: Simpson to 1e-12, power-law fit to 1e-9, KS trivial cases "
              "exact\n",
              pass ? "PASS" : "FAIL");
  return pass;
}

// ---------------------------------------------------------------------------
// 8. Determinism: every command replayed from its manifest, different
//    worker count, byte-identical data outputs.

int run_cli(const std::string& args) {
  const std::string command = std::string(FREQBIAS_CLI_PATH) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(command.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

bool same_data_outputs(const fs::path& a, const fs::path& b) {
  for (const auto& entry : fs::directory_iterator(a)) {
    const std::string name = entry.path().filename().string();
    if (name == "manifest.json") continue;  // timestamps differ by design
    if (slurp(entry.path()) != slurp(b / name)) return false;
  }
  return true;
}

bool criterion_8() {
  const auto start = std::chrono::steady_clock::now();
  const fs::path root = fs::temp_directory_path() / "freqbias_acceptance_c8";
  fs::remove_all(root);
  fs::create_directories(root);

  // A small event file to drive ingest.
  const fs::path events = root / "events.csv";
  std::ofstream(events) << "timepoint,variant_id,adopter_id\n"
                           "2001,alpha,a1\n2001,alpha,a2\n2001,beta,a3\n"
                           "2002,alpha,a1\n2002,beta,a2\n2002,gamma,a3\n"
                           "2003,beta,a1\n2003,gamma,a2\n2003,gamma,a4\n";

  const std::string sim_params =
      " --population-size 60 --innovation-rate 0.1 --warmup-steps 10";
  const std::string table = (root / "simulate" / "freq_table.csv").string();
  const std::vector<std::pair<std::string, std::string>> commands = {
      {"ingest", "ingest " + events.string()},
      {"simulate", "simulate" + sim_params + " --record-steps 8 --bias -0.1 --seed 21"},
      {"turnover", "turnover " + table + sim_params + " --y-max 15 --neutral-reps 8 --seed 4"},
      {"warmup",
       "warmup --population-size 40 --innovation-rate 0.1 --horizon 20 --reps 8 --seed 2"},
      {"infer", "infer " + table + sim_params +
                    " --y-max 15 --iterations 200 --tolerance 0.1 --gof 100 --cv 5 --seed 5"},
      {"choose", "choose " + table + sim_params +
                     " --y-max 15 --per-model 12 --trees 20 --seed 11"}};

  bool pass = true;
  for (const auto& [name, args] : commands) {
    const fs::path out = root / name;
    const fs::path replay = root / (name + "_replay");
    fs::create_directories(out);
    fs::create_directories(replay);
    if (run_cli(args + " --workers 2 --out-dir " + out.string()) != 0) {
      pass = false;
      break;
    }
    if (run_cli(name + " --config " + (out / "manifest.json").string() +
                " --workers 3 --out-dir " + replay.string()) != 0) {
      pass = false;
      break;
    }
    pass = pass && same_data_outputs(out, replay);
    if (!pass) break;
  }
  std::printf("[%s] criterion 8: manifest replay of all six commands byte-identical at a "
              "different worker count (%.0f s)\n",
              pass ? "PASS" : "FAIL", elapsed_s(start));
  fs::remove_all(root);
  return pass;
}

// ---------------------------------------------------------------------------
// 9. Conditional: the real observed table reproduces the published
//    numbers.  Needs --observed (or FREQBIAS_OBSERVED_TABLE).

bool criterion_9() {
  if (g_observed_path.empty()) {
    std::printf("[SKIP] criterion 9: no observed table supplied "
                "(--observed or FREQBIAS_OBSERVED_TABLE)\n");
    return true;
  }
  const auto start = std::chrono::steady_clock::now();
  const FrequencyTable observed = load_table(g_observed_path);
  SimulationConfig sim = base_sim();
  sim.record_steps = static_cast<int>(observed.n_timepoints());
  const SummaryStats stats = summarize(observed, kYMax, sim.record_steps);

  const bool x_ok = std::abs(stats.exponent_x - 1.13) <= 0.02;

  RejectionConfig rc;
  rc.iterations = 10000;
  rc.tolerance = 0.01;
  rc.prior_low = -0.2;
  rc.prior_high = 0.2;
  const auto reference = generate_reference(
      rc, sim, kYMax, stage_seed(kMaster, "acceptance.c9.reference"), g_workers);
  const Posterior post =
      rejection_abc({stats.exponent_x, stats.mean_diversity}, reference, rc.tolerance);
  const bool median_ok = post.median >= -0.019 && post.median <= -0.002;

  const ReferenceTable table = build_reference_table(
      5000, sim, kYMax, 0.2, stage_seed(kMaster, "acceptance.c9.rf"), g_workers);
  ForestConfig fc;
  fc.n_trees = 500;
  fc.seed = stage_seed(kMaster, "acceptance.c9.forest");
  fc.workers = g_workers;
  const Forest forest = grow_forest(table, fc);
  const std::vector<double> features = observed_features(stats, table.lda);
  const ModelChoiceResult choice = classify_observed(forest, features);
  const double oob = oob_error_curve(forest, table).back();
  const double prob = posterior_probability(forest, table, features, g_workers);
  const bool choice_ok = choice.selected == Model::conformity &&
                         std::abs(prob - 0.89) <= 0.1 && std::abs(oob - 0.046) <= 0.02;

  const bool pass = x_ok && median_ok && choice_ok;
  std::printf("[%s] criterion 9: x = %.3f (1.13±0.02), median = %.4f ([-0.019, -0.002]), "
              "%s with prob %.2f (0.89±0.1), OOB %.3f (0.046±0.02) (%.0f s)\n",
              pass ? "PASS" : "FAIL", stats.exponent_x, post.median,
              model_name(choice.selected), prob, oob, elapsed_s(start));
  return pass;
}

}  // namespace

int main(int argc, char** argv) {
  std::set<int> only;
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--only" && i + 1 < argc) {
      std::stringstream list(argv[++i]);
      std::string item;
      while (std::getline(list, item, ',')) only.insert(std::atoi(item.c_str()));
    } else if (arg == "--workers" && i + 1 < argc) {
      g_workers = std::atoi(argv[++i]);
    } else if (arg == "--observed" && i + 1 < argc) {
      g_observed_path = argv[++i];
    } else {
      std::fprintf(stderr,
                   "usage: acceptance [--only 1,2,...] [--workers N] [--observed TABLE]\n");
      return 2;
    }
  }
  if (g_observed_path.empty()) {
    if (const char* env = std::getenv("FREQBIAS_OBSERVED_TABLE")) g_observed_path = env;
  }

  bool (*criteria[9])() = {criterion_1, criterion_2, criterion_3, criterion_4, criterion_5,
                           criterion_6, criterion_7, criterion_8, criterion_9};
  int failures = 0;
  for (int i = 0; i < 9; ++i) {
    if (!only.empty() && only.count(i + 1) == 0) continue;
    try {
      failures += criteria[i]() ? 0 : 1;
    } catch (const std::exception& e) {
      std::printf("[FAIL] criterion %d: unexpected error: %s\n", i + 1, e.what());
      ++failures;
    }
  }
  if (failures == 0) {
    std::printf("all criteria passed\n");
    return 0;
  }
  std::printf("%d criterion(s) failed\n", failures);
  return 1;
}

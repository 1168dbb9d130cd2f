#pragma once
#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "avgtd/environments.hpp"
#include "avgtd/learners.hpp"
#include "avgtd/solvers.hpp"

namespace avgtd {

struct FeatureSpec {
  std::string kind = "random";  // random | tabular (tabular forces d = n)
  int d = 0;
  double bernoulli_p = 0.5;
  bool include_e_and_wstar = true;
  uint64_t seed = 0;
};

struct AlgorithmSpec {
  std::string name;  // double_chain | single_chain | coupled_sa
  StepSchedule schedule;
};

struct ExperimentConfig {
  int version = 1;
  EnvironmentSpec environment;
  double epsilon = 0.0;  // ergodicity patch; 0 disables
  FeatureSpec features;
  std::vector<AlgorithmSpec> algorithms;
  long T = 0;
  std::vector<uint64_t> seeds;
  std::string sampling = "markov";   // markov | iid | mean_field
  int start_state = 0;
  std::string init_theta = "zero";   // zero | theta_star
  int log_points = 200;
  int mix_horizon = 2000;
  std::string out_dir = "out";
};

ExperimentConfig config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const ExperimentConfig& c);
ExperimentConfig load_config(const std::string& path);
StepSchedule schedule_from_json(const nlohmann::json& j);
nlohmann::json schedule_to_json(const StepSchedule& s);

// Throws ParameterError on configs that cannot run (T < 1, no seeds, ...).
void validate_config(const ExperimentConfig& c);

// ~points geometrically spaced unique integers in [1, T], always ending at T.
std::vector<long> log_grid(long T, int points);

struct BuiltProblem {
  EvalProblem problem;
  SpectralReport spectral;
  double r_w = 1.0;
  double r_theta = 0.0;
  MixingFit mixing;
  double epsilon_applied = 0.0;
};

// Environment generation, optional ergodicity patch, structural validation,
// stationary analysis, features, exact fixed point, spectral diagnostics.
BuiltProblem build_problem(const ExperimentConfig& c);

struct LogRow {
  long t = 0;
  uint64_t seed = 0;
  std::string algorithm;
  double err_param = 0;      // ||theta_t - theta*||
  double err_value = 0;      // ||Phi theta_t - W*||
  double err_mod_const = 0;  // ||(I - e e^T/n)(Phi theta_t - W*)||
  double reward_err = 0;     // |running reward mean - g|
  // Diagnostics (not part of the CSV schema):
  double theta_norm = 0;
  double w_norm = 0;
};

// One seeded trajectory of one algorithm, logged at the given step grid.
std::vector<LogRow> run_single(const BuiltProblem& bp,
                               const AlgorithmSpec& algo,
                               const std::string& sampling, uint64_t seed,
                               long T, const std::vector<long>& grid,
                               int start_state,
                               const std::string& init_theta);

struct RunFailure {
  std::string algorithm;
  uint64_t seed = 0;
  long t = 0;
  std::string message;
};

struct ExperimentResult {
  int runs_completed = 0;
  std::vector<RunFailure> failures;
  std::vector<std::string> csv_files;  // per-run files, relative to out_dir
};

// Full experiment: per-(algorithm, seed) CSV trajectories, per-algorithm
// aggregate CSVs (mean and sample std across seeds), and metadata.json.
// Failed runs are recorded and skipped; the others proceed.
ExperimentResult run_experiment(const ExperimentConfig& c, bool quiet = true);

}  // namespace avgtd

#include "avgtd/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <set>

#include "avgtd/errors.hpp"
#include "avgtd/features.hpp"
#include "avgtd/mdp_io.hpp"
#include "avgtd/sampling.hpp"

namespace avgtd {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

// Stepping failure annotated with the step at which it happened.
struct RunAbort : StructuralError {
  long t;
  RunAbort(long t_, const std::string& what) : StructuralError(what), t(t_) {}
};

std::string fmt17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

bool known_algorithm(const std::string& name) {
  return name == "double_chain" || name == "single_chain" ||
         name == "coupled_sa";
}

}  // namespace

StepSchedule schedule_from_json(const json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  const double rho0 = j.value("rho0", 1.0);
  if (kind == "constant")
    return StepSchedule::constant_rate(j.at("alpha").get<double>(), rho0);
  if (kind == "decaying")
    return StepSchedule::decaying_rate(j.at("a").get<double>(),
                                       j.at("c0").get<double>(),
                                       j.value("xi", 1.0), rho0);
  throw ParameterError("schedule: unknown kind '" + kind + "'");
}

json schedule_to_json(const StepSchedule& s) {
  json j;
  j["rho0"] = s.rho0;
  if (s.kind == StepSchedule::Kind::constant) {
    j["kind"] = "constant";
    j["alpha"] = s.alpha;
  } else {
    j["kind"] = "decaying";
    j["a"] = s.a;
    j["c0"] = s.c0;
    j["xi"] = s.xi;
  }
  return j;
}

ExperimentConfig config_from_json(const json& j) {
  ExperimentConfig c;
  c.version = j.value("version", 1);
  if (c.version != 1) throw ParameterError("config: unsupported version");

  const json& je = j.at("environment");
  const std::string kind = je.at("kind").get<std::string>();
  if (kind == "random_walk") {
    c.environment.kind = EnvironmentSpec::Kind::random_walk;
    c.environment.n = je.at("n").get<int>();
  } else if (kind == "gridworld") {
    c.environment.kind = EnvironmentSpec::Kind::gridworld;
    c.environment.width = je.at("w").get<int>();
    c.environment.height = je.at("h").get<int>();
  } else if (kind == "random_mdp") {
    c.environment.kind = EnvironmentSpec::Kind::random_mdp;
    c.environment.n = je.at("n").get<int>();
    c.environment.sparsity = je.value("sparsity", 0.0);
    c.environment.seed = je.value("seed", uint64_t{0});
  } else if (kind == "file") {
    c.environment.kind = EnvironmentSpec::Kind::file;
    c.environment.path = je.at("path").get<std::string>();
  } else {
    throw ParameterError("config: unknown environment kind '" + kind + "'");
  }

  c.epsilon = j.value("epsilon", 0.0);
  if (j.contains("features")) {
    const json& jf = j.at("features");
    c.features.kind = jf.value("kind", "random");
    c.features.d = jf.value("d", 0);
    c.features.bernoulli_p = jf.value("bernoulli_p", 0.5);
    c.features.include_e_and_wstar = jf.value("include_e_and_wstar", true);
    c.features.seed = jf.value("seed", uint64_t{0});
  } else {
    c.features.kind = "tabular";
  }

  for (const json& ja : j.value("algorithms", json::array())) {
    AlgorithmSpec a;
    a.name = ja.at("name").get<std::string>();
    a.schedule = schedule_from_json(ja.at("schedule"));
    c.algorithms.push_back(std::move(a));
  }

  c.T = j.value("T", long{0});
  c.seeds = j.value("seeds", std::vector<uint64_t>{});
  c.sampling = j.value("sampling", "markov");
  c.start_state = j.value("start_state", 0);
  c.init_theta = j.value("init_theta", "zero");
  c.log_points = j.value("log_points", 200);
  c.mix_horizon = j.value("mix_horizon", 2000);
  c.out_dir = j.value("out", "out");
  return c;
}

json config_to_json(const ExperimentConfig& c) {
  json j;
  j["version"] = c.version;
  json je;
  switch (c.environment.kind) {
    case EnvironmentSpec::Kind::random_walk:
      je = {{"kind", "random_walk"}, {"n", c.environment.n}};
      break;
    case EnvironmentSpec::Kind::gridworld:
      je = {{"kind", "gridworld"},
            {"w", c.environment.width},
            {"h", c.environment.height}};
      break;
    case EnvironmentSpec::Kind::random_mdp:
      je = {{"kind", "random_mdp"},
            {"n", c.environment.n},
            {"sparsity", c.environment.sparsity},
            {"seed", c.environment.seed}};
      break;
    case EnvironmentSpec::Kind::file:
      je = {{"kind", "file"}, {"path", c.environment.path}};
      break;
  }
  j["environment"] = je;
  j["epsilon"] = c.epsilon;
  j["features"] = {{"kind", c.features.kind},
                   {"d", c.features.d},
                   {"bernoulli_p", c.features.bernoulli_p},
                   {"include_e_and_wstar", c.features.include_e_and_wstar},
                   {"seed", c.features.seed}};
  j["algorithms"] = json::array();
  for (const auto& a : c.algorithms)
    j["algorithms"].push_back(
        {{"name", a.name}, {"schedule", schedule_to_json(a.schedule)}});
  j["T"] = c.T;
  j["seeds"] = c.seeds;
  j["sampling"] = c.sampling;
  j["start_state"] = c.start_state;
  j["init_theta"] = c.init_theta;
  j["log_points"] = c.log_points;
  j["mix_horizon"] = c.mix_horizon;
  j["out"] = c.out_dir;
  return j;
}

ExperimentConfig load_config(const std::string& path) {
  return config_from_json(load_json_file(path));
}

void validate_config(const ExperimentConfig& c) {
  if (c.T < 1) throw ParameterError("config: T must be >= 1");
  if (c.seeds.empty()) throw ParameterError("config: seeds must be nonempty");
  if (c.algorithms.empty())
    throw ParameterError("config: algorithms must be nonempty");
  for (const auto& a : c.algorithms)
    if (!known_algorithm(a.name))
      throw ParameterError("config: unknown algorithm '" + a.name + "'");
  if (c.sampling != "markov" && c.sampling != "iid" &&
      c.sampling != "mean_field")
    throw ParameterError("config: sampling must be markov, iid or mean_field");
  if (c.sampling == "mean_field")
    for (const auto& a : c.algorithms)
      if (a.name != "double_chain")
        throw ParameterError("config: mean_field sampling supports only double_chain");
  if (c.init_theta != "zero" && c.init_theta != "theta_star")
    throw ParameterError("config: init_theta must be zero or theta_star");
  if (c.features.kind != "random" && c.features.kind != "tabular")
    throw ParameterError("config: feature kind must be random or tabular");
  if (c.log_points < 2) throw ParameterError("config: log_points must be >= 2");
  if (c.mix_horizon < 1) throw ParameterError("config: mix_horizon must be >= 1");
}

std::vector<long> log_grid(long T, int points) {
  if (T < 1) throw ParameterError("log_grid: T must be >= 1");
  if (points < 1) throw ParameterError("log_grid: points must be >= 1");
  std::set<long> ts;
  const double logT = std::log(static_cast<double>(T));
  for (int i = 0; i < points; ++i) {
    double frac = points == 1 ? 1.0 : static_cast<double>(i) / (points - 1);
    long t = std::llround(std::exp(logT * frac));
    ts.insert(std::clamp(t, long{1}, T));
  }
  ts.insert(T);
  return {ts.begin(), ts.end()};
}

BuiltProblem build_problem(const ExperimentConfig& c) {
  PolicyMarkovChain chain = generate_environment(c.environment);
  double eps_applied = 0.0;
  if (c.epsilon != 0.0) {
    chain = make_ergodic(chain, c.epsilon);
    eps_applied = c.epsilon;
  }
  ValidationReport rep = validate_chain(chain);
  if (!rep.pass())
    throw StructuralError("build_problem: chain failed validation: " +
                          rep.describe());

  StationaryAnalysis analysis;
  analysis.mu = stationary_distribution(chain);
  analysis.mu_min = analysis.mu.minCoeff();
  auto [g, w] = relative_value_function(chain, analysis.mu);
  analysis.g = g;
  analysis.w_star = std::move(w);
  MixingFit mixing = mixing_fit(chain, analysis.mu, c.mix_horizon);
  analysis.mix_C = mixing.C;
  analysis.mix_beta = mixing.beta;

  FeatureMap features =
      c.features.kind == "tabular"
          ? tabular_features(chain.n)
          : generate_features(chain, analysis, c.features.d,
                              c.features.bernoulli_p, c.features.seed,
                              c.features.include_e_and_wstar);

  BuiltProblem bp;
  bp.spectral = spectral_report(features, chain, analysis.mu);
  auto [r_w, r_theta] =
      projection_radii(chain, analysis.mu, features, analysis.mix_C,
                       analysis.mix_beta, bp.spectral.omega);
  bp.r_w = r_w;
  bp.r_theta = r_theta;
  bp.mixing = std::move(mixing);
  bp.epsilon_applied = eps_applied;
  bp.problem = assemble_problem(std::move(chain), std::move(analysis),
                                std::move(features));
  return bp;
}

namespace {

LogRow make_row(const BuiltProblem& bp, const std::string& algo, uint64_t seed,
                long t, const Eigen::VectorXd& theta, double w_norm,
                double reward_err) {
  LogRow row;
  row.t = t;
  row.seed = seed;
  row.algorithm = algo;
  row.err_param = (theta - bp.problem.theta_star).norm();
  Eigen::VectorXd diff = bp.problem.features.phi * theta - bp.problem.analysis.w_star;
  row.err_value = diff.norm();
  Eigen::VectorXd centered = diff.array() - diff.mean();
  row.err_mod_const = centered.norm();
  row.reward_err = reward_err;
  row.theta_norm = theta.norm();
  row.w_norm = w_norm;
  return row;
}

}  // namespace

std::vector<LogRow> run_single(const BuiltProblem& bp,
                               const AlgorithmSpec& algo,
                               const std::string& sampling, uint64_t seed,
                               long T, const std::vector<long>& grid,
                               int start_state,
                               const std::string& init_theta) {
  const EvalProblem& pr = bp.problem;
  const int d = pr.features.d;
  const bool mean_field = sampling == "mean_field";
  if (mean_field && algo.name != "double_chain")
    throw ParameterError("run_single: mean_field supports only double_chain");
  if (!known_algorithm(algo.name))
    throw ParameterError("run_single: unknown algorithm '" + algo.name + "'");

  Eigen::VectorXd theta0 = init_theta == "theta_star"
                               ? pr.theta_star
                               : Eigen::VectorXd::Zero(d);

  DoubleChainState dc{theta0, 0};
  SingleChainState sc{theta0, Eigen::VectorXd::Zero(d), bp.r_theta, bp.r_w, 0};
  CoupledSAState csa{theta0, 0.0, 0};
  RewardEstimator re;

  std::unique_ptr<TrajectorySampler> sampler;
  if (!mean_field) {
    SamplingMode mode;
    if (sampling == "iid")
      mode = SamplingMode::iid;
    else if (algo.name == "double_chain")
      mode = SamplingMode::markov_double;
    else
      mode = SamplingMode::markov_single;
    sampler = std::make_unique<TrajectorySampler>(mode, pr.chain,
                                                  pr.analysis.mu, seed,
                                                  start_state);
  }

  std::vector<LogRow> rows;
  rows.reserve(grid.size());
  size_t gi = 0;
  for (long t = 0; t < T; ++t) {
    auto [alpha, beta] = step_size(algo.schedule, t);
    try {
      if (mean_field) {
        dc.theta += alpha * expected_update_field(pr, dc.theta);
        if (!dc.theta.allFinite())
          throw StructuralError("run_single: mean-field iterate diverged");
        ++dc.t;
      } else {
        Transition tr = sampler->next_transition();
        reward_estimate_update(re, pr.chain.R(tr.s));
        if (algo.name == "double_chain")
          double_chain_step(dc, tr.s, tr.s_next, tr.s_hat, pr.chain.R,
                            pr.features, alpha);
        else if (algo.name == "single_chain")
          single_chain_step(sc, tr.s, tr.s_next, pr.chain.R, pr.features,
                            alpha, beta);
        else
          baseline_coupled_sa_step(csa, tr.s, tr.s_next, pr.chain.R,
                                   pr.features, alpha);
      }
    } catch (const StructuralError& e) {
      throw RunAbort(t, e.what());
    }
    if (gi < grid.size() && t + 1 == grid[gi]) {
      const Eigen::VectorXd& theta = algo.name == "single_chain"
                                         ? sc.theta
                                         : (algo.name == "coupled_sa" ? csa.theta
                                                                      : dc.theta);
      double w_norm = algo.name == "single_chain" ? sc.w.norm() : 0.0;
      double reward_err =
          mean_field ? 0.0 : std::abs(re.estimate - pr.analysis.g);
      rows.push_back(
          make_row(bp, algo.name, seed, t + 1, theta, w_norm, reward_err));
      ++gi;
    }
  }
  return rows;
}

namespace {

void write_run_csv(const fs::path& path, const std::vector<LogRow>& rows) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw StructuralError("cannot write " + path.string());
  f << "t,seed,algorithm,err_param,err_value,err_mod_const,reward_err\n";
  for (const LogRow& r : rows)
    f << r.t << ',' << r.seed << ',' << r.algorithm << ','
      << fmt17(r.err_param) << ',' << fmt17(r.err_value) << ','
      << fmt17(r.err_mod_const) << ',' << fmt17(r.reward_err) << '\n';
}

void write_aggregate_csv(const fs::path& path, const std::string& algo,
                         const std::vector<std::vector<LogRow>>& runs) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw StructuralError("cannot write " + path.string());
  f << "t,algorithm,n_seeds,err_param_mean,err_param_std,err_value_mean,"
       "err_value_std,err_mod_const_mean,err_mod_const_std,reward_err_mean,"
       "reward_err_std\n";
  if (runs.empty()) return;
  const size_t rows = runs[0].size();
  const size_t k = runs.size();
  for (size_t i = 0; i < rows; ++i) {
    double mean[4] = {0, 0, 0, 0}, sq[4] = {0, 0, 0, 0};
    auto value = [](const LogRow& r, int m) {
      switch (m) {
        case 0: return r.err_param;
        case 1: return r.err_value;
        case 2: return r.err_mod_const;
        default: return r.reward_err;
      }
    };
    for (const auto& run : runs)
      for (int m = 0; m < 4; ++m) mean[m] += value(run[i], m);
    for (int m = 0; m < 4; ++m) mean[m] /= static_cast<double>(k);
    for (const auto& run : runs)
      for (int m = 0; m < 4; ++m) {
        double dlt = value(run[i], m) - mean[m];
        sq[m] += dlt * dlt;
      }
    f << runs[0][i].t << ',' << algo << ',' << k;
    for (int m = 0; m < 4; ++m) {
      double sd = k > 1 ? std::sqrt(sq[m] / static_cast<double>(k - 1)) : 0.0;
      f << ',' << fmt17(mean[m]) << ',' << fmt17(sd);
    }
    f << '\n';
  }
}

json spectral_to_json(const SpectralReport& s, double r_w, double r_theta) {
  auto num = [](double x) {
    return std::isfinite(x) ? json(x) : json(nullptr);
  };
  return {{"eta1", num(s.eta1)},    {"eta2", num(s.eta2)},
          {"eta3", num(s.eta3)},    {"eta_prime", num(s.eta_prime)},
          {"omega", num(s.omega)},  {"R_w", num(r_w)},
          {"R_theta", num(r_theta)}};
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& c, bool quiet) {
  validate_config(c);
  BuiltProblem bp = build_problem(c);
  const std::vector<long> grid = log_grid(c.T, c.log_points);

  fs::path out(c.out_dir);
  fs::create_directories(out);

  ExperimentResult result;
  std::vector<std::pair<std::string, std::string>> aggregates;
  for (const AlgorithmSpec& algo : c.algorithms) {
    std::vector<std::vector<LogRow>> completed;
    for (uint64_t seed : c.seeds) {
      try {
        std::vector<LogRow> rows = run_single(bp, algo, c.sampling, seed, c.T,
                                              grid, c.start_state,
                                              c.init_theta);
        std::string name = algo.name + "_seed" + std::to_string(seed) + ".csv";
        write_run_csv(out / name, rows);
        result.csv_files.push_back(name);
        completed.push_back(std::move(rows));
        ++result.runs_completed;
        if (!quiet)
          std::cout << "completed " << algo.name << " seed " << seed << '\n';
      } catch (const RunAbort& e) {
        result.failures.push_back({algo.name, seed, e.t, e.what()});
        if (!quiet)
          std::cout << "failed " << algo.name << " seed " << seed << " at t="
                    << e.t << ": " << e.what() << '\n';
      }
    }
    if (!completed.empty()) {
      std::string name = algo.name + "_aggregate.csv";
      write_aggregate_csv(out / name, algo.name, completed);
      aggregates.emplace_back(algo.name, name);
    }
  }

  json meta;
  meta["version"] = 1;
  meta["config"] = config_to_json(c);
  meta["problem"] = {{"n", bp.problem.chain.n},
                     {"epsilon_applied", bp.epsilon_applied},
                     {"r_max", bp.problem.chain.r_max},
                     {"g", bp.problem.analysis.g},
                     {"mu_min", bp.problem.analysis.mu_min},
                     {"mix_C", bp.problem.analysis.mix_C},
                     {"mix_beta", bp.problem.analysis.mix_beta}};
  meta["spectral"] = spectral_to_json(bp.spectral, bp.r_w, bp.r_theta);
  meta["theta_star"] = std::vector<double>(
      bp.problem.theta_star.data(),
      bp.problem.theta_star.data() + bp.problem.theta_star.size());
  meta["w_star"] = std::vector<double>(
      bp.problem.analysis.w_star.data(),
      bp.problem.analysis.w_star.data() + bp.problem.analysis.w_star.size());
  meta["failures"] = json::array();
  for (const RunFailure& fr : result.failures)
    meta["failures"].push_back({{"algorithm", fr.algorithm},
                                {"seed", fr.seed},
                                {"t", fr.t},
                                {"message", fr.message}});
  meta["csv_files"] = result.csv_files;
  json aggs = json::array();
  for (const auto& [algo, name] : aggregates)
    aggs.push_back({{"algorithm", algo}, {"file", name}});
  meta["aggregate_files"] = aggs;
  write_json_file(meta, (out / "metadata.json").string());
  return result;
}

}  // namespace avgtd

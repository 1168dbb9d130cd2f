// Command-line harness for average-reward TD policy evaluation experiments.
//
// Subcommands:
//   solve      print g, theta_star, w_star for a problem document
//   condition  print the spectral diagnostics and projection radii
//   run        execute an experiment config (CSV trajectories + metadata)
//   sweep      cartesian product of sweep.algorithms x sweep.schedules
//   validate   structural chain checks (irreducible, aperiodic, stochastic)
//
// Exit codes: 0 success, 1 validation/usage error, 2 runtime failure.

#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "avgtd/errors.hpp"
#include "avgtd/experiment.hpp"
#include "avgtd/mdp_io.hpp"

namespace {

using nlohmann::json;

// A document is either a full experiment config or a bare chain document
// (detected by its "P" field); bare chains get tabular features.
avgtd::ExperimentConfig config_from_document(const std::string& path) {
  json j = avgtd::load_json_file(path);
  if (j.contains("P")) {
    avgtd::ExperimentConfig c;
    c.environment.kind = avgtd::EnvironmentSpec::Kind::file;
    c.environment.path = path;
    c.features.kind = "tabular";
    return c;
  }
  return avgtd::config_from_json(j);
}

std::vector<uint64_t> parse_seed_list(const std::string& csv) {
  std::vector<uint64_t> seeds;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    try {
      seeds.push_back(std::stoull(item));
    } catch (const std::exception&) {
      throw avgtd::ParameterError("--seeds: not an integer: '" + item + "'");
    }
  }
  if (seeds.empty()) throw avgtd::ParameterError("--seeds: empty list");
  return seeds;
}

json vector_to_json(const Eigen::VectorXd& v) {
  return std::vector<double>(v.data(), v.data() + v.size());
}

json spectral_json(const avgtd::BuiltProblem& bp) {
  auto num = [](double x) { return std::isfinite(x) ? json(x) : json(nullptr); };
  return {{"eta1", num(bp.spectral.eta1)},
          {"eta2", num(bp.spectral.eta2)},
          {"eta3", num(bp.spectral.eta3)},
          {"eta_prime", num(bp.spectral.eta_prime)},
          {"omega", num(bp.spectral.omega)},
          {"R_w", num(bp.r_w)},
          {"R_theta", num(bp.r_theta)}};
}

int cmd_solve(const std::string& config_path) {
  avgtd::BuiltProblem bp = avgtd::build_problem(config_from_document(config_path));
  json out = {{"g", bp.problem.analysis.g},
              {"theta_star", vector_to_json(bp.problem.theta_star)},
              {"w_star", vector_to_json(bp.problem.analysis.w_star)},
              {"fixed_point_residual", avgtd::projected_bellman_residual(bp.problem)}};
  std::cout << out.dump(2) << '\n';
  return 0;
}

int cmd_condition(const std::string& config_path) {
  avgtd::BuiltProblem bp = avgtd::build_problem(config_from_document(config_path));
  std::cout << spectral_json(bp).dump(2) << '\n';
  return 0;
}

int cmd_validate(const std::string& config_path) {
  json j = avgtd::load_json_file(config_path);
  avgtd::PolicyMarkovChain chain;
  if (j.contains("P")) {
    chain = avgtd::chain_from_json(j);
  } else {
    chain = avgtd::generate_environment(avgtd::config_from_json(j).environment);
  }
  avgtd::ValidationReport rep = avgtd::validate_chain(chain);
  std::cout << rep.describe() << '\n';
  return rep.pass() ? 0 : 1;
}

int cmd_run(const std::string& config_path, const std::string& out_dir,
            const std::string& seeds_csv, bool quiet) {
  avgtd::ExperimentConfig c = avgtd::load_config(config_path);
  if (!out_dir.empty()) c.out_dir = out_dir;
  if (!seeds_csv.empty()) c.seeds = parse_seed_list(seeds_csv);
  avgtd::ExperimentResult res = avgtd::run_experiment(c, quiet);
  if (!quiet)
    std::cout << "runs completed: " << res.runs_completed
              << ", failed: " << res.failures.size() << ", output: " << c.out_dir
              << '\n';
  return res.failures.empty() ? 0 : 2;
}

int cmd_sweep(const std::string& config_path, const std::string& out_dir,
              const std::string& seeds_csv, bool quiet) {
  json j = avgtd::load_json_file(config_path);
  if (!j.contains("sweep"))
    throw avgtd::ParameterError("sweep: config needs a sweep section");
  avgtd::ExperimentConfig base = avgtd::config_from_json(j);
  if (!out_dir.empty()) base.out_dir = out_dir;
  if (!seeds_csv.empty()) base.seeds = parse_seed_list(seeds_csv);

  const json& js = j.at("sweep");
  auto names = js.at("algorithms").get<std::vector<std::string>>();
  const json& schedules = js.at("schedules");
  if (names.empty() || schedules.empty())
    throw avgtd::ParameterError("sweep: algorithms and schedules must be nonempty");

  size_t failed = 0;
  for (const std::string& name : names) {
    for (size_t k = 0; k < schedules.size(); ++k) {
      avgtd::ExperimentConfig c = base;
      c.algorithms = {{name, avgtd::schedule_from_json(schedules[k])}};
      c.out_dir = base.out_dir + "/" + name + "_s" + std::to_string(k);
      avgtd::ExperimentResult res = avgtd::run_experiment(c, quiet);
      failed += res.failures.size();
      if (!quiet)
        std::cout << name << " schedule " << k << ": " << res.runs_completed
                  << " runs, " << res.failures.size() << " failed -> "
                  << c.out_dir << '\n';
    }
  }
  return failed == 0 ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"average-reward TD policy evaluation harness"};
  app.require_subcommand(1);

  std::string config_path, out_dir, seeds_csv;
  bool quiet = false;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "config or chain document (JSON)")
        ->required();
    sub->add_flag("--quiet", quiet, "suppress progress output");
  };
  auto add_run_opts = [&](CLI::App* sub) {
    sub->add_option("--out", out_dir, "output directory (overrides config)");
    sub->add_option("--seeds", seeds_csv, "comma-separated seed list (overrides config)");
  };

  CLI::App* solve = app.add_subcommand("solve", "exact fixed point of a problem");
  add_common(solve);
  CLI::App* condition = app.add_subcommand("condition", "spectral diagnostics");
  add_common(condition);
  CLI::App* run = app.add_subcommand("run", "execute an experiment config");
  add_common(run);
  add_run_opts(run);
  CLI::App* sweep = app.add_subcommand("sweep", "schedule/algorithm product");
  add_common(sweep);
  add_run_opts(sweep);
  CLI::App* validate = app.add_subcommand("validate", "structural chain checks");
  add_common(validate);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*solve) return cmd_solve(config_path);
    if (*condition) return cmd_condition(config_path);
    if (*run) return cmd_run(config_path, out_dir, seeds_csv, quiet);
    if (*sweep) return cmd_sweep(config_path, out_dir, seeds_csv, quiet);
    if (*validate) return cmd_validate(config_path);
  } catch (const avgtd::ParameterError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 1;
}

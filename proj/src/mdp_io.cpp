#include "avgtd/mdp_io.hpp"

#include <fstream>

#include "avgtd/errors.hpp"

namespace avgtd {

nlohmann::json chain_to_json(const PolicyMarkovChain& chain,
                             const std::string& name, double epsilon) {
  nlohmann::json j;
  j["version"] = 1;
  j["n"] = chain.n;
  std::vector<double> p;
  p.reserve(static_cast<size_t>(chain.n) * chain.n);
  for (int i = 0; i < chain.n; ++i)
    for (int k = 0; k < chain.n; ++k) p.push_back(chain.P(i, k));
  j["P"] = p;
  j["R"] = std::vector<double>(chain.R.data(), chain.R.data() + chain.n);
  if (!name.empty()) j["name"] = name;
  if (epsilon > 0.0) j["epsilon"] = epsilon;
  return j;
}

PolicyMarkovChain chain_from_json(const nlohmann::json& j) {
  if (!j.contains("n") || !j.contains("P") || !j.contains("R"))
    throw ParameterError("chain document: required fields n, P, R");
  const int n = j.at("n").get<int>();
  auto p = j.at("P").get<std::vector<double>>();
  auto r = j.at("R").get<std::vector<double>>();
  if (n < 1 || p.size() != static_cast<size_t>(n) * n || r.size() != static_cast<size_t>(n))
    throw ParameterError("chain document: inconsistent dimensions");
  Eigen::MatrixXd P(n, n);
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < n; ++k) P(i, k) = p[static_cast<size_t>(i) * n + k];
  Eigen::VectorXd R = Eigen::Map<Eigen::VectorXd>(r.data(), n);
  return make_chain(std::move(P), std::move(R));
}

nlohmann::json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParameterError("cannot open file: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ParameterError("malformed document " + path + ": " + e.what());
  }
  return j;
}

void write_json_file(const nlohmann::json& j, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw StructuralError("cannot write file: " + path);
  out << j.dump(2) << '\n';
}

PolicyMarkovChain load_chain_json(const std::string& path) {
  return chain_from_json(load_json_file(path));
}

void save_chain_json(const PolicyMarkovChain& chain, const std::string& path,
                     const std::string& name, double epsilon) {
  write_json_file(chain_to_json(chain, name, epsilon), path);
}

}  // namespace avgtd

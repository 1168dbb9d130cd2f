#pragma once
#include <string>

#include <json.hpp>

#include "avgtd/markov_chain.hpp"

namespace avgtd {

// Chain interchange document: {"version":1, "n":..., "P":[row-major],
// "R":[...], "name":..., "epsilon":...} with name/epsilon optional metadata.
nlohmann::json chain_to_json(const PolicyMarkovChain& chain,
                             const std::string& name = "",
                             double epsilon = 0.0);
PolicyMarkovChain chain_from_json(const nlohmann::json& j);

PolicyMarkovChain load_chain_json(const std::string& path);
void save_chain_json(const PolicyMarkovChain& chain, const std::string& path,
                     const std::string& name = "", double epsilon = 0.0);

nlohmann::json load_json_file(const std::string& path);
void write_json_file(const nlohmann::json& j, const std::string& path);

}  // namespace avgtd

#ifndef FTOPT_CONFIG_HPP
#define FTOPT_CONFIG_HPP

#include <stdexcept>
#include <string>

#include <json.hpp>

#include "ftopt/engine.hpp"

namespace ftopt {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// TOML subset -> json: top-level keys, [table] / [[array-of-tables]]
// headers, basic values, arrays and inline tables. Enough for scenario
// files; anything fancier should just be written as JSON.
nlohmann::json toml_to_json(const std::string& text);

// dispatches on extension (.toml) and content
nlohmann::json load_config_file(const std::string& path);

AdmissibleFunction function_from_json(const nlohmann::json& j);
nlohmann::json function_to_json(const AdmissibleFunction& f);

ScenarioConfig parse_scenario(const nlohmann::json& j);

}  // namespace ftopt

#endif

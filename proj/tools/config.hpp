#pragma once

#include <json.hpp>

#include <optional>
#include <set>
#include <stdexcept>
#include <string>

#include "agekin/mc.hpp"
#include "agekin/rates.hpp"
#include "agekin/spatial.hpp"

namespace agekin::cli {

using nlohmann::json;

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Rejects keys outside `allowed` so typos never pass silently.
void require_keys(const json& obj, const std::set<std::string>& allowed,
                  const std::string& where);

AgeRate parse_rate(const json& j, const std::string& where);
InitialCondition parse_initial(const json& j, const std::string& where);
std::vector<AgeWindow> parse_windows(const json& j, const std::string& where);
PositionProfile parse_profile(const json& j, const std::string& where);

/// Two-column (age, rate) CSV, optional header line.
std::pair<std::vector<double>, std::vector<double>> read_two_column_csv(
    const std::string& path);

}  // namespace agekin::cli

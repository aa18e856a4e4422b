#include "config.hpp"

#include <fstream>
#include <limits>
#include <sstream>

namespace agekin::cli {

void require_keys(const json& obj, const std::set<std::string>& allowed,
                  const std::string& where) {
  if (!obj.is_object()) throw ConfigError(where + ": expected an object");
  for (const auto& [key, value] : obj.items()) {
    if (!allowed.count(key))
      throw ConfigError(where + ": unknown key '" + key + "'");
  }
}

std::pair<std::vector<double>, std::vector<double>> read_two_column_csv(
    const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open csv file: " + path);
  std::vector<double> a, b;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream row(line);
    double x, y;
    if (row >> x >> y) {
      a.push_back(x);
      b.push_back(y);
    } else if (a.empty()) {
      continue;  // header line
    } else {
      throw ConfigError("malformed csv row in " + path + ": " + line);
    }
  }
  if (a.size() < 2) throw ConfigError("csv has fewer than 2 rows: " + path);
  return {std::move(a), std::move(b)};
}

AgeRate parse_rate(const json& j, const std::string& where) {
  require_keys(j, {"kind", "value", "slope", "alpha", "weight", "csv",
                   "capacity"}, where);
  if (!j.contains("kind")) throw ConfigError(where + ": missing 'kind'");
  const std::string kind = j.at("kind").get<std::string>();

  AgeRate rate = AgeRate::constant(0.0);
  if (kind == "constant") {
    rate = AgeRate::constant(j.value("value", 0.0));
  } else if (kind == "linear") {
    rate = AgeRate::linear(j.value("slope", 0.0));
  } else if (kind == "gamma_hazard") {
    if (!j.contains("alpha")) throw ConfigError(where + ": missing 'alpha'");
    rate = AgeRate::gamma_hazard(j.at("alpha").get<double>(),
                                 j.value("weight", 1.0));
  } else if (kind == "tabulated") {
    if (!j.contains("csv")) throw ConfigError(where + ": missing 'csv'");
    auto [ages, values] = read_two_column_csv(j.at("csv").get<std::string>());
    rate = AgeRate::tabulated(std::move(ages), std::move(values));
  } else {
    throw ConfigError(where + ": unknown rate kind '" + kind + "'");
  }

  if (j.contains("capacity")) {
    const auto& c = j.at("capacity");
    require_keys(c, {"K", "times", "values"}, where + ".capacity");
    CapacityModifier cap;
    if (c.contains("K")) {
      cap = CapacityModifier::constant(c.at("K").get<double>());
    } else {
      cap.times = c.at("times").get<std::vector<double>>();
      cap.values = c.at("values").get<std::vector<double>>();
    }
    rate = rate.with_capacity(std::move(cap));
  }
  return rate;
}

InitialCondition parse_initial(const json& j, const std::string& where) {
  require_keys(j, {"kind", "count", "rate", "shape", "ages", "csv"}, where);
  InitialCondition init;
  const std::string kind = j.value("kind", "age_zero");
  init.count = j.value("count", std::size_t{1});
  if (kind == "age_zero") {
    init.kind = InitialCondition::Kind::AgeZero;
  } else if (kind == "fixed_ages") {
    init.kind = InitialCondition::Kind::FixedAges;
    init.ages = j.at("ages").get<std::vector<double>>();
  } else if (kind == "exponential") {
    init.kind = InitialCondition::Kind::ExponentialAge;
    init.rate = j.at("rate").get<double>();
  } else if (kind == "gamma") {
    init.kind = InitialCondition::Kind::GammaAge;
    init.shape = j.at("shape").get<double>();
    init.rate = j.at("rate").get<double>();
  } else if (kind == "tabulated_pdf") {
    init.kind = InitialCondition::Kind::TabulatedPdf;
    auto [ages, pdf] = read_two_column_csv(j.at("csv").get<std::string>());
    init.tab_ages = std::move(ages);
    init.tab_pdf = std::move(pdf);
  } else {
    throw ConfigError(where + ": unknown initial kind '" + kind + "'");
  }
  return init;
}

std::vector<AgeWindow> parse_windows(const json& j, const std::string& where) {
  std::vector<AgeWindow> out;
  if (!j.is_array()) throw ConfigError(where + ": expected an array");
  for (const auto& w : j) {
    require_keys(w, {"lo", "hi"}, where);
    AgeWindow win;
    win.lo = w.value("lo", 0.0);
    win.hi = w.contains("hi") ? w.at("hi").get<double>()
                              : std::numeric_limits<double>::infinity();
    out.push_back(win);
  }
  return out;
}

PositionProfile parse_profile(const json& j, const std::string& where) {
  require_keys(j, {"kind", "center", "width", "floor", "q", "values"}, where);
  PositionProfile p;
  const std::string kind = j.value("kind", "uniform");
  if (kind == "uniform") {
    p.kind = PositionProfile::Kind::Uniform;
  } else if (kind == "gaussian") {
    p.kind = PositionProfile::Kind::Gaussian;
    p.center = j.value("center", 0.0);
    p.width = j.value("width", 1.0);
    p.floor = j.value("floor", 0.0);
  } else if (kind == "tabulated") {
    p.kind = PositionProfile::Kind::Tabulated;
    p.tab_q = j.at("q").get<std::vector<double>>();
    p.tab_values = j.at("values").get<std::vector<double>>();
  } else {
    throw ConfigError(where + ": unknown profile kind '" + kind + "'");
  }
  return p;
}

}  // namespace agekin::cli

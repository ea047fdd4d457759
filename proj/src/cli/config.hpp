#ifndef RHQ_CLI_CONFIG_HPP
#define RHQ_CLI_CONFIG_HPP

#include <cstdint>
#include <optional>
#include <string>

#include <json.hpp>

#include "rhq/market.hpp"
#include "rhq/sensitivity.hpp"
#include "rhq/wardrop.hpp"

namespace rhq::cli {

struct SweepSpec {
  std::string variable = "rho";  // one of: rho, e, beta, alpha
  double from = 0.05;
  double to = 0.95;
  std::size_t steps = 50;
};

struct BrSpec {
  double init1 = 0.0;
  double init2 = 0.0;
  int iters = 40;
  std::size_t burn_in = 20;
  double tol = 0.05;
};

struct SimulateSpec {
  std::string kind = "platform";  // platform | coupled | duopoly
  double lambda = 1.0;
  double phi = 1.0;
  double horizon = 1e5;
  double lambda_lo = 0.5;
  double lambda_hi = 1.0;
};

struct EquilibriaSpec {
  double eps = 0.05;
  double beta = 0.001;
  std::size_t grid = 200;
};

/// Everything a subcommand needs, parsed from one JSON config file.
struct ScenarioConfig {
  MarketParams market;
  PriceModel model = PriceModel::quadratic(0.1, 9.0);
  QosMetric metric = QosMetric::Blocking;
  double phi1 = 0.0;
  double phi2 = 0.0;
  SweepSpec sweep;
  BrSpec br;
  SimulateSpec simulate;
  EquilibriaSpec equilibria;
  std::uint64_t seed = 1;
  unsigned threads = 1;
  std::string format = "csv";  // csv | json

  nlohmann::json to_json() const;
  static ScenarioConfig from_json(const nlohmann::json& j);
  static ScenarioConfig load(const std::string& path);

  bool operator==(const ScenarioConfig& other) const {
    return to_json() == other.to_json();
  }
};

}  // namespace rhq::cli

#endif

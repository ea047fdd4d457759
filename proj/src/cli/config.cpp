#include "config.hpp"

#include <fstream>

#include "rhq/errors.hpp"

namespace rhq::cli {

nlohmann::json ScenarioConfig::to_json() const {
  nlohmann::json j;
  j["market"] = market.to_json();
  j["model"] = model.to_json();
  j["metric"] = to_string(metric);
  j["prices"] = {{"phi1", phi1}, {"phi2", phi2}};
  j["sweep"] = {{"variable", sweep.variable},
                {"from", sweep.from},
                {"to", sweep.to},
                {"steps", sweep.steps}};
  j["br"] = {{"init1", br.init1},
             {"init2", br.init2},
             {"iters", br.iters},
             {"burn_in", br.burn_in},
             {"tol", br.tol}};
  j["simulate"] = {{"kind", simulate.kind},
                   {"lambda", simulate.lambda},
                   {"phi", simulate.phi},
                   {"horizon", simulate.horizon},
                   {"lambda_lo", simulate.lambda_lo},
                   {"lambda_hi", simulate.lambda_hi}};
  j["equilibria"] = {{"eps", equilibria.eps},
                     {"beta", equilibria.beta},
                     {"grid", equilibria.grid}};
  j["seed"] = seed;
  j["threads"] = threads;
  j["format"] = format;
  return j;
}

ScenarioConfig ScenarioConfig::from_json(const nlohmann::json& j) {
  ScenarioConfig cfg;
  try {
    cfg.market = MarketParams::from_json(j.at("market"));
    cfg.model = PriceModel::from_json(j.at("model"));
    if (j.contains("metric")) cfg.metric = qos_metric_from_string(j["metric"]);
    if (j.contains("prices")) {
      cfg.phi1 = j["prices"].value("phi1", 0.0);
      cfg.phi2 = j["prices"].value("phi2", 0.0);
    }
    if (j.contains("sweep")) {
      const auto& s = j["sweep"];
      cfg.sweep.variable = s.value("variable", cfg.sweep.variable);
      cfg.sweep.from = s.value("from", cfg.sweep.from);
      cfg.sweep.to = s.value("to", cfg.sweep.to);
      cfg.sweep.steps = s.value("steps", cfg.sweep.steps);
    }
    if (j.contains("br")) {
      const auto& s = j["br"];
      cfg.br.init1 = s.value("init1", cfg.br.init1);
      cfg.br.init2 = s.value("init2", cfg.br.init2);
      cfg.br.iters = s.value("iters", cfg.br.iters);
      cfg.br.burn_in = s.value("burn_in", cfg.br.burn_in);
      cfg.br.tol = s.value("tol", cfg.br.tol);
    }
    if (j.contains("simulate")) {
      const auto& s = j["simulate"];
      cfg.simulate.kind = s.value("kind", cfg.simulate.kind);
      cfg.simulate.lambda = s.value("lambda", cfg.simulate.lambda);
      cfg.simulate.phi = s.value("phi", cfg.simulate.phi);
      cfg.simulate.horizon = s.value("horizon", cfg.simulate.horizon);
      cfg.simulate.lambda_lo = s.value("lambda_lo", cfg.simulate.lambda_lo);
      cfg.simulate.lambda_hi = s.value("lambda_hi", cfg.simulate.lambda_hi);
    }
    if (j.contains("equilibria")) {
      const auto& s = j["equilibria"];
      cfg.equilibria.eps = s.value("eps", cfg.equilibria.eps);
      cfg.equilibria.beta = s.value("beta", cfg.equilibria.beta);
      cfg.equilibria.grid = s.value("grid", cfg.equilibria.grid);
    }
    cfg.seed = j.value("seed", cfg.seed);
    cfg.threads = j.value("threads", cfg.threads);
    cfg.format = j.value("format", cfg.format);
  } catch (const nlohmann::json::exception& ex) {
    throw ConfigError(std::string("bad config: ") + ex.what());
  }
  if (cfg.format != "csv" && cfg.format != "json")
    throw ConfigError("format must be csv or json");
  if (cfg.sweep.steps < 1) throw ConfigError("sweep.steps must be >= 1");
  if (!(cfg.sweep.from > 0.0) && cfg.sweep.variable == "rho")
    throw ConfigError("rho sweep must start above 0");
  return cfg;
}

ScenarioConfig ScenarioConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& ex) {
    throw ConfigError(std::string("config is not valid JSON: ") + ex.what());
  }
  return from_json(j);
}

}  // namespace rhq::cli

#include "commands.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <mutex>
#include <variant>

#include <CLI11.hpp>

#include "rhq/dynamics.hpp"
#include "rhq/equilibria.hpp"
#include "rhq/errors.hpp"
#include "rhq/numeric.hpp"
#include "rhq/queueing.hpp"
#include "rhq/simulate.hpp"

namespace rhq::cli {

namespace {

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

void csv_row(std::ostream& out, const std::vector<std::string>& cells) {
  for (std::size_t i = 0; i < cells.size(); ++i)
    out << cells[i] << (i + 1 < cells.size() ? "," : "\n");
}

nlohmann::json estimate_json(const Estimate& est) {
  return {{"value", est.value}, {"half_width", est.half_width}};
}

nlohmann::json sim_json(const SimEstimates& est) {
  return {{"u", estimate_json(est.u)},
          {"u_time", estimate_json(est.u_time)},
          {"b", estimate_json(est.b)},
          {"revenue_rate", estimate_json(est.revenue)},
          {"n_marginal", est.n_marginal},
          {"events", est.events},
          {"horizon", est.horizon},
          {"transient_warning", est.transient_warning}};
}

nlohmann::json split_json(const WardropSplit& split) {
  return {{"lambda1", split.lambda1},
          {"lambda2", split.lambda2},
          {"gap", split.gap},
          {"boundary", split.boundary}};
}

nlohmann::json cycle_report_json(const CycleReport& rep) {
  nlohmann::json subs = nlohmann::json::array();
  for (const auto& s : rep.subintervals)
    subs.push_back({{"lo", s.lo}, {"hi", s.hi}, {"refuted", s.refuted}});
  return {{"stability", rep.stability},
          {"cyclicity", rep.cyclicity},
          {"minimality", rep.minimality},
          {"subintervals", subs}};
}

struct SweepRow {
  double rho;
  MonopolyResult mono;
  PureNE duo_u;
  double duo_u_payoff;
  double b_lo, b_hi, b_payoff;
  Regime regime;
};

SweepRow sweep_point(const ScenarioConfig& cfg, double rho) {
  MarketParams params = cfg.market;
  params.driver_rate = rho * params.passenger_rate * (1.0 - params.rejoin_prob);
  SweepRow row;
  row.rho = rho;
  row.mono = monopoly_optimal(params, cfg.model);
  row.duo_u = duopoly_u_ne(params, cfg.model);
  row.duo_u_payoff = monopoly_payoff_limit(params, cfg.model, row.duo_u.price);
  const EquilibriumResult eq = duopoly_b_equilibrium(params, cfg.model, cfg.equilibria.eps);
  row.regime = eq.regime;
  if (std::holds_alternative<PureNE>(eq.strategy)) {
    const double price = std::get<PureNE>(eq.strategy).price;
    row.b_lo = row.b_hi = price;
    row.b_payoff = monopoly_payoff_limit(params, cfg.model, price);
  } else if (std::holds_alternative<MixedNE>(eq.strategy)) {
    const auto& mixed = std::get<MixedNE>(eq.strategy);
    row.b_lo = mixed.lo;
    row.b_hi = mixed.hi;
    row.b_payoff = mixed.mean_payoff;
  } else {
    row.b_lo = row.b_hi = 0.0;  // saturated: zero by convention
    row.b_payoff = 0.0;
  }
  return row;
}

}  // namespace

void cmd_we(const ScenarioConfig& cfg, std::ostream& out) {
  const WardropSplit split =
      cfg.market.abandon_rate > 0.0
          ? solve_we(cfg.market, cfg.model, cfg.metric, cfg.phi1, cfg.phi2)
          : we_limit(cfg.market, cfg.model, cfg.metric, cfg.phi1, cfg.phi2);
  const auto payoffs = payoffs_at_we(cfg.market, cfg.model, cfg.metric, cfg.phi1, cfg.phi2);

  if (cfg.format == "json") {
    nlohmann::json j{{"config", cfg.to_json()},
                     {"split", split_json(split)},
                     {"revenue1", payoffs.first},
                     {"revenue2", payoffs.second}};
    out << j.dump(2) << "\n";
    return;
  }
  csv_row(out, {"phi1", "phi2", "lambda1", "lambda2", "gap", "revenue1", "revenue2"});
  csv_row(out, {num(cfg.phi1), num(cfg.phi2), num(split.lambda1), num(split.lambda2),
                num(split.gap), num(payoffs.first), num(payoffs.second)});
}

void cmd_sweep_rho(const ScenarioConfig& cfg, std::ostream& out) {
  if (cfg.sweep.variable != "rho")
    throw ConfigError("sweep-rho expects sweep.variable == \"rho\"");
  const auto rhos = linspace(cfg.sweep.from, cfg.sweep.to, cfg.sweep.steps);
  std::vector<SweepRow> rows(rhos.size());
  parallel_for(rhos.size(), cfg.threads,
               [&](std::size_t i) { rows[i] = sweep_point(cfg, rhos[i]); });

  if (cfg.format == "json") {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& r : rows)
      arr.push_back({{"rho", r.rho},
                     {"monopoly_price", r.mono.price},
                     {"monopoly_payoff", r.mono.payoff},
                     {"duopoly_u_price", r.duo_u.price},
                     {"duopoly_u_payoff", r.duo_u_payoff},
                     {"duopoly_b_lo", r.b_lo},
                     {"duopoly_b_hi", r.b_hi},
                     {"duopoly_b_payoff", r.b_payoff},
                     {"regime", to_string(r.regime)}});
    out << nlohmann::json{{"config", cfg.to_json()}, {"rows", arr}}.dump(2) << "\n";
    return;
  }
  csv_row(out, {"rho", "monopoly_price", "monopoly_payoff", "duopoly_u_price",
                "duopoly_u_payoff", "duopoly_b_lo", "duopoly_b_hi", "duopoly_b_payoff",
                "regime"});
  for (const auto& r : rows)
    csv_row(out, {num(r.rho), num(r.mono.price), num(r.mono.payoff), num(r.duo_u.price),
                  num(r.duo_u_payoff), num(r.b_lo), num(r.b_hi), num(r.b_payoff),
                  to_string(r.regime)});
}

void cmd_br(const ScenarioConfig& cfg, std::ostream& out) {
  const BRTrajectory traj =
      alternating_br(cfg.market, cfg.model, cfg.metric, {cfg.br.init1, cfg.br.init2},
                     cfg.br.iters, cfg.market.abandon_rate, cfg.market.pickup_alpha);
  if (cfg.format == "json") {
    nlohmann::json pts = nlohmann::json::array();
    for (const auto& p : traj.points)
      pts.push_back({{"iter", p.iteration},
                     {"player", p.player},
                     {"price", p.price},
                     {"payoff", p.payoff}});
    const Classification cls = classify_trajectory(traj, cfg.br.burn_in, cfg.br.tol);
    nlohmann::json j{{"config", cfg.to_json()},
                     {"points", pts},
                     {"classification",
                      {{"converged", cls.converged},
                       {"point", cls.point},
                       {"lo", cls.lo},
                       {"hi", cls.hi},
                       {"period", cls.period}}}};
    out << j.dump(2) << "\n";
    return;
  }
  csv_row(out, {"iter", "player", "price", "payoff"});
  for (const auto& p : traj.points)
    csv_row(out, {std::to_string(p.iteration), std::to_string(p.player), num(p.price),
                  num(p.payoff)});
}

void cmd_simulate(const ScenarioConfig& cfg, std::ostream& out) {
  nlohmann::json j{{"config", cfg.to_json()}};
  if (cfg.simulate.kind == "platform") {
    const SimEstimates est =
        simulate_platform(cfg.market, cfg.model, cfg.simulate.lambda, cfg.simulate.phi,
                          cfg.simulate.horizon, cfg.seed);
    if (cfg.format == "csv") {
      // Estimates are JSON-shaped; the csv form carries the histogram.
      csv_row(out, {"n", "probability"});
      for (std::size_t n = 0; n < est.n_marginal.size(); ++n)
        csv_row(out, {std::to_string(n), num(est.n_marginal[n])});
      return;
    }
    j["platform"] = sim_json(est);
  } else if (cfg.simulate.kind == "coupled") {
    const CouplingReport rep =
        simulate_coupled(cfg.market, cfg.model, cfg.simulate.lambda_lo,
                         cfg.simulate.lambda_hi, cfg.simulate.phi, cfg.simulate.horizon,
                         cfg.seed);
    j["coupled"] = {{"events", rep.events},
                    {"violations", rep.violations},
                    {"horizon", rep.horizon},
                    {"lambda_lo", rep.lambda_lo},
                    {"lambda_hi", rep.lambda_hi}};
  } else if (cfg.simulate.kind == "duopoly") {
    const DuopolySimResult res = simulate_duopoly(
        cfg.market, cfg.model, cfg.phi1, cfg.phi2, cfg.metric, cfg.simulate.horizon, cfg.seed);
    j["duopoly"] = {{"platform1", sim_json(res.platform1)},
                    {"platform2", sim_json(res.platform2)},
                    {"split", split_json(res.split)},
                    {"sim_qos_gap", res.sim_qos_gap}};
  } else {
    throw ConfigError("simulate.kind must be platform, coupled or duopoly");
  }
  out << j.dump(2) << "\n";
}

void cmd_stationary(const ScenarioConfig& cfg, std::ostream& out) {
  const std::size_t trunc = std::min<std::size_t>(default_truncation(cfg.market), 400);
  const Matrix pi = joint_stationary(cfg.market, cfg.model, cfg.simulate.lambda,
                                     cfg.simulate.phi, trunc, trunc);
  if (cfg.format == "json") {
    nlohmann::json rows = nlohmann::json::array();
    for (std::size_t n = 0; n < pi.rows(); ++n) {
      nlohmann::json row = nlohmann::json::array();
      for (std::size_t r = 0; r < pi.cols(); ++r) row.push_back(pi(n, r));
      rows.push_back(row);
    }
    out << nlohmann::json{{"config", cfg.to_json()}, {"pi", rows}}.dump(2) << "\n";
    return;
  }
  // Rows are waiting-driver counts, columns riding-driver counts.
  std::vector<std::string> header{"n"};
  for (std::size_t r = 0; r < pi.cols(); ++r) header.push_back("r" + std::to_string(r));
  csv_row(out, header);
  for (std::size_t n = 0; n < pi.rows(); ++n) {
    std::vector<std::string> cells{std::to_string(n)};
    for (std::size_t r = 0; r < pi.cols(); ++r) cells.push_back(num(pi(n, r)));
    csv_row(out, cells);
  }
}

void cmd_equilibria(const ScenarioConfig& cfg, std::ostream& out) {
  nlohmann::json j{{"config", cfg.to_json()}};
  j["thresholds"] = {
      {"phi_m", threshold_root(ThresholdKind::Monopoly, cfg.model)},
      {"phi_b", threshold_root(ThresholdKind::BlockingDuopoly, cfg.model)},
      {"phi_u", threshold_root(ThresholdKind::UnavailabilityDuopoly, cfg.model)}};
  j["duopoly_u"] = {{"price", duopoly_u_ne(cfg.market, cfg.model).price}};

  const EquilibriumResult eq =
      duopoly_b_equilibrium(cfg.market, cfg.model, cfg.equilibria.eps);
  nlohmann::json eq_json{{"regime", to_string(eq.regime)}};
  if (std::holds_alternative<PureNE>(eq.strategy)) {
    const double price = std::get<PureNE>(eq.strategy).price;
    eq_json["type"] = "pure";
    eq_json["price"] = price;
    const EpsReport rep =
        verify_eps_ne(cfg.market, cfg.model, QosMetric::Blocking, Strategy{price},
                      cfg.equilibria.eps, cfg.equilibria.beta, cfg.market.pickup_alpha,
                      std::max<std::size_t>(cfg.equilibria.grid, 200));
    eq_json["eps_ne"] = {{"pass", rep.pass},
                         {"max_gain", rep.max_gain},
                         {"candidate_payoff", rep.candidate_payoff},
                         {"best_deviation", rep.best_deviation}};
  } else if (std::holds_alternative<MixedNE>(eq.strategy)) {
    const auto& mixed = std::get<MixedNE>(eq.strategy);
    eq_json["type"] = "mixed";
    eq_json["support"] = {mixed.lo, mixed.hi};
    eq_json["mean_payoff"] = mixed.mean_payoff;
    eq_json["cycle"] = cycle_report_json(
        verify_ec(cfg.market, cfg.model, {mixed.lo, mixed.hi},
                  std::max<std::size_t>(cfg.equilibria.grid, 50)));
    const auto sec = security_value(cfg.market, cfg.model);
    eq_json["security"] = {{"value", sec.first}, {"strategy", sec.second}};
  } else {
    const auto& eps_ne = std::get<EpsNE>(eq.strategy);
    eq_json["type"] = "eps";
    eq_json["price"] = eps_ne.price;
    eq_json["eps"] = eps_ne.eps;
    eq_json["price_nonunique"] = eps_ne.price_nonunique;
  }
  j["duopoly_b"] = eq_json;
  out << j.dump(2) << "\n";
}

void cmd_compare(const ScenarioConfig& cfg, std::ostream& out) {
  const ComparisonTable table = compare_regimes(cfg.market, cfg.model);
  if (cfg.format == "json") {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& r : table.rows)
      rows.push_back({{"scenario", r.scenario},
                      {"price_lo", r.price_lo},
                      {"price_hi", r.price_hi},
                      {"payoff", r.payoff}});
    nlohmann::json j{{"config", cfg.to_json()},
                     {"rows", rows},
                     {"dominance",
                      {{"price_b_le_monopoly", table.price_b_le_monopoly},
                       {"monopoly_le_price_u", table.monopoly_le_price_u},
                       {"payoff_b_le_monopoly", table.payoff_b_le_monopoly},
                       {"payoff_u_le_monopoly", table.payoff_u_le_monopoly},
                       {"cooperative_matches_monopoly", table.cooperative_matches_monopoly}}}};
    out << j.dump(2) << "\n";
    return;
  }
  csv_row(out, {"scenario", "price_lo", "price_hi", "payoff", "price_b_le_monopoly",
                "monopoly_le_price_u", "payoff_b_le_monopoly", "payoff_u_le_monopoly",
                "cooperative_matches_monopoly"});
  for (const auto& r : table.rows)
    csv_row(out, {r.scenario, num(r.price_lo), num(r.price_hi), num(r.payoff),
                  table.price_b_le_monopoly ? "true" : "false",
                  table.monopoly_le_price_u ? "true" : "false",
                  table.payoff_b_le_monopoly ? "true" : "false",
                  table.payoff_u_le_monopoly ? "true" : "false",
                  table.cooperative_matches_monopoly ? "true" : "false"});
}

void cmd_validate_model(const ScenarioConfig& cfg, std::ostream& out) {
  const ValidationReport rep = cfg.model.validate(1000);
  if (cfg.format == "json") {
    nlohmann::json checks = nlohmann::json::array();
    for (const auto& c : rep.checks)
      checks.push_back({{"name", c.name},
                        {"pass", c.pass},
                        {"violating_phi", c.violating_phi},
                        {"violating_value", c.violating_value}});
    out << nlohmann::json{{"config", cfg.to_json()},
                          {"checks", checks},
                          {"all_pass", rep.all_pass()}}
               .dump(2)
        << "\n";
    return;
  }
  csv_row(out, {"check", "pass", "violating_phi", "violating_value"});
  for (const auto& c : rep.checks)
    csv_row(out, {c.name, c.pass ? "true" : "false", num(c.violating_phi),
                  num(c.violating_value)});
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"pricing-game toolkit for two-sided ride-hailing queues"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_path;
  std::uint64_t seed = 0;
  bool seed_set = false;
  unsigned threads = 0;
  std::string format;

  app.add_option("--config", config_path, "JSON scenario config")->required();
  app.add_option("--out", out_path, "output path (default stdout)");
  app.add_option("--seed", seed, "override config seed")->each([&](const std::string&) {
    seed_set = true;
  });
  app.add_option("--threads", threads, "worker threads for sweeps");
  app.add_option("--format", format, "csv or json")
      ->check(CLI::IsMember({"csv", "json"}));

  const char* names[] = {"we",      "sweep-rho", "br",             "simulate", "equilibria",
                         "compare", "stationary", "validate-model"};
  for (const char* n : names) app.add_subcommand(n)->fallthrough();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& ex) {
    err << ex.what() << "\n";
    return kExitConfig;
  }

  try {
    ScenarioConfig cfg = ScenarioConfig::load(config_path);
    if (seed_set) cfg.seed = seed;
    if (threads > 0) cfg.threads = threads;
    if (!format.empty()) cfg.format = format;
    if (cfg.threads == 0) {
      if (const char* env = std::getenv("RHQ_THREADS")) cfg.threads = std::stoul(env);
      if (cfg.threads == 0) cfg.threads = 1;
    }
    cfg.market.validate();

    std::string target = out_path;
    if (!target.empty() && target.front() != '/') {
      if (const char* dir = std::getenv("RHQ_OUT_DIR"))
        target = std::string(dir) + "/" + target;
    }
    std::ofstream file;
    std::ostream* sink = &out;
    if (!target.empty()) {
      file.open(target);
      if (!file) throw ConfigError("cannot open output path: " + target);
      sink = &file;
    }

    const std::string sub = app.get_subcommands().front()->get_name();
    if (sub == "we")
      cmd_we(cfg, *sink);
    else if (sub == "sweep-rho")
      cmd_sweep_rho(cfg, *sink);
    else if (sub == "br")
      cmd_br(cfg, *sink);
    else if (sub == "simulate")
      cmd_simulate(cfg, *sink);
    else if (sub == "equilibria")
      cmd_equilibria(cfg, *sink);
    else if (sub == "compare")
      cmd_compare(cfg, *sink);
    else if (sub == "stationary")
      cmd_stationary(cfg, *sink);
    else
      cmd_validate_model(cfg, *sink);
    return kExitOk;
  } catch (const ConfigError& ex) {
    err << "config error: " << ex.what() << "\n";
    return kExitConfig;
  } catch (const TruncationError& ex) {
    err << "numerical error: " << ex.what() << "\n";
    return kExitNumerical;
  } catch (const RegimeError& ex) {
    err << "regime error: " << ex.what() << "\n";
    return kExitRegime;
  } catch (const std::domain_error& ex) {
    err << "precondition error: " << ex.what() << "\n";
    return kExitRegime;
  } catch (const NumericalError& ex) {
    err << "numerical error: " << ex.what() << "\n";
    return kExitNumerical;
  }
}

}  // namespace rhq::cli

#ifndef RHQ_CLI_COMMANDS_HPP
#define RHQ_CLI_COMMANDS_HPP

#include <ostream>
#include <string>
#include <vector>

#include "config.hpp"

namespace rhq::cli {

// Exit codes shared by every subcommand.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitRegime = 3;
inline constexpr int kExitNumerical = 4;

void cmd_we(const ScenarioConfig& cfg, std::ostream& out);
void cmd_sweep_rho(const ScenarioConfig& cfg, std::ostream& out);
void cmd_br(const ScenarioConfig& cfg, std::ostream& out);
void cmd_simulate(const ScenarioConfig& cfg, std::ostream& out);
void cmd_equilibria(const ScenarioConfig& cfg, std::ostream& out);
void cmd_compare(const ScenarioConfig& cfg, std::ostream& out);
void cmd_stationary(const ScenarioConfig& cfg, std::ostream& out);
void cmd_validate_model(const ScenarioConfig& cfg, std::ostream& out);

/// Entry point behind main(): parses arguments, loads the config, runs the
/// subcommand, maps exceptions to exit codes.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace rhq::cli

#endif

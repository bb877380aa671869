#pragma once

#include "routh/config.hpp"

#include <optional>
#include <ostream>
#include <string>

namespace routh {

struct CommandOptions {
  std::string config_path;
  std::optional<std::string> output;
  std::optional<double> dt;
  std::optional<double> t_end;
  std::optional<std::string> reduced;  // reconstruct input
  std::optional<std::string> report;   // JSON report path (verify, kolosov)
};

/// Loads the config and applies the command-line overrides.
RunConfig resolve_config(const CommandOptions& opt);

// Each command returns its exit code; library errors propagate as Error.
int cmd_simulate_reduced(const CommandOptions& opt, std::ostream& out);
int cmd_simulate_full(const CommandOptions& opt, std::ostream& out);
int cmd_reconstruct(const CommandOptions& opt, std::ostream& out);
int cmd_verify(const CommandOptions& opt, std::ostream& out);
int cmd_kolosov(const CommandOptions& opt, std::ostream& out);

}  // namespace routh

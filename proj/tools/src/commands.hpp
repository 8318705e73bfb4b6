#pragma once

#include <cstdint>
#include <optional>
#include <string>

namespace semidev::tools {

// Exit statuses shared by the commands: 0 success, 1 failed verification
// check, 2 config/input validation failure, 3 numeric failure.

struct CommonFlags {
  std::optional<std::string> out;
  std::optional<std::uint64_t> seed;
  std::optional<std::uint64_t> replications;
};

int cmd_run(const std::string& config_path, const CommonFlags& flags);

int cmd_verify_smoothing(const std::optional<std::string>& config_path,
                         const CommonFlags& flags);

int cmd_fit_rate(const std::string& csv_path, const std::string& column,
                 double window_fraction);

int cmd_sweep_dimension(const std::string& config_path, const CommonFlags& flags);

}  // namespace semidev::tools

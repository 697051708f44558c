#pragma once

#include <string>
#include <vector>

#include "wsgeo/runconfig.hpp"

namespace wsgeo {

struct CommandOutcome {
  int exit_code = 0;  // 0 ok, 3 walk did not converge (see README exit-code table)
  bool converged = true;
  std::vector<std::string> artifacts;  // files written, in write order
  int64_t steps = 0;
  int64_t epochs = 0;
  double wall_seconds = 0.0;
};

// Resolves the config, runs the task, writes the resolved manifest and all
// outputs into out_dir. Throws wsgeo::Error on hard failures; walk
// non-convergence is reported through exit_code, with artifacts intact.
CommandOutcome run_command(const RunConfig& raw);

}  // namespace wsgeo

// Command implementations behind the CLI: run a simulation and emit the
// ledger/snapshot/summary artifacts, drive the eps sweep and the MMS order
// study. Exit-code contract: 0 success, 1 run or acceptance-grade failure,
// 2 configuration error.

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "sfilm/config.hpp"
#include "sfilm/study.hpp"

namespace sfilm {

// Shortest round-trip decimal formatting used for every CSV number.
std::string format_double(double v);

int cmd_run(const RunConfig& config, std::ostream& log);
int cmd_sweep(const RunConfig& config, const std::vector<double>& eps_list, int jobs,
              bool strict, std::ostream& log);
int cmd_mms(const RunConfig& config, std::ostream& log);
int cmd_check_config(const std::string& path, std::ostream& log);

}  // namespace sfilm

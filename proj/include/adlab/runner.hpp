#pragma once

// Batch experiment dispatch: run a subcommand against a parsed config and
// emit machine-readable results (CSV with a single header row and >= 12
// significant digits, or JSON with identical field names). Run metadata goes
// to a '.meta' sidecar so the data files stay byte-reproducible.

#include <string>
#include <vector>

#include "adlab/config.hpp"

namespace adlab::cli {

inline const std::vector<std::string>& subcommands() {
  static const std::vector<std::string> names = {
      "evolve", "sweep", "dual", "berry", "condition",
      "probe",  "fidelity", "models"};
  return names;
}

/// Runs one subcommand. Output goes to cfg.out_path ('' = stdout). Throws
/// adlab::Error on any failure; use exit_code_for to map kinds onto the
/// process exit code (0 ok, 2 config, 3 numerical/accuracy).
void dispatch(const std::string& subcommand, const RunConfig& cfg);

int exit_code_for(ErrorKind kind);

/// %.15g rendering used for every numeric cell.
std::string fmt_num(double v);

}  // namespace adlab::cli

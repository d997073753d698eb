#pragma once
// CLI entry points shared by the binary and the tests.

#include <iosfwd>
#include <string>

#include "clusterfb/experiment.hpp"

namespace clusterfb {

// Per-cluster membership, mean rates, both threshold types, region bits,
// and the minimum cluster count for the configured loss budget.
int cmd_thresholds(const ExperimentConfig& cfg, std::ostream& out);

// Runs the sweep (or single K) and writes results.csv and manifest.json
// into run.out_dir. Returns nonzero if the directory is not writable.
int cmd_simulate(const ExperimentConfig& cfg, std::ostream& out);

// Optimal bit vector, objective, per-user budget slack, and level tables.
int cmd_bitalloc(const ExperimentConfig& cfg, std::ostream& out);

} // namespace clusterfb

#pragma once
// Command dispatch shared by the C API and the CLI. Every command reads the
// validated configuration, writes its CSV artifacts into out_dir, and
// returns a report whose checks decide the process exit code.

#include "trt/config.hpp"
#include "trt/report.hpp"

namespace trt {

inline const char* const kCommands[] = {"forward",    "adjoint-test", "spanning",
                                        "inject-probe", "dim2-probe", "support-exp",
                                        "invert"};

bool is_known_command(const std::string& name);

// Runs one command; throws on configuration/IO errors. Threshold failures do
// not throw, they are recorded as failed checks.
RunReport run_command(const std::string& name, const ExperimentConfig& cfg,
                      const std::string& out_dir);

// Deterministic synthetic phantom on the grid: per-component sums of smooth
// bumps, seeded by cfg.seed.
std::vector<double> synthesize_phantom(const ExperimentConfig& cfg, int res);

}  // namespace trt

#pragma once

#include <string>
#include <vector>

#include "uclab/config.hpp"

namespace uclab {

// One named check of the top-level verification report. Hard checks gate the
// exit status; soft checks carry measured constants.
struct Check {
    std::string name;
    bool pass = true;
    bool hard = false;
    double value = 0.0;
    double threshold = 0.0;
    std::string note;
};

struct VerificationReport {
    std::vector<Check> checks;
    void add(const std::string& name, bool pass, bool hard, double value, double threshold,
             const std::string& note = "");
    bool hard_pass() const;
};

enum StageMask : unsigned {
    StageSolve = 1u,
    StageFrequency = 2u,
    StageWhitney = 4u,
    StageCritical = 8u,
    StageAll = 15u,
};

// Runs the pipeline, writes artifacts under out_dir, returns the process
// exit code (0 pass, 1 hard-check failure, 3 numerical failure). verify_only
// reuses a cached solved field when the solve fingerprint matches and skips
// artifact regeneration except the report.
int run_pipeline(const ExperimentConfig& cfg, const std::string& out_dir,
                 const std::string& cache_dir, unsigned stages, bool verify_only = false);

}  // namespace uclab

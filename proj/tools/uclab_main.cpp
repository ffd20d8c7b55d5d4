#include <omp.h>

#include <cstdio>
#include <exception>
#include <string>

#include <CLI11.hpp>

#include "uclab/pipeline.hpp"

// Exit codes: 0 pass, 1 check failure, 2 usage/config error, 3 numerical
// failure (non-convergence).

int main(int argc, char** argv) {
    CLI::App app{"uclab - cutoff-weighted frequency, Whitney and critical-set laboratory"};
    app.require_subcommand(1);

    std::string config_path, out_dir = "out", cache_dir;
    int threads = 0;
    app.add_option("--threads", threads, "OpenMP thread count (0 = runtime default)");

    struct Sub {
        CLI::App* cmd;
        unsigned stages;
        bool verify_only;
    };
    std::vector<Sub> subs;
    auto add_sub = [&](const char* name, const char* desc, unsigned stages, bool verify_only) {
        CLI::App* cmd = app.add_subcommand(name, desc);
        cmd->add_option("--config", config_path, "experiment config file")->required();
        cmd->add_option("--out", out_dir, "artifact output directory");
        cmd->add_option("--cache", cache_dir, "solved-field cache directory (default: out)");
        subs.push_back({cmd, stages, verify_only});
    };
    add_sub("solve", "minimize the functional and write the field", uclab::StageSolve, false);
    add_sub("frequency", "frequency scan of the solved field",
            uclab::StageSolve | uclab::StageFrequency, false);
    add_sub("whitney", "Whitney decomposition of the solved field",
            uclab::StageSolve | uclab::StageWhitney, false);
    add_sub("critical", "critical-set detection and box dimension",
            uclab::StageSolve | uclab::StageCritical, false);
    add_sub("verify", "identity/property suites only (cached field reused)", uclab::StageAll,
            true);
    add_sub("run", "full pipeline: solve, frequency, whitney, critical, report",
            uclab::StageAll, false);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    if (threads > 0) omp_set_num_threads(threads);

    const Sub* active = nullptr;
    for (const Sub& s : subs)
        if (s.cmd->parsed()) active = &s;
    if (!active) return 2;

    try {
        const auto cfg = uclab::ExperimentConfig::parse_file(config_path);
        const std::string cache = cache_dir.empty() ? out_dir : cache_dir;
        return uclab::run_pipeline(cfg, out_dir, cache, active->stages, active->verify_only);
    } catch (const uclab::ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    }
}

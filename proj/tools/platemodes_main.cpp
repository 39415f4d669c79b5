#include <cstdlib>
#include <iostream>

#include "CLI11.hpp"
#include "platemodes/errors.hpp"
#include "platemodes/run.hpp"

using namespace platemodes;

int main(int argc, char** argv) {
    CLI::App app{"Clamped plate eigenmodes with clamped interior points"};
    app.require_subcommand(1);

    std::string config_path, out_dir;
    int threads = 0;
    auto* run_cmd = app.add_subcommand("run", "Run the task described by a config file");
    run_cmd->add_option("config", config_path, "JSON config")->required();
    run_cmd->add_option("--out", out_dir, "Output directory (default out/<config name>)");
    run_cmd->add_option("--threads", threads, "Worker threads (default $PLATEMODES_THREADS)")->check(CLI::PositiveNumber);

    auto* validate_cmd = app.add_subcommand("validate", "Check a config file against the schema");
    validate_cmd->add_option("config", config_path, "JSON config")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : kExitConfig;
    }

    RunConfig cfg;
    try {
        cfg = load_config(config_path);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << config_path << ": " << e.what() << '\n';
        return kExitConfig;
    }
    if (*validate_cmd) {
        std::cout << config_path << ": ok (" << task_name(cfg.task) << ")\n";
        return kExitOk;
    }

    if (threads == 0)
        if (const char* env = std::getenv("PLATEMODES_THREADS")) {
            char* end = nullptr;
            const long v = std::strtol(env, &end, 10);
            if (end == env || *end != '\0' || v <= 0) {
                std::cerr << "config error: PLATEMODES_THREADS must be a positive integer\n";
                return kExitConfig;
            }
            threads = int(v);
        }
    if (out_dir.empty()) out_dir = (std::filesystem::path("out") / std::filesystem::path(config_path).stem()).string();

    const RunOutcome o = run(cfg, out_dir, threads);
    if (o.status != kExitOk) {
        std::cerr << task_name(cfg.task) << " failed: " << o.manifest.value("diagnostic", o.manifest["results"].value("failure", "")) << '\n';
    } else {
        std::cout << task_name(cfg.task) << " done in " << o.manifest["wall_time_s"].get<double>() << " s, outputs in "
                  << out_dir << '\n';
    }
    return o.status;
}

// blowup: run one analysis command from a JSON config.
//
//   blowup --config run.json [--command check-ko] [--out-dir out] [--seed 7] [--threads 4]
//
// The command may also be given in the config. Exit codes: 0 verdict obtained,
// 2 configuration, 3 precondition rejected, 4 numerical failure, 1 other.

#include "blowup/cli_io.hpp"
#include "blowup/errors.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <optional>
#include <string>

int main(int argc, char** argv) {
    CLI::App app{"Boundary blow-up solutions of phi-Laplacian problems"};
    std::string config;
    std::optional<std::string> command, out_dir;
    std::optional<std::uint64_t> seed;
    std::size_t threads = 1;
    app.add_option("--config", config, "JSON run configuration")->required();
    app.add_option("--command", command, "Overrides the config command")
        ->check(CLI::IsMember(blowup::kCommands));
    app.add_option("--out-dir", out_dir, "Artifact directory (default $BLOWUP_OUT_DIR, else ./out)");
    app.add_option("--seed", seed, "Overrides the config seed");
    app.add_option("--threads", threads, "Concurrent sweep members")->check(CLI::Range(1, 256));
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : blowup::kExitConfig;
    }

    blowup::RunOptions opts;
    opts.out_dir = blowup::resolve_out_dir(out_dir);
    opts.threads = threads;

    blowup::RunConfig cfg;
    try {
        cfg = blowup::parse_config(config);
    } catch (const blowup::Error& e) {
        std::cerr << "blowup: " << e.what() << "\n";
        return blowup::kExitConfig;
    }
    if (seed) cfg.seed = *seed;
    std::string cmd = command ? *command : cfg.command.value_or("");
    if (cmd.empty()) {
        std::cerr << "blowup: no command given (--command or config 'command')\n";
        return blowup::kExitConfig;
    }

    int rc = blowup::run_command(cfg, cmd, opts);
    if (rc == blowup::kExitOk)
        std::cout << (opts.out_dir / (cmd + ".json")).string() << "\n";
    else
        std::cerr << "blowup: " << cmd << " failed with exit code " << rc << ", see "
                  << (opts.out_dir / "error.json").string() << "\n";
    return rc;
}

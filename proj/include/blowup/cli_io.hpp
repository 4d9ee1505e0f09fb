#pragma once

// Run configuration, command dispatch and artifact serialization for the
// `blowup` command-line tool.
//
// Configs are JSON objects; unknown keys are rejected. Table files are plain
// text with two whitespace-separated columns and strictly increasing first
// column; '#' starts a comment. Relative table paths resolve against the
// directory of the config file.

#include "blowup/fd_oracle.hpp"
#include "blowup/nfunction.hpp"
#include "blowup/problem_specs.hpp"
#include "blowup/radial_solver.hpp"

#include <cstdint>
#include <exception>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace blowup {

/// Exit status taxonomy: a verdict (even "diverges") is success.
enum ExitCode : int {
    kExitOk = 0,
    kExitSoftware = 1,
    kExitConfig = 2,
    kExitPrecondition = 3,
    kExitNumeric = 4,
};

/// A phi, f or weight entry: family tag with parameters, or a table file.
struct FamilyBlock {
    std::string family;
    std::vector<double> params;
    /// As written in the config; empty unless family == "table".
    std::string table;

    bool operator==(const FamilyBlock&) const = default;
};

struct WeightBlock {
    /// Shorthand for lower == upper.
    std::optional<FamilyBlock> radial;
    std::optional<FamilyBlock> lower;
    std::optional<FamilyBlock> upper;
    std::optional<FamilyBlock> ball_lower;
    std::optional<FamilyBlock> ball_upper;

    bool operator==(const WeightBlock&) const = default;
};

struct Geometry {
    int N = 1;
    double L = 1.0;
    /// Outer radius for entire-space and blow-up runs.
    double horizon = 50.0;

    bool operator==(const Geometry&) const = default;
};

struct CommandParams {
    double alpha = 1.0;
    double epsilon = 0.1;
    double k = 10.0;
    std::vector<double> k_ladder;
    double r_star = 0.8;
    double r_max = 1.0;
    double tol = 1e-9;
    double rtol = 1e-8;
    std::vector<double> cutoffs{1e1, 1e2, 1e3, 1e4, 1e5, 1e6};
    std::size_t samples = 10000;
    std::size_t M = 1024;
    std::size_t output_points = 401;
    /// Weight component used as rho by the solver commands and check-arho.
    std::string component = "lower";
    /// "bar" or "tilde".
    std::string budget = "bar";
    double budget_horizon = 1e6;

    bool operator==(const CommandParams&) const = default;
};

struct RunConfig {
    std::optional<std::string> command;
    FamilyBlock phi;
    std::optional<FamilyBlock> f;
    WeightBlock weight;
    Geometry geometry;
    CommandParams params;
    std::uint64_t seed = 1;
    /// Directory against which table paths resolve; not serialized.
    std::filesystem::path base_dir;

    /// Compares the serialized content only.
    bool operator==(const RunConfig& o) const {
        return command == o.command && phi == o.phi && f == o.f && weight == o.weight && geometry == o.geometry &&
               params == o.params && seed == o.seed;
    }
};

inline const std::vector<std::string> kCommands{"indices",       "check-ko",   "check-arho",    "budget",
                                                "subadd",        "solve-ivp",  "blowup-radius", "solve-ball",
                                                "verify-bounds", "sweep",      "entire",        "fd-check"};

/// Throws ConfigError on unreadable files, schema violations or bad tables.
RunConfig parse_config(const std::filesystem::path& path);
RunConfig parse_config_text(const std::string& text, const std::filesystem::path& base_dir = ".");
/// Canonical JSON form; parse_config_text(serialize_config(c)) == c.
std::string serialize_config(const RunConfig& cfg);

/// Two-column table; throws ConfigError on parse failures or non-increasing abscissae.
std::pair<std::vector<double>, std::vector<double>> read_table(const std::filesystem::path& path);

PhiSpec build_phi(const RunConfig& cfg);
NonlinearitySpec build_f(const RunConfig& cfg);
WeightSpec build_weight(const RunConfig& cfg);
/// The weight component named by params.component.
RadialFunction build_rho(const RunConfig& cfg);

/// CSV with header r,u,du,Q and 17 significant digits.
std::string profile_csv(const RadialProfile& p);

struct RunOptions {
    std::filesystem::path out_dir = "out";
    std::size_t threads = 1;
};

/// --out-dir, else $BLOWUP_OUT_DIR, else ./out.
std::filesystem::path resolve_out_dir(const std::optional<std::string>& flag);

/// Exit code for an exception escaping a command.
int exit_code(const std::exception& e);

/// Runs one command, writing <command>.json plus CSV profiles to out_dir, or
/// error.json on failure. Returns the exit code.
int run_command(const RunConfig& cfg, const std::string& command, const RunOptions& opts);

}  // namespace blowup

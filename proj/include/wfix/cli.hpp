#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace wfix::cli {

enum ExitCode : int {
    kOk = 0,
    kCheckFailed = 1,
    kConfigError = 2,
    kSchemeFailure = 3,
    kInconclusive = 4,
};

/// Settings shared by all subcommands. Empty strings mean "use the
/// subcommand's default".
struct RunConfig {
    std::string space = "euclidean:1";
    std::string mapping;
    std::vector<std::string> schemes;
    std::string schedule = "harmonic";
    std::string x0;
    std::string u0;
    std::string n_max;
    std::string tolerance;
    std::string inner_mode = "picard";
    std::string max_inner = "10000";
    std::string output;
    std::string format;
    int digits = 15;

    bool verify = false;
    bool all_rows = false;
    bool assert_faster = false;
    std::string horizon = "200";
    std::string threshold = "1e-6";
    bool literal = false;
    std::string perturb;
    bool proof_variant = false;
    std::string samples = "10000";
    std::string seed = "1";
};

/// Flat key=value lines; '#' starts a comment. Keys are the long flag
/// names without dashes.
std::map<std::string, std::string> read_config_file(const std::string& path);

/// Throws ConfigError on an unknown key or a malformed value.
void apply_setting(RunConfig& cfg, const std::string& key, const std::string& value);

/// Entry point behind the executable. args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace wfix::cli

#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

// Command implementations behind the binary's subcommands. Exit codes:
// 0 success, 1 validation or config failure, 2 runtime backend failure.
namespace fcarena::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInvalid = 1;
inline constexpr int kExitRuntime = 2;

struct CommonOptions {
    std::optional<std::string> out_dir;
    std::optional<std::uint64_t> rng_seed;
    bool quiet = false;
};

int cmd_validate(const std::string& seed_path, const CommonOptions& options,
                 std::ostream& out, std::ostream& err);

int cmd_run(const std::string& config_path, const CommonOptions& options,
            std::ostream& out, std::ostream& err);

// Attacker phase only: trains the rewriter against the configured defender
// for one round and writes the collected bad cases.
int cmd_attack(const std::string& config_path, const CommonOptions& options,
               std::ostream& out, std::ostream& err);

int cmd_eval(const std::string& config_path, const std::string& eval_path,
             const CommonOptions& options, std::ostream& out, std::ostream& err);

}  // namespace fcarena::cli

#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "fcarena/cli.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Adversarial training arena for function-calling models"};
    app.require_subcommand(1);

    fcarena::cli::CommonOptions options;
    std::optional<std::string> out_dir;
    std::optional<std::uint64_t> rng_seed;

    auto add_common = [&](CLI::App* sub, bool with_out_dir = true) {
        if (with_out_dir)
            sub->add_option("--out-dir", out_dir, "Directory for run outputs");
        sub->add_option("--rng-seed", rng_seed,
                        "Override the config's rng_seed");
        sub->add_flag("--quiet", options.quiet, "Suppress progress output");
    };

    std::string seed_path;
    CLI::App* validate =
        app.add_subcommand("validate", "Check a seed dataset (JSONL)");
    validate->add_option("seeds", seed_path, "Path to the seed JSONL file")
        ->required();
    add_common(validate, false);

    std::string run_config_path;
    CLI::App* run = app.add_subcommand("run", "Run the alternating loop");
    run->add_option("config", run_config_path, "Path to the run config JSON")
        ->required();
    add_common(run);

    std::string attack_config_path;
    CLI::App* attack =
        app.add_subcommand("attack", "Run one attacker phase only");
    attack->add_option("config", attack_config_path,
                       "Path to the run config JSON")
        ->required();
    add_common(attack);

    std::string eval_config_path;
    std::string eval_path;
    CLI::App* eval =
        app.add_subcommand("eval", "Score the defender on an eval set");
    eval->add_option("config", eval_config_path, "Path to the run config JSON")
        ->required();
    eval->add_option("eval_set", eval_path, "Path to the eval JSONL file")
        ->required();
    add_common(eval);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? fcarena::cli::kExitOk : fcarena::cli::kExitInvalid;
    }

    options.out_dir = out_dir;
    options.rng_seed = rng_seed;

    if (validate->parsed())
        return fcarena::cli::cmd_validate(seed_path, options, std::cout,
                                          std::cerr);
    if (run->parsed())
        return fcarena::cli::cmd_run(run_config_path, options, std::cout,
                                     std::cerr);
    if (attack->parsed())
        return fcarena::cli::cmd_attack(attack_config_path, options, std::cout,
                                        std::cerr);
    if (eval->parsed())
        return fcarena::cli::cmd_eval(eval_config_path, eval_path, options,
                                      std::cout, std::cerr);
    return fcarena::cli::kExitInvalid;
}

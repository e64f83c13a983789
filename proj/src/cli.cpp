#include "fcarena/cli.hpp"

#include <chrono>
#include <fstream>
#include <ostream>
#include <sstream>

#include "fcarena/arena.hpp"
#include "fcarena/config.hpp"
#include "fcarena/corpus.hpp"

namespace fcarena::cli {

using callspec::json;

namespace {

int classify_exception(const std::exception& e, std::ostream& err) {
    err << "error: " << e.what() << "\n";
    if (dynamic_cast<const config::ConfigError*>(&e) != nullptr ||
        dynamic_cast<const corpus::ValidationError*>(&e) != nullptr ||
        dynamic_cast<const callspec::ParseError*>(&e) != nullptr ||
        dynamic_cast<const callspec::FormatError*>(&e) != nullptr ||
        dynamic_cast<const std::invalid_argument*>(&e) != nullptr)
        return kExitInvalid;
    return kExitRuntime;
}

config::RunConfig load_with_overrides(const std::string& config_path,
                                      const CommonOptions& options) {
    config::RunConfig cfg = config::load_config(config_path);
    if (options.rng_seed.has_value()) cfg.rng_seed = *options.rng_seed;
    return cfg;
}

std::filesystem::path resolve_out_dir(const CommonOptions& options,
                                      std::uint64_t rng_seed) {
    if (options.out_dir.has_value())
        return std::filesystem::path(*options.out_dir);
    auto now = std::chrono::system_clock::now();
    std::time_t t = std::chrono::system_clock::to_time_t(now);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char stamp[32];
    std::strftime(stamp, sizeof stamp, "%Y%m%d-%H%M%S", &tm);
    return std::filesystem::path("runs") /
           (std::string(stamp) + "_seed" + std::to_string(rng_seed));
}

void print_warnings(const std::vector<std::string>& warnings,
                    std::ostream& err) {
    for (const std::string& warning : warnings)
        err << "warning: " << warning << "\n";
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << text;
}

}  // namespace

int cmd_validate(const std::string& seed_path, const CommonOptions& options,
                 std::ostream& out, std::ostream& err) {
    try {
        auto records = corpus::load_seed_dataset(seed_path);
        if (!options.quiet) {
            for (const auto& record : records)
                out << record.id << ": ok\n";
            out << records.size() << " record(s) valid\n";
        }
        if (records.empty()) err << "warning: " << seed_path << " is empty\n";
        return kExitOk;
    } catch (const std::exception& e) {
        classify_exception(e, err);
        return kExitInvalid;
    }
}

int cmd_run(const std::string& config_path, const CommonOptions& options,
            std::ostream& out, std::ostream& err) {
    try {
        config::RunConfig cfg = load_with_overrides(config_path, options);
        std::filesystem::path out_dir = resolve_out_dir(options, cfg.rng_seed);
        std::filesystem::create_directories(out_dir);
        write_text(out_dir / "config.json",
                   config::config_to_json(cfg).dump(2) + "\n");

        std::vector<std::string> warnings;
        arena::RunReport report = arena::run(cfg, out_dir, &warnings);
        print_warnings(warnings, err);
        if (!options.quiet) {
            out << "run complete: " << report.rounds << " round(s), outputs in "
                << out_dir.string() << "\n";
            for (const auto& round : report.per_round) {
                out << "  round " << round.round << ": " << round.timesteps
                    << " timestep(s), attack success rate "
                    << round.attack_success_rate << ", bad cases "
                    << round.bad_case_count;
                if (round.defender_failure_before && round.defender_failure_after)
                    out << ", defender failure " << *round.defender_failure_before
                        << " -> " << *round.defender_failure_after;
                out << "\n";
            }
        }
        return kExitOk;
    } catch (const std::exception& e) {
        return classify_exception(e, err);
    }
}

int cmd_attack(const std::string& config_path, const CommonOptions& options,
               std::ostream& out, std::ostream& err) {
    try {
        config::RunConfig cfg = load_with_overrides(config_path, options);
        std::filesystem::path out_dir = resolve_out_dir(options, cfg.rng_seed);
        std::filesystem::create_directories(out_dir);

        auto seeds = corpus::load_seed_dataset(cfg.seed_path);
        corpus::CurriculumSchedule schedule;
        schedule.rounds.push_back(config::effective_mix(cfg, 0));

        arena::LoopState state;
        double temperature = 1.0;
        if (const auto* simulated =
                std::get_if<config::SimulatedAttacker>(&cfg.attacker))
            temperature = simulated->temperature;
        state.attacker_params = rewriter::uniform_params(temperature);
        state.defender = cfg.defender;

        std::vector<std::string> warnings;
        state.collected.attacker_train =
            corpus::compose_round_dataset(seeds, schedule, 0, cfg.rng_seed,
                                          &warnings);
        std::vector<arena::RunLogEntry> run_log;
        arena::AttackerPhaseResult phase =
            arena::attacker_phase(state, cfg, &run_log);
        print_warnings(warnings, err);

        game::write_bad_cases(out_dir / "bad_cases.jsonl", phase.bad_cases);
        arena::write_run_log(out_dir / "run_log.jsonl", run_log);
        arena::save_checkpoint(out_dir / "checkpoint_attacker.json", state);
        if (!options.quiet)
            out << "attacker phase complete: " << phase.timesteps
                << " timestep(s), " << phase.bad_cases.size()
                << " bad case(s), outputs in " << out_dir.string() << "\n";
        return kExitOk;
    } catch (const std::exception& e) {
        return classify_exception(e, err);
    }
}

int cmd_eval(const std::string& config_path, const std::string& eval_path,
             const CommonOptions& options, std::ostream& out,
             std::ostream& err) {
    try {
        config::RunConfig cfg = load_with_overrides(config_path, options);
        auto eval_set = corpus::load_seed_dataset(eval_path);
        arena::EvalReport report = arena::evaluate(cfg.defender, eval_set);
        json rendered = arena::eval_report_to_json(report);
        out << rendered.dump(2) << "\n";
        if (options.out_dir.has_value()) {
            std::filesystem::path out_dir(*options.out_dir);
            std::filesystem::create_directories(out_dir);
            write_text(out_dir / "metrics.json", rendered.dump(2) + "\n");
        }
        return kExitOk;
    } catch (const std::exception& e) {
        return classify_exception(e, err);
    }
}

}  // namespace fcarena::cli

#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "fcarena/config.hpp"
#include "fcarena/corpus.hpp"
#include "fcarena/defender.hpp"
#include "fcarena/game.hpp"
#include "fcarena/optim.hpp"
#include "fcarena/rewriter.hpp"

// The alternating training loop: per round, compose the attacker's training
// set, train the attacker until its reward flattens (collecting the
// defender's bad cases), then train the defender on those bad cases. Every
// quantity derives from the config's rng_seed, so reruns are byte-identical.
namespace fcarena::arena {

struct RoundDatasets {
    std::vector<corpus::QueryPrompt> attacker_train;
    std::vector<game::BadCaseRecord> bad_cases;
};

struct LoopState {
    int round = 0;
    int timestep = 0;
    rewriter::PolicyParams attacker_params;
    defender::DefenderBackend defender;
    optim::RewardHistory reward_history;
    RoundDatasets collected;
};

struct RunLogEntry {
    int timestep = 0;
    double mean_reward = 0.0;      // shaped, the optimized quantity
    double mean_reward_raw = 0.0;  // game reward only
    double diversity_bonus = 0.0;
    double entropy = 0.0;
    bool stopped = false;
};

void write_run_log(const std::filesystem::path& path,
                   std::span<const RunLogEntry> entries);

struct AttackerPhaseResult {
    std::vector<game::BadCaseRecord> bad_cases;  // new, dedup already applied
    int timesteps = 0;
    int stop_timestep = -1;  // -1 when the early stop never fired
    std::size_t rollouts = 0;
    std::size_t judge_pass_count = 0;
    std::size_t attack_success_count = 0;
    double mean_diversity_bonus = 0.0;
    double final_mean_reward = 0.0;
};

// Algorithm: per timestep, sample a batch of rewrites, judge them, let the
// defender answer, shape rewards with the diversity bonus, step the policy,
// and append the mean to the reward history until it flattens.
AttackerPhaseResult attacker_phase(LoopState& state,
                                   const config::RunConfig& config,
                                   std::vector<RunLogEntry>* run_log = nullptr);

// Responds to every collected bad case (plus seed records per
// defender_train_mix), scores them, and applies the configured update.
// No-op with a warning when there is nothing to train on or the defender
// is external.
void defender_phase(LoopState& state, const config::RunConfig& config,
                    std::span<const corpus::SeedRecord> seeds,
                    std::vector<std::string>* warnings = nullptr);

// Fraction of sampled attacker rewrites the defender answers incorrectly;
// the sample depends only on (config, attacker params, round), so calls
// before and after a defender update are paired.
double measure_defender_failure(const rewriter::PolicyParams& frozen_params,
                                std::span<const corpus::QueryPrompt> prompts,
                                const defender::DefenderBackend& defender_backend,
                                const config::RunConfig& config,
                                std::size_t round_index);

struct RoundReport {
    int round = 0;
    int timesteps = 0;
    int stop_timestep = -1;
    std::size_t rollouts = 0;
    std::size_t judge_pass_count = 0;
    std::size_t attack_success_count = 0;
    double judge_pass_rate = 0.0;
    double attack_success_rate = 0.0;  // successes over judge-valid rewrites
    std::size_t bad_case_count = 0;
    std::optional<double> defender_failure_before;
    std::optional<double> defender_failure_after;
    double mean_diversity_bonus = 0.0;
    double final_mean_reward = 0.0;
};

struct RunReport {
    int rounds = 0;
    std::vector<RoundReport> per_round;
};

callspec::json report_to_json(const RunReport& report);

// Full alternating loop. When out_dir is set, persists report.json,
// run_log.jsonl, per-round bad-case JSONL files, and per-phase checkpoints.
RunReport run(const config::RunConfig& config,
              const std::optional<std::filesystem::path>& out_dir = std::nullopt,
              std::vector<std::string>* warnings = nullptr);

void save_checkpoint(const std::filesystem::path& path, const LoopState& state);
LoopState load_checkpoint(const std::filesystem::path& path);

struct CategoryMetric {
    std::size_t total = 0;
    std::size_t correct = 0;
    std::optional<double> accuracy;  // unset when the category is empty
};

struct EvalReport {
    std::map<std::string, CategoryMetric> categories;
    std::size_t total = 0;
    std::size_t correct = 0;
    std::optional<double> overall;
};

// Per-category accuracy: call categories score by answer equality,
// relevance by producing any call, irrelevance by refusing. Every record
// must carry a category tag.
EvalReport evaluate(const defender::DefenderBackend& defender_backend,
                    std::span<const corpus::SeedRecord> eval_set);

callspec::json eval_report_to_json(const EvalReport& report);

}  // namespace fcarena::arena

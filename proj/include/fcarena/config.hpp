#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <variant>

#include "fcarena/arbiter.hpp"
#include "fcarena/callspec.hpp"
#include "fcarena/corpus.hpp"
#include "fcarena/defender.hpp"
#include "fcarena/wire.hpp"

// Run configuration: a versioned JSON document covering the loop
// hyperparameters, the curriculum, and the four backend blocks. Endpoint
// auth comes in as environment-variable names, never token values.
namespace fcarena::config {

class ConfigError : public std::runtime_error {
  public:
    ConfigError(const std::string& what, std::string field_path)
        : std::runtime_error(field_path.empty() ? what
                                                : field_path + ": " + what),
          field_path_(std::move(field_path)) {}
    const std::string& field_path() const { return field_path_; }

  private:
    std::string field_path_;
};

struct SimulatedAttacker {
    double temperature = 1.0;
};

using AttackerBackend = std::variant<SimulatedAttacker, wire::EndpointConfig>;

struct SimulatedEmbedder {
    std::size_t dim = 256;
};

using EmbedderBackend = std::variant<SimulatedEmbedder, wire::EndpointConfig>;

enum class Optimizer { reinforce, clipped };
enum class DefenderUpdate { rl, sft };

struct RunConfig {
    int version = 1;
    std::string seed_path;
    int rounds = 2;
    int batch_size = 32;
    int max_timesteps = 200;
    int rewrite_len = 2;
    double alpha = 0.05;
    double epsilon = 0.2;
    int window = 10;
    double learning_rate = 0.1;
    double eta = 0.1;
    Optimizer optimizer = Optimizer::reinforce;
    double clip_ratio = 0.2;
    DefenderUpdate defender_update = DefenderUpdate::rl;
    double defender_train_mix = 1.0;  // seed records per bad case, by count
    bool dedup_bad_cases = true;
    bool accumulate_bad_cases = false;
    int eval_trials = 256;
    corpus::CurriculumSchedule curriculum;  // empty -> default schedule
    AttackerBackend attacker = SimulatedAttacker{};
    arbiter::JudgeBackend judge = arbiter::SimulatedJudge{};
    defender::DefenderBackend defender = defender::WeaknessProfile{};
    EmbedderBackend embedder = SimulatedEmbedder{};
    std::uint64_t rng_seed = 0;
};

void validate_config(const RunConfig& config);

RunConfig config_from_json(const callspec::json& value);
callspec::json config_to_json(const RunConfig& config);

RunConfig load_config(const std::filesystem::path& path);

// Backend-block form of a defender ({"mode": ...}), shared by configs and
// checkpoints.
callspec::json defender_backend_to_json(const defender::DefenderBackend& backend);
defender::DefenderBackend defender_backend_from_json(const callspec::json& value,
                                                     const std::string& field_path);

// The schedule actually used for round k: the configured mix, the last
// configured mix repeated when k runs past the schedule, or the built-in
// default (singles first, then a 70/30 single/parallel mix).
corpus::CurriculumMix effective_mix(const RunConfig& config, std::size_t round_index);

}  // namespace fcarena::config

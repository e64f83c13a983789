#include "fcarena/arena.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>

#include "fcarena/arbiter.hpp"
#include "fcarena/diversity.hpp"
#include "fcarena/rng.hpp"

namespace fcarena::arena {

using callspec::json;

namespace {

// Independent deterministic randomness streams, all derived from the
// config's rng_seed and the round index.
enum class Stream : std::uint64_t {
    prompt_pick = 1,
    rewrite = 2,
    defender_trial = 3,
    measure_pick = 4,
    measure_rewrite = 5,
    measure_trial = 6,
    train_trial = 7,
    seed_mix = 8,
};

std::uint64_t stream_seed(const config::RunConfig& config, Stream stream,
                          std::size_t round_index) {
    return mix_seed(mix_seed(config.rng_seed, static_cast<std::uint64_t>(stream)),
                    round_index);
}

std::vector<diversity::EmbeddingVector> embed_batch(
    const config::EmbedderBackend& backend,
    const std::vector<std::string>& texts) {
    std::vector<diversity::EmbeddingVector> embeddings;
    embeddings.reserve(texts.size());
    if (const auto* simulated = std::get_if<config::SimulatedEmbedder>(&backend)) {
        for (const std::string& text : texts)
            embeddings.push_back(diversity::embed(text, simulated->dim));
        return embeddings;
    }
    auto rows =
        wire::embed_remote(std::get<wire::EndpointConfig>(backend), texts);
    for (auto& row : rows) {
        diversity::EmbeddingVector embedding;
        embedding.values = std::move(row);
        double squared = 0.0;
        for (double v : embedding.values) squared += v * v;
        if (squared == 0.0)
            throw wire::PayloadError("remote embedder returned a zero vector");
        embedding.norm = std::sqrt(squared);
        embeddings.push_back(std::move(embedding));
    }
    return embeddings;
}

rewriter::RewrittenQuery rewrite_one(const config::RunConfig& config,
                                     const rewriter::PolicyParams& params,
                                     const corpus::QueryPrompt& prompt,
                                     std::uint64_t rewrite_seed) {
    if (const auto* endpoint = std::get_if<wire::EndpointConfig>(&config.attacker))
        return rewriter::external_rewrite(*endpoint, prompt);
    return rewriter::sample_rewrite(params, prompt, rewrite_seed,
                                    static_cast<std::size_t>(config.rewrite_len));
}

std::string bad_case_key(const game::BadCaseRecord& record) {
    return record.seed_id + '\n' + record.rewritten_query;
}

const corpus::SeedRecord& seed_by_id(
    const std::map<std::string, const corpus::SeedRecord*>& index,
    const std::string& id) {
    auto it = index.find(id);
    if (it == index.end())
        throw std::runtime_error("bad case references unknown seed id '" + id +
                                 "'");
    return *it->second;
}

}  // namespace

void write_run_log(const std::filesystem::path& path,
                   std::span<const RunLogEntry> entries) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write run log: " + path.string());
    for (const auto& entry : entries) {
        json line{{"timestep", entry.timestep},
                  {"mean_reward", entry.mean_reward},
                  {"mean_reward_raw", entry.mean_reward_raw},
                  {"diversity_bonus", entry.diversity_bonus},
                  {"entropy", entry.entropy},
                  {"stopped", entry.stopped}};
        out << line.dump() << '\n';
    }
}

AttackerPhaseResult attacker_phase(LoopState& state,
                                   const config::RunConfig& config,
                                   std::vector<RunLogEntry>* run_log) {
    const auto& prompts = state.collected.attacker_train;
    if (prompts.empty())
        throw std::logic_error("attacker phase needs a composed training set");

    bool trainable = std::holds_alternative<config::SimulatedAttacker>(config.attacker);
    std::size_t round_index = static_cast<std::size_t>(state.round);
    std::size_t batch_size = static_cast<std::size_t>(config.batch_size);

    std::set<std::string> seen;
    if (config.dedup_bad_cases)
        for (const auto& record : state.collected.bad_cases)
            seen.insert(bad_case_key(record));

    AttackerPhaseResult result;
    state.reward_history.window = config.window;
    state.reward_history.epsilon = config.epsilon;
    state.reward_history.per_timestep_mean.clear();
    state.timestep = 0;

    Rng pick_rng(stream_seed(config, Stream::prompt_pick, round_index));
    double bonus_total = 0.0;

    for (int tau = 0; tau < config.max_timesteps; ++tau) {
        optim::RolloutBatch batch;
        std::vector<std::string> texts;
        std::vector<game::AttackOutcome> outcomes;
        texts.reserve(batch_size);
        batch.prompts.reserve(batch_size);
        batch.entries.reserve(batch_size);

        for (std::size_t i = 0; i < batch_size; ++i) {
            std::size_t pick =
                static_cast<std::size_t>(pick_rng.next_below(prompts.size()));
            const corpus::QueryPrompt& prompt = prompts[pick];
            std::uint64_t step_tag =
                static_cast<std::uint64_t>(tau) * batch_size + i;
            rewriter::RewrittenQuery rewritten = rewrite_one(
                config, state.attacker_params, prompt,
                mix_seed(stream_seed(config, Stream::rewrite, round_index),
                         step_tag));

            arbiter::JudgeVerdict verdict =
                arbiter::judge(config.judge, rewritten, prompt.source);
            callspec::CanonicalAnswer answer = defender::respond(
                state.defender, rewritten, prompt.source,
                mix_seed(stream_seed(config, Stream::defender_trial, round_index),
                         step_tag));
            game::AttackOutcome outcome = game::adversarial_reward(
                verdict, answer, prompt.source.answer, rewritten.seed_id);

            ++result.rollouts;
            if (verdict.r_judge == 1) ++result.judge_pass_count;
            if (game::is_bad_case(outcome)) {
                ++result.attack_success_count;
                game::BadCaseRecord record;
                record.rewritten_query = rewritten.text;
                record.seed_id = rewritten.seed_id;
                record.actions = rewritten.actions;
                record.ground_truth = prompt.source.answer;
                record.round = state.round;
                record.timestep = tau;
                if (!config.dedup_bad_cases ||
                    seen.insert(bad_case_key(record)).second)
                    result.bad_cases.push_back(std::move(record));
            }

            texts.push_back(rewritten.text);
            batch.prompts.push_back(prompt);
            optim::RolloutBatch::Entry entry;
            entry.prompt_index = batch.prompts.size() - 1;
            entry.rewritten = std::move(rewritten);
            entry.shaped_reward = static_cast<double>(outcome.r_adv);
            batch.entries.push_back(std::move(entry));
            outcomes.push_back(std::move(outcome));
        }

        auto embeddings = embed_batch(config.embedder, texts);
        for (std::size_t i = 0; i < batch.entries.size(); ++i)
            batch.entries[i].shaped_reward +=
                diversity::per_sample_diversity_bonus(embeddings, i, config.alpha);
        diversity::DiversityReport diversity_report =
            diversity::batch_diversity(embeddings, config.alpha);

        double mean_shaped = optim::estimate_objective(batch);
        double mean_raw = 0.0;
        for (const auto& outcome : outcomes)
            mean_raw += static_cast<double>(outcome.r_adv);
        mean_raw /= static_cast<double>(outcomes.size());

        optim::TrainStepReport step_report;
        if (trainable) {
            auto [updated, report] =
                config.optimizer == config::Optimizer::clipped
                    ? optim::clipped_surrogate_step(state.attacker_params, batch,
                                                    config.learning_rate,
                                                    config.clip_ratio)
                    : optim::policy_gradient_step(state.attacker_params, batch,
                                                  config.learning_rate);
            state.attacker_params = std::move(updated);
            step_report = report;
        } else {
            step_report.objective_estimate = mean_shaped;
        }

        state.reward_history.per_timestep_mean.push_back(mean_shaped);
        state.timestep = tau + 1;
        result.timesteps = tau + 1;
        result.final_mean_reward = mean_shaped;
        bonus_total += diversity_report.bonus;

        bool stopped = optim::should_stop(state.reward_history);
        if (run_log != nullptr) {
            RunLogEntry entry;
            entry.timestep = tau;
            entry.mean_reward = mean_shaped;
            entry.mean_reward_raw = mean_raw;
            entry.diversity_bonus = diversity_report.bonus;
            entry.entropy = step_report.entropy;
            entry.stopped = stopped;
            run_log->push_back(entry);
        }
        if (stopped) {
            result.stop_timestep = tau;
            break;
        }
    }
    if (result.timesteps > 0)
        result.mean_diversity_bonus =
            bonus_total / static_cast<double>(result.timesteps);
    return result;
}

void defender_phase(LoopState& state, const config::RunConfig& config,
                    std::span<const corpus::SeedRecord> seeds,
                    std::vector<std::string>* warnings) {
    const auto& bad_cases = state.collected.bad_cases;
    if (bad_cases.empty()) {
        if (warnings != nullptr)
            warnings->push_back("round " + std::to_string(state.round) +
                                ": no bad cases collected; defender unchanged");
        return;
    }
    if (!std::holds_alternative<defender::WeaknessProfile>(state.defender)) {
        if (warnings != nullptr)
            warnings->push_back("round " + std::to_string(state.round) +
                                ": external defender is not locally trainable; "
                                "skipping update");
        return;
    }

    std::map<std::string, const corpus::SeedRecord*> index;
    for (const auto& seed : seeds) index[seed.id] = &seed;
    std::size_t round_index = static_cast<std::size_t>(state.round);

    std::size_t seed_count = static_cast<std::size_t>(std::llround(
        config.defender_train_mix * static_cast<double>(bad_cases.size())));

    if (config.defender_update == config::DefenderUpdate::sft) {
        auto updated = defender::sft_update(
            std::get<defender::WeaknessProfile>(state.defender), bad_cases,
            config.eta);
        state.defender = std::move(updated);
        return;
    }

    std::vector<std::pair<rewriter::RewrittenQuery, game::DefenseOutcome>> outcomes;
    outcomes.reserve(bad_cases.size() + seed_count);
    std::uint64_t trial_base = stream_seed(config, Stream::train_trial, round_index);
    std::size_t trial = 0;
    for (const auto& record : bad_cases) {
        const corpus::SeedRecord& seed = seed_by_id(index, record.seed_id);
        rewriter::RewrittenQuery rewritten;
        rewritten.seed_id = record.seed_id;
        rewritten.text = record.rewritten_query;
        rewritten.actions = record.actions;
        callspec::CanonicalAnswer answer = defender::respond(
            state.defender, rewritten, seed, mix_seed(trial_base, trial++));
        outcomes.emplace_back(
            std::move(rewritten),
            game::defense_reward(answer, record.ground_truth, record.seed_id));
    }

    if (!seeds.empty() && seed_count > 0) {
        Rng mix_rng(stream_seed(config, Stream::seed_mix, round_index));
        for (std::size_t i = 0; i < seed_count; ++i) {
            const corpus::SeedRecord& seed =
                seeds[static_cast<std::size_t>(mix_rng.next_below(seeds.size()))];
            rewriter::RewrittenQuery plain;
            plain.seed_id = seed.id;
            plain.text = seed.query;
            callspec::CanonicalAnswer answer = defender::respond_to_text(
                state.defender, seed.query, {}, seed,
                mix_seed(trial_base, trial++));
            outcomes.emplace_back(
                std::move(plain),
                game::defense_reward(answer, seed.answer, seed.id));
        }
    }

    auto updated =
        defender::rl_update(std::get<defender::WeaknessProfile>(state.defender),
                            outcomes, config.eta);
    state.defender = std::move(updated);
}

double measure_defender_failure(const rewriter::PolicyParams& frozen_params,
                                std::span<const corpus::QueryPrompt> prompts,
                                const defender::DefenderBackend& defender_backend,
                                const config::RunConfig& config,
                                std::size_t round_index) {
    if (prompts.empty())
        throw std::invalid_argument("failure measurement needs prompts");
    std::size_t trials = static_cast<std::size_t>(config.eval_trials);
    Rng pick_rng(stream_seed(config, Stream::measure_pick, round_index));
    std::size_t failures = 0;
    for (std::size_t t = 0; t < trials; ++t) {
        const corpus::QueryPrompt& prompt =
            prompts[static_cast<std::size_t>(pick_rng.next_below(prompts.size()))];
        rewriter::RewrittenQuery rewritten = rewriter::sample_rewrite(
            frozen_params, prompt,
            mix_seed(stream_seed(config, Stream::measure_rewrite, round_index), t),
            static_cast<std::size_t>(config.rewrite_len));
        callspec::CanonicalAnswer answer = defender::respond(
            defender_backend, rewritten, prompt.source,
            mix_seed(stream_seed(config, Stream::measure_trial, round_index), t));
        if (!callspec::answers_equal(answer, prompt.source.answer)) ++failures;
    }
    return static_cast<double>(failures) / static_cast<double>(trials);
}

json report_to_json(const RunReport& report) {
    json rounds = json::array();
    for (const auto& round : report.per_round) {
        json entry{{"round", round.round},
                   {"timesteps", round.timesteps},
                   {"stop_timestep", round.stop_timestep},
                   {"rollouts", round.rollouts},
                   {"judge_pass_count", round.judge_pass_count},
                   {"attack_success_count", round.attack_success_count},
                   {"judge_pass_rate", round.judge_pass_rate},
                   {"attack_success_rate", round.attack_success_rate},
                   {"bad_case_count", round.bad_case_count},
                   {"mean_diversity_bonus", round.mean_diversity_bonus},
                   {"final_mean_reward", round.final_mean_reward}};
        entry["defender_failure_before"] =
            round.defender_failure_before.has_value()
                ? json(*round.defender_failure_before)
                : json(nullptr);
        entry["defender_failure_after"] =
            round.defender_failure_after.has_value()
                ? json(*round.defender_failure_after)
                : json(nullptr);
        rounds.push_back(std::move(entry));
    }
    return json{{"rounds", report.rounds}, {"per_round", std::move(rounds)}};
}

RunReport run(const config::RunConfig& config,
              const std::optional<std::filesystem::path>& out_dir,
              std::vector<std::string>* warnings) {
    config::validate_config(config);
    auto seeds = corpus::load_seed_dataset(config.seed_path);

    corpus::CurriculumSchedule schedule;
    for (int k = 0; k < std::max(config.rounds, 1); ++k)
        schedule.rounds.push_back(
            config::effective_mix(config, static_cast<std::size_t>(k)));

    LoopState state;
    double temperature = 1.0;
    if (const auto* simulated =
            std::get_if<config::SimulatedAttacker>(&config.attacker))
        temperature = simulated->temperature;
    state.attacker_params = rewriter::uniform_params(temperature);
    state.defender = config.defender;
    state.reward_history.window = config.window;
    state.reward_history.epsilon = config.epsilon;

    if (out_dir) std::filesystem::create_directories(*out_dir);

    RunReport report;
    report.rounds = config.rounds;
    std::vector<RunLogEntry> run_log;

    for (int k = 0; k < config.rounds; ++k) {
        state.round = k;
        std::size_t round_index = static_cast<std::size_t>(k);
        state.collected.attacker_train = corpus::compose_round_dataset(
            seeds, schedule, round_index, config.rng_seed, warnings);
        if (!config.accumulate_bad_cases) state.collected.bad_cases.clear();

        AttackerPhaseResult phase =
            attacker_phase(state, config, &run_log);
        state.collected.bad_cases.insert(state.collected.bad_cases.end(),
                                         phase.bad_cases.begin(),
                                         phase.bad_cases.end());
        if (out_dir) {
            save_checkpoint(*out_dir / ("checkpoint_round_" + std::to_string(k) +
                                        "_attacker.json"),
                            state);
            game::write_bad_cases(*out_dir / ("bad_cases_round_" +
                                              std::to_string(k) + ".jsonl"),
                                  state.collected.bad_cases);
        }

        RoundReport round_report;
        round_report.round = k;
        round_report.timesteps = phase.timesteps;
        round_report.stop_timestep = phase.stop_timestep;
        round_report.rollouts = phase.rollouts;
        round_report.judge_pass_count = phase.judge_pass_count;
        round_report.attack_success_count = phase.attack_success_count;
        round_report.judge_pass_rate =
            phase.rollouts == 0 ? 0.0
                                : static_cast<double>(phase.judge_pass_count) /
                                      static_cast<double>(phase.rollouts);
        round_report.attack_success_rate =
            phase.judge_pass_count == 0
                ? 0.0
                : static_cast<double>(phase.attack_success_count) /
                      static_cast<double>(phase.judge_pass_count);
        round_report.bad_case_count = state.collected.bad_cases.size();
        round_report.mean_diversity_bonus = phase.mean_diversity_bonus;
        round_report.final_mean_reward = phase.final_mean_reward;

        bool measurable =
            std::holds_alternative<config::SimulatedAttacker>(config.attacker);
        if (measurable)
            round_report.defender_failure_before = measure_defender_failure(
                state.attacker_params, state.collected.attacker_train,
                state.defender, config, round_index);

        defender_phase(state, config, seeds, warnings);
        if (out_dir)
            save_checkpoint(*out_dir / ("checkpoint_round_" + std::to_string(k) +
                                        "_defender.json"),
                            state);

        if (measurable)
            round_report.defender_failure_after = measure_defender_failure(
                state.attacker_params, state.collected.attacker_train,
                state.defender, config, round_index);

        report.per_round.push_back(std::move(round_report));
    }

    if (out_dir) {
        write_run_log(*out_dir / "run_log.jsonl", run_log);
        std::ofstream out(*out_dir / "report.json");
        if (!out)
            throw std::runtime_error("cannot write report under " +
                                     out_dir->string());
        out << report_to_json(report).dump(2) << '\n';
    }
    return report;
}

void save_checkpoint(const std::filesystem::path& path, const LoopState& state) {
    json bad_cases = json::array();
    for (const auto& record : state.collected.bad_cases)
        bad_cases.push_back(game::bad_case_to_json(record));
    json value{
        {"version", 1},
        {"round", state.round},
        {"timestep", state.timestep},
        {"policy",
         {{"theta", state.attacker_params.theta},
          {"temperature", state.attacker_params.temperature}}},
        {"defender", config::defender_backend_to_json(state.defender)},
        {"reward_history",
         {{"per_timestep_mean", state.reward_history.per_timestep_mean},
          {"window", state.reward_history.window},
          {"epsilon", state.reward_history.epsilon}}},
        {"bad_cases", std::move(bad_cases)}};
    std::ofstream out(path);
    if (!out)
        throw std::runtime_error("cannot write checkpoint: " + path.string());
    out << value.dump(2) << '\n';
}

LoopState load_checkpoint(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("cannot open checkpoint: " + path.string());
    json value;
    try {
        value = json::parse(in);
    } catch (const json::parse_error& e) {
        throw std::runtime_error("checkpoint " + path.string() +
                                 " is not valid JSON: " + e.what());
    }
    if (value.value("version", 0) != 1)
        throw std::runtime_error("checkpoint " + path.string() +
                                 " has unsupported version");
    LoopState state;
    try {
        state.round = value.at("round").get<int>();
        state.timestep = value.at("timestep").get<int>();
        const json& policy = value.at("policy");
        state.attacker_params.theta =
            policy.at("theta").get<std::vector<double>>();
        state.attacker_params.temperature =
            policy.at("temperature").get<double>();
        state.defender =
            config::defender_backend_from_json(value.at("defender"), "defender");
        const json& history = value.at("reward_history");
        state.reward_history.per_timestep_mean =
            history.at("per_timestep_mean").get<std::vector<double>>();
        state.reward_history.window = history.at("window").get<int>();
        state.reward_history.epsilon = history.at("epsilon").get<double>();
        for (const json& record : value.at("bad_cases"))
            state.collected.bad_cases.push_back(game::bad_case_from_json(record));
    } catch (const json::exception& e) {
        throw std::runtime_error("checkpoint " + path.string() +
                                 " is malformed: " + e.what());
    }
    rewriter::validate_params(state.attacker_params);
    return state;
}

EvalReport evaluate(const defender::DefenderBackend& defender_backend,
                    std::span<const corpus::SeedRecord> eval_set) {
    EvalReport report;
    for (corpus::EvalCategory category :
         {corpus::EvalCategory::non_live, corpus::EvalCategory::live,
          corpus::EvalCategory::relevance, corpus::EvalCategory::irrelevance})
        report.categories[corpus::to_string(category)] = CategoryMetric{};

    for (const auto& record : eval_set) {
        if (!record.category.has_value())
            throw std::invalid_argument("evaluation record '" + record.id +
                                        "' has no category tag");
        callspec::CanonicalAnswer answer = defender::respond_to_text(
            defender_backend, record.query, {}, record, fnv1a64(record.id));
        bool correct = false;
        switch (*record.category) {
            case corpus::EvalCategory::non_live:
            case corpus::EvalCategory::live:
                correct = callspec::answers_equal(answer, record.answer);
                break;
            case corpus::EvalCategory::relevance:
                correct = !answer.refusal && !answer.calls.empty();
                break;
            case corpus::EvalCategory::irrelevance:
                correct = answer.refusal;
                break;
        }
        CategoryMetric& metric =
            report.categories[corpus::to_string(*record.category)];
        ++metric.total;
        ++report.total;
        if (correct) {
            ++metric.correct;
            ++report.correct;
        }
    }

    for (auto& [name, metric] : report.categories) {
        (void)name;
        if (metric.total > 0)
            metric.accuracy = static_cast<double>(metric.correct) /
                              static_cast<double>(metric.total);
    }
    if (report.total > 0)
        report.overall = static_cast<double>(report.correct) /
                         static_cast<double>(report.total);
    return report;
}

json eval_report_to_json(const EvalReport& report) {
    json categories = json::object();
    for (const auto& [name, metric] : report.categories) {
        json entry{{"total", metric.total}, {"correct", metric.correct}};
        entry["accuracy"] =
            metric.accuracy.has_value() ? json(*metric.accuracy) : json(nullptr);
        categories[name] = std::move(entry);
    }
    json value{{"categories", std::move(categories)},
               {"total", report.total},
               {"correct", report.correct}};
    value["overall"] =
        report.overall.has_value() ? json(*report.overall) : json(nullptr);
    return value;
}

}  // namespace fcarena::arena

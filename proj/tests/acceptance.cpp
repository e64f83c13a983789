// Acceptance checks for the adversarial rewrite arena. Each criterion
// prints exactly one [PASS]/[FAIL] line; the process exits nonzero when
// any criterion fails.
#include <unistd.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "fcarena/arena.hpp"
#include "fcarena/callspec.hpp"
#include "fcarena/config.hpp"
#include "fcarena/corpus.hpp"
#include "fcarena/diversity.hpp"
#include "fcarena/game.hpp"
#include "fcarena/optim.hpp"
#include "fcarena/rewriter.hpp"
#include "fcarena/rng.hpp"
#include "fixtures.hpp"

using namespace fcarena;
using callspec::CanonicalAnswer;
using callspec::CanonicalCall;
using callspec::json;

namespace {

// Pinned tolerances and thresholds.
constexpr double kDiversityTol = 1e-12;
constexpr double kPerSampleTol = 1e-12;
constexpr double kEnumGradTol = 1e-10;
constexpr double kFdGradTol = 1e-5;
constexpr double kMcRelTol = 0.02;
constexpr std::size_t kMcSamples = 100000;
constexpr double kConvergenceMass = 0.8;
constexpr int kConvergenceSteps = 500;
constexpr double kHardeningDrop = 0.30;
constexpr int kSeedTrials = 5;
constexpr int kSeedSuccesses = 4;
constexpr std::size_t kFuzzSamples = 10000;
constexpr std::size_t kOracleCases = 200;

struct Checker {
    std::vector<std::string> failures;
    void expect(bool ok, const std::string& what) {
        if (!ok) failures.push_back(what);
    }
};

std::string fmt(double value) {
    char buffer[64];
    std::snprintf(buffer, sizeof buffer, "%.6g", value);
    return buffer;
}

std::string slurp(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

defender::WeaknessProfile canonical_profile() {
    defender::WeaknessProfile profile;
    for (const auto& info : rewriter::operator_table())
        profile.failure_prob[info.name] =
            info.op == rewriter::RewriteOp::unit_shift ? 0.9 : 0.05;
    profile.base_failure = 0.0;
    profile.rng_seed = 7;
    return profile;
}

// ---- criterion 1: reward truth tables and zero-sum coupling ----

arbiter::JudgeVerdict verdict_of(bool stage1, bool stage2) {
    arbiter::JudgeVerdict verdict;
    verdict.stage1_pass = stage1;
    verdict.stage2_valid = stage2;
    verdict.r_judge = (stage1 && stage2) ? 1 : -1;
    return verdict;
}

CanonicalAnswer call_answer(const std::string& tool, int value) {
    CanonicalCall call;
    call.tool_name = tool;
    call.arguments = callspec::canonicalize_value(json{{"v", value}});
    return CanonicalAnswer::make_calls({call});
}

void check_rewards(Checker& check) {
    std::vector<CanonicalAnswer> pool{
        call_answer("set_timer", 30), call_answer("set_timer", 30),
        call_answer("set_timer", 31), call_answer("get_forecast", 30),
        CanonicalAnswer::make_refusal()};

    for (bool stage1 : {false, true}) {
        for (bool stage2 : {false, true}) {
            auto verdict = verdict_of(stage1, stage2);
            for (const auto& y : pool) {
                for (const auto& y_hat : pool) {
                    bool equal = callspec::answers_equal(y, y_hat);
                    int expected_adv =
                        (verdict.r_judge == 1 && !equal) ? 1 : -1;
                    auto attack = game::adversarial_reward(verdict, y, y_hat);
                    auto defense = game::defense_reward(y, y_hat);
                    check.expect(attack.r_adv == expected_adv,
                                 "attacker reward truth table violated");
                    check.expect(defense.r_f == (equal ? 1 : -1),
                                 "defender reward truth table violated");
                    check.expect(game::is_bad_case(attack) ==
                                     (expected_adv == 1),
                                 "bad-case predicate mismatch");
                }
            }
        }
    }

    Rng rng(42);
    for (std::size_t i = 0; i < kFuzzSamples; ++i) {
        auto verdict = verdict_of(rng.next_below(2) == 1, rng.next_below(2) == 1);
        const auto& y = pool[rng.next_below(pool.size())];
        const auto& y_hat = pool[rng.next_below(pool.size())];
        auto attack = game::adversarial_reward(verdict, y, y_hat);
        auto defense = game::defense_reward(y, y_hat);
        if (verdict.r_judge == 1)
            check.expect(attack.r_adv == -defense.r_f,
                         "zero-sum coupling violated on a judge-valid outcome");
    }
}

// ---- criterion 2: diversity bonus identities ----

void check_diversity(Checker& check) {
    std::vector<diversity::EmbeddingVector> dup(
        8, diversity::embed("repeat this exact sentence"));
    check.expect(diversity::batch_diversity(dup, 0.05).bonus == 0.0,
                 "duplicate batch bonus is not exactly zero");

    diversity::EmbeddingVector ex, ey;
    ex.values.assign(16, 0.0);
    ey.values.assign(16, 0.0);
    ex.values[0] = 1.0;
    ey.values[1] = 1.0;
    ex.norm = 1.0;
    ey.norm = 1.0;
    std::vector<diversity::EmbeddingVector> ortho{ex, ey};
    double bonus = diversity::batch_diversity(ortho, 0.05).bonus;
    check.expect(std::fabs(bonus - 0.05) <= kDiversityTol,
                 "orthogonal pair bonus " + fmt(bonus) + " not within " +
                     fmt(kDiversityTol) + " of 0.05");

    Rng rng(7);
    double worst = 0.0;
    for (int iter = 0; iter < 1000; ++iter) {
        std::size_t batch = 2 + rng.next_below(15);
        std::vector<diversity::EmbeddingVector> embeddings;
        for (std::size_t i = 0; i < batch; ++i) {
            std::size_t len = 3 + rng.next_below(16);
            std::string text;
            for (std::size_t k = 0; k < len; ++k)
                text += static_cast<char>('a' + rng.next_below(26));
            embeddings.push_back(diversity::embed(text, 64));
        }
        double batch_bonus = diversity::batch_diversity(embeddings, 0.05).bonus;
        double mean = 0.0;
        for (std::size_t i = 0; i < batch; ++i)
            mean += diversity::per_sample_diversity_bonus(embeddings, i, 0.05);
        mean /= static_cast<double>(batch);
        worst = std::max(worst, std::fabs(mean - batch_bonus));
    }
    check.expect(worst <= kPerSampleTol,
                 "per-sample decomposition error " + fmt(worst) + " exceeds " +
                     fmt(kPerSampleTol));
}

// ---- criterion 3: gradient correctness on the 9-operator bandit ----

void check_gradients(Checker& check) {
    auto prompt = fixtures::prompt_of(fixtures::timer_seed());
    check.expect(rewriter::context_bucket(prompt) == 0,
                 "single-call English one-tool prompt is not bucket 0");

    auto params = rewriter::uniform_params();
    const std::size_t unit =
        static_cast<std::size_t>(rewriter::RewriteOp::unit_shift);
    params.theta[unit * rewriter::kNumBuckets + 0] = 1.0;

    const std::string target = rewriter::operator_name(
        rewriter::RewriteOp::unit_shift);
    auto reward = [&](std::span<const std::string> seq) {
        return seq[0] == target ? 1.0 : 0.0;
    };

    // Independent closed form: softmax probabilities and d E[r] / d theta.
    std::vector<double> probs(rewriter::kNumOperators);
    double normalizer = 0.0;
    for (std::size_t op = 0; op < rewriter::kNumOperators; ++op) {
        probs[op] = std::exp(params.theta[op * rewriter::kNumBuckets + 0]);
        normalizer += probs[op];
    }
    for (double& p : probs) p /= normalizer;
    double expected = probs[unit];
    std::vector<double> analytic(rewriter::kThetaSize, 0.0);
    for (std::size_t op = 0; op < rewriter::kNumOperators; ++op) {
        double r = op == unit ? 1.0 : 0.0;
        analytic[op * rewriter::kNumBuckets + 0] = probs[op] * (r - expected);
    }

    auto enumerated = optim::enumerated_expected_reward_gradient(
        params, prompt, reward, 1);
    double enum_err = 0.0;
    for (std::size_t i = 0; i < analytic.size(); ++i)
        enum_err = std::max(enum_err, std::fabs(enumerated[i] - analytic[i]));
    check.expect(enum_err <= kEnumGradTol,
                 "enumerated gradient deviates from closed form by " +
                     fmt(enum_err));

    double fd_err = optim::finite_difference_check(
        params,
        [&](const rewriter::PolicyParams& p) {
            return optim::enumerated_expected_reward(p, prompt, reward, 1);
        },
        analytic);
    check.expect(fd_err <= kFdGradTol,
                 "finite-difference relative error " + fmt(fd_err));

    std::vector<double> mc(rewriter::kThetaSize, 0.0);
    for (std::size_t i = 0; i < kMcSamples; ++i) {
        auto rewritten = rewriter::sample_rewrite(params, prompt, i, 1);
        if (reward(rewritten.actions) == 0.0) continue;
        auto grad = rewriter::logprob_gradient(params, prompt, rewritten.actions);
        for (std::size_t k = 0; k < mc.size(); ++k) mc[k] += grad[k];
    }
    for (double& g : mc) g /= static_cast<double>(kMcSamples);
    double mc_err = 0.0, scale = 0.0;
    for (std::size_t i = 0; i < analytic.size(); ++i) {
        mc_err = std::max(mc_err, std::fabs(mc[i] - analytic[i]));
        scale = std::max(scale, std::fabs(analytic[i]));
    }
    check.expect(mc_err <= kMcRelTol * scale,
                 "Monte-Carlo gradient relative error " + fmt(mc_err / scale));
}

// ---- criterion 4: attacker convergence onto the weak operator ----

void check_convergence(Checker& check) {
    int successes = 0;
    std::vector<double> masses;
    for (int seed = 1; seed <= kSeedTrials; ++seed) {
        config::RunConfig config;
        config.batch_size = 32;
        config.max_timesteps = kConvergenceSteps;
        config.learning_rate = 0.1;
        config.rewrite_len = 1;
        config.window = kConvergenceSteps + 1;  // early stop disabled
        config.rng_seed = static_cast<std::uint64_t>(seed);
        config.defender = canonical_profile();

        arena::LoopState state;
        state.attacker_params = rewriter::uniform_params();
        state.defender = config.defender;
        state.collected.attacker_train = {
            fixtures::prompt_of(fixtures::timer_seed())};
        arena::attacker_phase(state, config);

        auto dist = rewriter::action_distribution(
            state.attacker_params, state.collected.attacker_train[0]);
        double mass =
            dist[static_cast<std::size_t>(rewriter::RewriteOp::unit_shift)];
        masses.push_back(mass);
        if (mass >= kConvergenceMass) ++successes;
    }
    if (successes < kSeedSuccesses) {
        std::string detail;
        for (double mass : masses) detail += " " + fmt(mass);
        check.expect(false, std::to_string(successes) + "/5 seeds reached " +
                                fmt(kConvergenceMass) + " mass; got" + detail);
    }
}

// ---- criterion 5: early stop timing ----

void check_early_stop(Checker& check) {
    optim::RewardHistory constant;
    constant.window = 10;
    constant.epsilon = 0.2;
    int fired_at = -1;
    for (int t = 1; t <= 30; ++t) {
        constant.per_timestep_mean.push_back(0.7);
        if (optim::should_stop(constant)) {
            fired_at = t;
            break;
        }
    }
    check.expect(fired_at == constant.window + 1,
                 "constant stream stopped at timestep " +
                     std::to_string(fired_at) + ", expected " +
                     std::to_string(constant.window + 1));

    optim::RewardHistory rising;
    rising.window = 10;
    rising.epsilon = 0.2;
    for (int t = 0; t < 300; ++t) {
        rising.per_timestep_mean.push_back(0.25 * t);
        check.expect(!optim::should_stop(rising),
                     "stopped despite every delta being 0.25");
    }
}

// ---- criterion 6: two-round hardening ----

void check_hardening(Checker& check, const std::filesystem::path& seeds_path) {
    int successes = 0;
    std::vector<std::string> details;
    for (int seed = 1; seed <= kSeedTrials; ++seed) {
        config::RunConfig config;
        config.seed_path = seeds_path.string();
        config.rounds = 2;
        config.batch_size = 32;
        config.max_timesteps = 150;
        config.learning_rate = 0.1;
        config.eta = 0.1;
        config.window = 10;
        config.epsilon = 0.2;
        config.eval_trials = 512;
        config.rng_seed = static_cast<std::uint64_t>(seed);
        config.defender = canonical_profile();

        arena::RunReport report = arena::run(config);
        const auto& first = report.per_round.at(0);
        const auto& second = report.per_round.at(1);
        double before = first.defender_failure_before.value_or(0.0);
        double after = first.defender_failure_after.value_or(1.0);
        bool dropped =
            before > 0.0 && (before - after) / before >= kHardeningDrop;
        bool weakened = second.attack_success_rate < first.attack_success_rate;
        if (dropped && weakened) ++successes;
        details.push_back("seed " + std::to_string(seed) + ": failure " +
                          fmt(before) + "->" + fmt(after) + ", success " +
                          fmt(first.attack_success_rate) + "->" +
                          fmt(second.attack_success_rate));
    }
    if (successes < kSeedSuccesses) {
        std::string joined;
        for (const auto& d : details) joined += "; " + d;
        check.expect(false, std::to_string(successes) +
                                "/5 seeds hardened" + joined);
    }
}

// ---- criterion 7: curriculum parallel fraction ----

void check_curriculum(Checker& check) {
    corpus::CurriculumSchedule schedule;
    corpus::CurriculumMix first;
    first.fractions = {{corpus::Complexity::single, 1.0}};
    first.count = 40;
    corpus::CurriculumMix second;
    second.fractions = {{corpus::Complexity::single, 0.7},
                        {corpus::Complexity::parallel, 0.3}};
    second.count = 100;
    schedule.rounds = {first, second};

    std::vector<corpus::SeedRecord> seeds{
        fixtures::timer_seed(), fixtures::weather_seed(),
        fixtures::parallel_seed()};
    auto prompts = corpus::compose_round_dataset(seeds, schedule, 1, 99);
    check.expect(prompts.size() == 100, "round-2 dataset size is not 100");
    std::size_t parallel = 0;
    for (const auto& prompt : prompts)
        if (prompt.source.complexity == corpus::Complexity::parallel)
            ++parallel;
    double drift = std::fabs(static_cast<double>(parallel) - 30.0);
    check.expect(drift <= 1.0, "parallel quota " + std::to_string(parallel) +
                                   " not within 1 of 30");
}

// ---- criterion 8: answer equality vs brute-force oracle ----

json oracle_normalize(const json& value) {
    if (value.is_object()) {
        json out = json::object();
        for (const auto& item : value.items())
            out[item.key()] = oracle_normalize(item.value());
        return out;
    }
    if (value.is_array()) {
        json out = json::array();
        for (const auto& item : value) out.push_back(oracle_normalize(item));
        return out;
    }
    if (value.is_number_float()) {
        double d = value.get<double>();
        double rounded = std::nearbyint(d);
        if (std::fabs(d - rounded) <= 1e-9 && std::fabs(d) < 1e15)
            return static_cast<std::int64_t>(rounded);
        return d;
    }
    if (value.is_string()) {
        std::string s = value.get<std::string>();
        auto begin = s.find_first_not_of(" \t\r\n");
        auto end = s.find_last_not_of(" \t\r\n");
        if (begin == std::string::npos) return std::string();
        return s.substr(begin, end - begin + 1);
    }
    return value;
}

bool oracle_equal(const std::string& text_a, const std::string& text_b) {
    json a = json::parse(text_a);
    json b = json::parse(text_b);
    bool refusal_a = a.value("refusal", false);
    bool refusal_b = b.value("refusal", false);
    if (refusal_a || refusal_b) return refusal_a == refusal_b;
    auto signature = [](const json& doc) {
        std::vector<std::string> keys;
        for (const auto& call : doc.at("calls"))
            keys.push_back(oracle_normalize(call).dump());
        std::sort(keys.begin(), keys.end());
        std::string joined;
        for (const auto& key : keys) joined += key + "\xff";
        return joined;
    };
    return signature(a) == signature(b);
}

template <typename T>
void shuffle_vec(std::vector<T>& values, Rng& rng) {
    for (std::size_t i = values.size(); i > 1; --i)
        std::swap(values[i - 1], values[rng.next_below(i)]);
}

std::string dump_value_variant(const json& value, Rng& rng) {
    if (value.is_object()) {
        std::vector<std::string> keys;
        for (const auto& item : value.items()) keys.push_back(item.key());
        shuffle_vec(keys, rng);
        std::string out = "{";
        for (std::size_t i = 0; i < keys.size(); ++i) {
            if (i > 0) out += ",";
            out += json(keys[i]).dump() + ":" +
                   dump_value_variant(value.at(keys[i]), rng);
        }
        return out + "}";
    }
    if (value.is_array()) {
        std::string out = "[";
        for (std::size_t i = 0; i < value.size(); ++i) {
            if (i > 0) out += ",";
            out += dump_value_variant(value[i], rng);
        }
        return out + "]";
    }
    if (value.is_number_integer()) {
        auto n = value.get<std::int64_t>();
        switch (rng.next_below(3)) {
            case 0: return std::to_string(n);
            case 1: return std::to_string(n) + ".0";
            default: return std::to_string(n) + "e0";
        }
    }
    if (value.is_number_float()) {
        char buffer[64];
        std::snprintf(buffer, sizeof buffer, "%.17g", value.get<double>());
        return buffer;
    }
    if (value.is_string() && rng.next_below(3) == 0)
        return json(" " + value.get<std::string>() + "  ").dump();
    return value.dump();
}

std::string dump_answer_variant(const CanonicalAnswer& answer, Rng& rng) {
    if (answer.refusal) return R"({"refusal":true})";
    std::vector<json> calls;
    for (const auto& call : answer.calls)
        calls.push_back(json{{"name", call.tool_name},
                             {"arguments", call.arguments}});
    shuffle_vec(calls, rng);
    std::string out = R"({"calls":[)";
    for (std::size_t i = 0; i < calls.size(); ++i) {
        if (i > 0) out += ",";
        out += dump_value_variant(calls[i], rng);
    }
    return out + "]}";
}

json random_argument(Rng& rng, int depth) {
    switch (rng.next_below(depth == 0 ? 7 : 5)) {
        case 0:
            return static_cast<std::int64_t>(rng.next_below(2000)) - 1000;
        case 1:
            return static_cast<double>(rng.next_below(50));  // integral float
        case 2:
            return 0.125 + 0.25 * static_cast<double>(rng.next_below(40));
        case 3:
            return "value_" + std::to_string(rng.next_below(10));
        case 4:
            return rng.next_below(2) == 0;
        case 5: {
            json nested = json::object();
            nested["inner_" + std::to_string(rng.next_below(3))] =
                random_argument(rng, 1);
            return nested;
        }
        default: {
            json items = json::array();
            std::size_t len = 1 + rng.next_below(3);
            for (std::size_t i = 0; i < len; ++i)
                items.push_back(random_argument(rng, 1));
            return items;
        }
    }
}

CanonicalAnswer random_answer(Rng& rng) {
    if (rng.next_below(10) == 0) return CanonicalAnswer::make_refusal();
    static const char* kTools[] = {"alpha_tool", "beta_tool", "gamma_tool"};
    static const char* kKeys[] = {"a", "b", "c", "city", "days", "flag"};
    std::vector<CanonicalCall> calls;
    std::size_t call_count = 1 + rng.next_below(3);
    for (std::size_t i = 0; i < call_count; ++i) {
        CanonicalCall call;
        call.tool_name = kTools[rng.next_below(3)];
        json arguments = json::object();
        std::size_t arg_count = 1 + rng.next_below(4);
        for (std::size_t k = 0; k < arg_count; ++k)
            arguments[kKeys[rng.next_below(6)]] = random_argument(rng, 0);
        call.arguments = callspec::canonicalize_value(arguments);
        calls.push_back(std::move(call));
    }
    return CanonicalAnswer::make_calls(std::move(calls));
}

CanonicalAnswer mutate_answer(CanonicalAnswer answer, Rng& rng) {
    if (answer.refusal) return call_answer("alpha_tool", 1);
    switch (rng.next_below(4)) {
        case 0:
            answer.calls[rng.next_below(answer.calls.size())].tool_name +=
                "_alt";
            return answer;
        case 1:
            if (answer.calls.size() >= 2) {
                answer.calls.pop_back();
                return answer;
            }
            [[fallthrough]];
        case 2:
            answer.calls.push_back(answer.calls[0]);
            return answer;
        default:
            answer.calls[0].arguments["zz_extra"] = 1;
            return answer;
    }
}

void check_oracle(Checker& check) {
    Rng rng(2024);
    for (std::size_t i = 0; i < kOracleCases; ++i) {
        CanonicalAnswer answer = random_answer(rng);
        std::string text_a = callspec::answer_to_json(answer).dump();
        std::string text_b = dump_answer_variant(answer, rng);
        std::string text_c =
            callspec::answer_to_json(mutate_answer(answer, rng)).dump();

        bool impl_same = callspec::answers_equal(callspec::parse_answer(text_a),
                                                 callspec::parse_answer(text_b));
        bool oracle_same = oracle_equal(text_a, text_b);
        check.expect(impl_same == oracle_same,
                     "variant disagreement on case " + std::to_string(i));
        check.expect(impl_same, "variant pair not equal on case " +
                                    std::to_string(i) + ": " + text_b);

        bool impl_diff = callspec::answers_equal(callspec::parse_answer(text_a),
                                                 callspec::parse_answer(text_c));
        bool oracle_diff = oracle_equal(text_a, text_c);
        check.expect(impl_diff == oracle_diff,
                     "mutation disagreement on case " + std::to_string(i));
        check.expect(!impl_diff, "mutated pair counted equal on case " +
                                     std::to_string(i));
    }
}

// ---- criterion 9: byte-identical reruns ----

void check_determinism(Checker& check, const std::filesystem::path& seeds_path,
                       const std::filesystem::path& scratch) {
    config::RunConfig config;
    config.seed_path = seeds_path.string();
    config.rounds = 2;
    config.batch_size = 8;
    config.max_timesteps = 25;
    config.window = 10;
    config.epsilon = 0.2;
    config.eval_trials = 64;
    config.rng_seed = 17;
    config.defender = canonical_profile();

    auto dir_a = scratch / "determinism_a";
    auto dir_b = scratch / "determinism_b";
    arena::RunReport report_a = arena::run(config, dir_a);
    arena::RunReport report_b = arena::run(config, dir_b);

    check.expect(arena::report_to_json(report_a) ==
                     arena::report_to_json(report_b),
                 "reports differ between identical runs");
    for (const char* name :
         {"report.json", "run_log.jsonl", "bad_cases_round_0.jsonl",
          "bad_cases_round_1.jsonl", "checkpoint_round_0_attacker.json",
          "checkpoint_round_0_defender.json", "checkpoint_round_1_attacker.json",
          "checkpoint_round_1_defender.json"}) {
        std::string body_a = slurp(dir_a / name);
        check.expect(!body_a.empty(), std::string(name) + " is empty or missing");
        check.expect(body_a == slurp(dir_b / name),
                     std::string(name) + " differs between identical runs");
    }
}

}  // namespace

int main() {
    auto scratch = std::filesystem::temp_directory_path() /
                   ("fcarena-acceptance-" + std::to_string(getpid()));
    std::filesystem::create_directories(scratch);
    auto seeds_path = scratch / "seeds.jsonl";
    {
        std::vector<corpus::SeedRecord> seeds{
            fixtures::timer_seed(), fixtures::weather_seed(),
            fixtures::parallel_seed(), fixtures::refusal_seed()};
        corpus::save_seed_dataset(seeds_path, seeds);
    }

    struct Criterion {
        const char* name;
        double budget_seconds;  // 0 = no stated budget
        std::function<void(Checker&)> fn;
    };
    std::vector<Criterion> criteria{
        {"reward truth tables and zero-sum fuzz (10k samples)", 5.0,
         check_rewards},
        {"diversity bonus: duplicates, orthogonal pair, per-sample identity",
         10.0, check_diversity},
        {"policy gradient vs closed form, finite differences, Monte Carlo",
         60.0, check_gradients},
        {"attacker convergence onto the weak operator (4/5 seeds)", 120.0,
         check_convergence},
        {"early stop fires at window+1 and never on large deltas", 1.0,
         check_early_stop},
        {"two-round hardening: failure drop >= 30% and weaker round 2 (4/5 "
         "seeds)",
         300.0,
         [&](Checker& check) { check_hardening(check, seeds_path); }},
        {"curriculum: round-2 parallel fraction within one record", 0.0,
         check_curriculum},
        {"answer equality agrees with a brute-force oracle (200 cases)", 5.0,
         check_oracle},
        {"byte-identical artifacts across identical runs", 0.0,
         [&](Checker& check) { check_determinism(check, seeds_path, scratch); }},
    };

    bool all_ok = true;
    for (const auto& criterion : criteria) {
        auto start = std::chrono::steady_clock::now();
        Checker check;
        std::string thrown;
        try {
            criterion.fn(check);
        } catch (const std::exception& e) {
            thrown = e.what();
        }
        double seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                          start)
                .count();
        if (criterion.budget_seconds > 0.0 && seconds > criterion.budget_seconds)
            check.expect(false, "runtime " + fmt(seconds) + "s exceeds budget " +
                                    fmt(criterion.budget_seconds) + "s");
        bool ok = thrown.empty() && check.failures.empty();
        all_ok = all_ok && ok;
        std::string detail;
        if (!thrown.empty())
            detail = " -- exception: " + thrown;
        else if (!check.failures.empty())
            detail = " -- " + check.failures.front();
        std::printf("[%s] %s (%.2fs)%s\n", ok ? "PASS" : "FAIL", criterion.name,
                    seconds, detail.c_str());
    }

    std::error_code ec;
    std::filesystem::remove_all(scratch, ec);
    return all_ok ? 0 : 1;
}

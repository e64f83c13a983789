#include "fcarena/config.hpp"

#include <cmath>
#include <fstream>

namespace fcarena::config {

using callspec::json;

namespace {

[[noreturn]] void fail(const std::string& what, const std::string& path) {
    throw ConfigError(what, path);
}

const json& member(const json& obj, const char* key, const std::string& path) {
    auto it = obj.find(key);
    if (it == obj.end()) fail("missing field", path);
    return *it;
}

template <typename T>
T get_as(const json& obj, const char* key, const std::string& path, T fallback) {
    auto it = obj.find(key);
    if (it == obj.end()) return fallback;
    try {
        return it->get<T>();
    } catch (const json::exception&) {
        fail("wrong type", path);
    }
}

wire::EndpointConfig endpoint_from_json(const json& value,
                                        const std::string& path) {
    if (!value.is_object()) fail("endpoint must be an object", path);
    wire::EndpointConfig endpoint;
    endpoint.base_url =
        get_as<std::string>(value, "base_url", path + ".base_url", "");
    if (endpoint.base_url.empty()) fail("missing field", path + ".base_url");
    endpoint.model = get_as<std::string>(value, "model", path + ".model", "");
    endpoint.token_env =
        get_as<std::string>(value, "token_env", path + ".token_env", "");
    endpoint.chat_path = get_as<std::string>(value, "chat_path",
                                             path + ".chat_path",
                                             endpoint.chat_path);
    endpoint.embed_path = get_as<std::string>(value, "embed_path",
                                              path + ".embed_path",
                                              endpoint.embed_path);
    endpoint.timeout_ms =
        get_as<int>(value, "timeout_ms", path + ".timeout_ms", endpoint.timeout_ms);
    endpoint.max_retries = get_as<int>(value, "max_retries",
                                       path + ".max_retries",
                                       endpoint.max_retries);
    if (endpoint.timeout_ms <= 0) fail("must be positive", path + ".timeout_ms");
    if (endpoint.max_retries < 0) fail("must be >= 0", path + ".max_retries");
    if (auto it = value.find("sampling"); it != value.end()) {
        if (!it->is_object()) fail("must be an object", path + ".sampling");
        endpoint.sampling = *it;
    }
    return endpoint;
}

json endpoint_to_json(const wire::EndpointConfig& endpoint) {
    json value{{"base_url", endpoint.base_url},
               {"model", endpoint.model},
               {"chat_path", endpoint.chat_path},
               {"embed_path", endpoint.embed_path},
               {"timeout_ms", endpoint.timeout_ms},
               {"max_retries", endpoint.max_retries}};
    if (!endpoint.token_env.empty()) value["token_env"] = endpoint.token_env;
    if (!endpoint.sampling.empty()) value["sampling"] = endpoint.sampling;
    return value;
}

std::string block_mode(const json& block, const std::string& path) {
    if (!block.is_object()) fail("backend block must be an object", path);
    std::string mode = get_as<std::string>(block, "mode", path + ".mode", "");
    if (mode != "simulated" && mode != "external")
        fail("mode must be \"simulated\" or \"external\"", path + ".mode");
    return mode;
}

arbiter::ValidationRules rules_from_json(const json& block,
                                         const std::string& path) {
    arbiter::ValidationRules rules;
    if (auto it = block.find("assistant_patterns"); it != block.end()) {
        if (!it->is_array()) fail("must be an array", path + ".assistant_patterns");
        rules.assistant_patterns = it->get<std::vector<std::string>>();
    }
    rules.check_required_mentions =
        get_as<bool>(block, "check_required_mentions",
                     path + ".check_required_mentions",
                     rules.check_required_mentions);
    return rules;
}

json rules_to_json(const arbiter::ValidationRules& rules) {
    return json{{"assistant_patterns", rules.assistant_patterns},
                {"check_required_mentions", rules.check_required_mentions}};
}

defender::WeaknessProfile profile_from_json(const json& block,
                                            const std::string& path) {
    defender::WeaknessProfile profile;
    if (auto it = block.find("failure_prob"); it != block.end()) {
        if (!it->is_object()) fail("must be an object", path + ".failure_prob");
        for (const auto& [op, p] : it->items()) {
            if (!p.is_number())
                fail("must be a number", path + ".failure_prob." + op);
            profile.failure_prob[op] = p.get<double>();
        }
    }
    profile.base_failure = get_as<double>(block, "base_failure",
                                          path + ".base_failure",
                                          profile.base_failure);
    profile.rng_seed = get_as<std::uint64_t>(block, "rng_seed",
                                             path + ".rng_seed",
                                             profile.rng_seed);
    std::string composition =
        get_as<std::string>(block, "composition", path + ".composition",
                            "independent");
    if (composition == "independent") {
        profile.composition = defender::FailureComposition::independent;
    } else if (composition == "max") {
        profile.composition = defender::FailureComposition::max_probability;
    } else {
        fail("must be \"independent\" or \"max\"", path + ".composition");
    }
    try {
        defender::validate_profile(profile);
    } catch (const std::invalid_argument& e) {
        fail(e.what(), path);
    }
    return profile;
}

json profile_to_json(const defender::WeaknessProfile& profile) {
    json failure = json::object();
    for (const auto& [op, p] : profile.failure_prob) failure[op] = p;
    return json{
        {"failure_prob", std::move(failure)},
        {"base_failure", profile.base_failure},
        {"rng_seed", profile.rng_seed},
        {"composition",
         profile.composition == defender::FailureComposition::independent
             ? "independent"
             : "max"}};
}

corpus::CurriculumSchedule curriculum_from_json(const json& value,
                                                const std::string& path) {
    if (!value.is_array()) fail("must be an array of round mixes", path);
    corpus::CurriculumSchedule schedule;
    std::size_t index = 0;
    for (const json& round : value) {
        std::string round_path = path + "[" + std::to_string(index++) + "]";
        if (!round.is_object()) fail("must be an object", round_path);
        corpus::CurriculumMix mix;
        mix.count = get_as<std::size_t>(round, "count", round_path + ".count", 0);
        const json& fractions =
            member(round, "fractions", round_path + ".fractions");
        if (!fractions.is_object())
            fail("must be an object", round_path + ".fractions");
        for (const auto& [name, fraction] : fractions.items()) {
            auto complexity = corpus::complexity_from_string(name);
            if (!complexity)
                fail("unknown complexity", round_path + ".fractions." + name);
            if (!fraction.is_number())
                fail("must be a number", round_path + ".fractions." + name);
            mix.fractions[*complexity] = fraction.get<double>();
        }
        schedule.rounds.push_back(std::move(mix));
    }
    try {
        corpus::validate_schedule(schedule);
    } catch (const std::invalid_argument& e) {
        fail(e.what(), path);
    }
    return schedule;
}

json curriculum_to_json(const corpus::CurriculumSchedule& schedule) {
    json rounds = json::array();
    for (const auto& mix : schedule.rounds) {
        json fractions = json::object();
        for (const auto& [complexity, fraction] : mix.fractions)
            fractions[corpus::to_string(complexity)] = fraction;
        rounds.push_back(
            {{"count", mix.count}, {"fractions", std::move(fractions)}});
    }
    return rounds;
}

}  // namespace

void validate_config(const RunConfig& config) {
    if (config.version != 1)
        throw ConfigError("unsupported version " + std::to_string(config.version),
                          "version");
    if (config.rounds < 0) throw ConfigError("must be >= 0", "rounds");
    if (config.batch_size < 2)
        throw ConfigError("must be >= 2 (diversity needs pairs)", "batch_size");
    if (config.max_timesteps < 0)
        throw ConfigError("must be >= 0", "max_timesteps");
    if (config.rewrite_len < 1) throw ConfigError("must be >= 1", "rewrite_len");
    if (config.alpha < 0.0 || !std::isfinite(config.alpha))
        throw ConfigError("must be >= 0", "alpha");
    if (!(config.epsilon > 0.0) || !std::isfinite(config.epsilon))
        throw ConfigError("must be > 0", "epsilon");
    if (config.window < 2) throw ConfigError("must be >= 2", "window");
    if (!(config.learning_rate > 0.0) || !std::isfinite(config.learning_rate))
        throw ConfigError("must be > 0", "learning_rate");
    if (!(config.eta > 0.0) || !(config.eta < 1.0))
        throw ConfigError("must lie in (0, 1)", "eta");
    if (!(config.clip_ratio > 0.0))
        throw ConfigError("must be > 0", "clip_ratio");
    if (config.defender_train_mix < 0.0)
        throw ConfigError("must be >= 0", "defender_train_mix");
    if (config.eval_trials < 1) throw ConfigError("must be >= 1", "eval_trials");
    if (!config.curriculum.rounds.empty()) {
        try {
            corpus::validate_schedule(config.curriculum);
        } catch (const std::invalid_argument& e) {
            throw ConfigError(e.what(), "curriculum");
        }
    }
}

RunConfig config_from_json(const json& value) {
    if (!value.is_object()) throw ConfigError("config must be a JSON object", "");
    RunConfig config;
    config.version = get_as<int>(value, "version", "version", config.version);
    config.seed_path =
        get_as<std::string>(value, "seed_path", "seed_path", config.seed_path);
    config.rounds = get_as<int>(value, "rounds", "rounds", config.rounds);
    config.batch_size =
        get_as<int>(value, "batch_size", "batch_size", config.batch_size);
    config.max_timesteps = get_as<int>(value, "max_timesteps", "max_timesteps",
                                       config.max_timesteps);
    config.rewrite_len =
        get_as<int>(value, "rewrite_len", "rewrite_len", config.rewrite_len);
    config.alpha = get_as<double>(value, "alpha", "alpha", config.alpha);
    config.epsilon = get_as<double>(value, "epsilon", "epsilon", config.epsilon);
    config.window = get_as<int>(value, "window", "window", config.window);
    config.learning_rate = get_as<double>(value, "learning_rate",
                                          "learning_rate", config.learning_rate);
    config.eta = get_as<double>(value, "eta", "eta", config.eta);
    std::string optimizer =
        get_as<std::string>(value, "optimizer", "optimizer", "reinforce");
    if (optimizer == "reinforce") {
        config.optimizer = Optimizer::reinforce;
    } else if (optimizer == "clipped") {
        config.optimizer = Optimizer::clipped;
    } else {
        fail("must be \"reinforce\" or \"clipped\"", "optimizer");
    }
    config.clip_ratio =
        get_as<double>(value, "clip_ratio", "clip_ratio", config.clip_ratio);
    std::string update =
        get_as<std::string>(value, "defender_update", "defender_update", "rl");
    if (update == "rl") {
        config.defender_update = DefenderUpdate::rl;
    } else if (update == "sft") {
        config.defender_update = DefenderUpdate::sft;
    } else {
        fail("must be \"rl\" or \"sft\"", "defender_update");
    }
    config.defender_train_mix =
        get_as<double>(value, "defender_train_mix", "defender_train_mix",
                       config.defender_train_mix);
    config.dedup_bad_cases = get_as<bool>(value, "dedup_bad_cases",
                                          "dedup_bad_cases",
                                          config.dedup_bad_cases);
    config.accumulate_bad_cases =
        get_as<bool>(value, "accumulate_bad_cases", "accumulate_bad_cases",
                     config.accumulate_bad_cases);
    config.eval_trials =
        get_as<int>(value, "eval_trials", "eval_trials", config.eval_trials);
    config.rng_seed =
        get_as<std::uint64_t>(value, "rng_seed", "rng_seed", config.rng_seed);

    if (auto it = value.find("curriculum"); it != value.end())
        config.curriculum = curriculum_from_json(*it, "curriculum");

    if (auto it = value.find("attacker"); it != value.end()) {
        std::string mode = block_mode(*it, "attacker");
        if (mode == "simulated") {
            SimulatedAttacker attacker;
            attacker.temperature = get_as<double>(*it, "temperature",
                                                  "attacker.temperature",
                                                  attacker.temperature);
            if (!(attacker.temperature > 0.0))
                fail("must be > 0", "attacker.temperature");
            config.attacker = attacker;
        } else {
            config.attacker =
                endpoint_from_json(member(*it, "endpoint", "attacker.endpoint"),
                                   "attacker.endpoint");
        }
    }

    if (auto it = value.find("judge"); it != value.end()) {
        std::string mode = block_mode(*it, "judge");
        if (mode == "simulated") {
            arbiter::SimulatedJudge judge;
            judge.rules = rules_from_json(*it, "judge");
            config.judge = judge;
        } else {
            arbiter::ExternalJudge judge;
            judge.stage1_endpoint = endpoint_from_json(
                member(*it, "stage1_endpoint", "judge.stage1_endpoint"),
                "judge.stage1_endpoint");
            if (auto s2 = it->find("stage2_endpoint"); s2 != it->end())
                judge.stage2_endpoint =
                    endpoint_from_json(*s2, "judge.stage2_endpoint");
            judge.stage2_prompt = get_as<std::string>(*it, "stage2_prompt",
                                                      "judge.stage2_prompt",
                                                      judge.stage2_prompt);
            judge.rules = rules_from_json(*it, "judge");
            config.judge = judge;
        }
    }

    if (auto it = value.find("defender"); it != value.end())
        config.defender = defender_backend_from_json(*it, "defender");

    if (auto it = value.find("embedder"); it != value.end()) {
        std::string mode = block_mode(*it, "embedder");
        if (mode == "simulated") {
            SimulatedEmbedder embedder;
            embedder.dim =
                get_as<std::size_t>(*it, "dim", "embedder.dim", embedder.dim);
            if (embedder.dim == 0) fail("must be positive", "embedder.dim");
            config.embedder = embedder;
        } else {
            config.embedder =
                endpoint_from_json(member(*it, "endpoint", "embedder.endpoint"),
                                   "embedder.endpoint");
        }
    }

    validate_config(config);
    return config;
}

json config_to_json(const RunConfig& config) {
    json value{{"version", config.version},
               {"seed_path", config.seed_path},
               {"rounds", config.rounds},
               {"batch_size", config.batch_size},
               {"max_timesteps", config.max_timesteps},
               {"rewrite_len", config.rewrite_len},
               {"alpha", config.alpha},
               {"epsilon", config.epsilon},
               {"window", config.window},
               {"learning_rate", config.learning_rate},
               {"eta", config.eta},
               {"optimizer",
                config.optimizer == Optimizer::reinforce ? "reinforce"
                                                         : "clipped"},
               {"clip_ratio", config.clip_ratio},
               {"defender_update",
                config.defender_update == DefenderUpdate::rl ? "rl" : "sft"},
               {"defender_train_mix", config.defender_train_mix},
               {"dedup_bad_cases", config.dedup_bad_cases},
               {"accumulate_bad_cases", config.accumulate_bad_cases},
               {"eval_trials", config.eval_trials},
               {"rng_seed", config.rng_seed}};
    if (!config.curriculum.rounds.empty())
        value["curriculum"] = curriculum_to_json(config.curriculum);

    if (const auto* simulated = std::get_if<SimulatedAttacker>(&config.attacker)) {
        value["attacker"] = {{"mode", "simulated"},
                             {"temperature", simulated->temperature}};
    } else {
        value["attacker"] = {
            {"mode", "external"},
            {"endpoint",
             endpoint_to_json(std::get<wire::EndpointConfig>(config.attacker))}};
    }

    if (const auto* simulated =
            std::get_if<arbiter::SimulatedJudge>(&config.judge)) {
        json block = rules_to_json(simulated->rules);
        block["mode"] = "simulated";
        value["judge"] = std::move(block);
    } else {
        const auto& external = std::get<arbiter::ExternalJudge>(config.judge);
        json block = rules_to_json(external.rules);
        block["mode"] = "external";
        block["stage1_endpoint"] = endpoint_to_json(external.stage1_endpoint);
        if (external.stage2_endpoint)
            block["stage2_endpoint"] = endpoint_to_json(*external.stage2_endpoint);
        block["stage2_prompt"] = external.stage2_prompt;
        value["judge"] = std::move(block);
    }

    value["defender"] = defender_backend_to_json(config.defender);

    if (const auto* simulated = std::get_if<SimulatedEmbedder>(&config.embedder)) {
        value["embedder"] = {{"mode", "simulated"}, {"dim", simulated->dim}};
    } else {
        value["embedder"] = {
            {"mode", "external"},
            {"endpoint",
             endpoint_to_json(std::get<wire::EndpointConfig>(config.embedder))}};
    }
    return value;
}

json defender_backend_to_json(const defender::DefenderBackend& backend) {
    if (const auto* profile = std::get_if<defender::WeaknessProfile>(&backend)) {
        json block = profile_to_json(*profile);
        block["mode"] = "simulated";
        return block;
    }
    return json{{"mode", "external"},
                {"endpoint",
                 endpoint_to_json(
                     std::get<defender::ExternalDefender>(backend).endpoint)}};
}

defender::DefenderBackend defender_backend_from_json(
    const json& value, const std::string& field_path) {
    std::string mode = block_mode(value, field_path);
    if (mode == "simulated") return profile_from_json(value, field_path);
    return defender::ExternalDefender{
        endpoint_from_json(member(value, "endpoint", field_path + ".endpoint"),
                           field_path + ".endpoint")};
}

RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config: " + path.string(), "");
    json value;
    try {
        value = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("invalid JSON: ") + e.what(), "");
    }
    return config_from_json(value);
}

corpus::CurriculumMix effective_mix(const RunConfig& config,
                                    std::size_t round_index) {
    if (!config.curriculum.rounds.empty()) {
        std::size_t index =
            std::min(round_index, config.curriculum.rounds.size() - 1);
        return config.curriculum.rounds[index];
    }
    corpus::CurriculumMix mix;
    mix.count = static_cast<std::size_t>(config.batch_size) * 2;
    if (round_index == 0) {
        mix.fractions[corpus::Complexity::single] = 1.0;
    } else {
        mix.fractions[corpus::Complexity::single] = 0.7;
        mix.fractions[corpus::Complexity::parallel] = 0.3;
    }
    return mix;
}

}  // namespace fcarena::config

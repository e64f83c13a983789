#include "fcarena/defender.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>

#include "fcarena/rng.hpp"

namespace fcarena::defender {

using callspec::CanonicalAnswer;
using callspec::CanonicalCall;
using callspec::json;

namespace {

std::set<std::string> distinct_ops(std::span<const std::string> actions) {
    std::set<std::string> ops;
    for (const std::string& name : actions) {
        if (!rewriter::operator_from_name(name))
            throw std::invalid_argument("unknown rewrite operator '" + name +
                                        "' in defender input");
        ops.insert(name);
    }
    return ops;
}

double profile_failure(const WeaknessProfile& profile, const std::string& op) {
    auto it = profile.failure_prob.find(op);
    return it == profile.failure_prob.end() ? 0.0 : it->second;
}

json perturb_value(const json& value) {
    if (value.is_string()) return "not-" + value.get<std::string>();
    if (value.is_boolean()) return !value.get<bool>();
    if (value.is_number_integer()) return value.get<std::int64_t>() + 1;
    if (value.is_number_float()) return value.get<double>() + 1.0;
    if (value.is_array()) {
        json copy = value;
        if (copy.empty())
            copy.push_back(0);
        else
            copy.erase(copy.begin());
        return copy;
    }
    if (value.is_object()) {
        json copy = value;
        copy["_corrupted"] = true;
        return copy;
    }
    return true;  // null -> non-null
}

}  // namespace

void validate_profile(const WeaknessProfile& profile) {
    for (const auto& [op, p] : profile.failure_prob) {
        if (!rewriter::operator_from_name(op))
            throw std::invalid_argument("weakness profile names unknown operator '" +
                                        op + "'");
        if (p < 0.0 || p > 1.0)
            throw std::invalid_argument("failure probability for '" + op +
                                        "' outside [0, 1]");
    }
    if (profile.base_failure < 0.0 || profile.base_failure > 1.0)
        throw std::invalid_argument("base failure probability outside [0, 1]");
}

double success_probability(const WeaknessProfile& profile,
                           std::span<const std::string> actions) {
    std::set<std::string> ops = distinct_ops(actions);
    if (profile.composition == FailureComposition::max_probability) {
        double failure = profile.base_failure;
        for (const std::string& op : ops)
            failure = std::max(failure, profile_failure(profile, op));
        return 1.0 - failure;
    }
    double success = 1.0 - profile.base_failure;
    for (const std::string& op : ops)
        success *= 1.0 - profile_failure(profile, op);
    return success;
}

CanonicalAnswer corrupted_answer(const corpus::SeedRecord& seed,
                                 std::span<const std::string> actions) {
    std::set<std::string> ops = distinct_ops(actions);
    const char* distractor_name =
        rewriter::operator_name(rewriter::RewriteOp::inject_distractor);

    if (seed.answer.refusal) {
        CanonicalCall spurious;
        spurious.tool_name = std::string(arbiter::kDistractorTool);
        spurious.arguments = json::object();
        return CanonicalAnswer::make_calls({spurious});
    }

    std::vector<CanonicalCall> calls = seed.answer.calls;
    if (ops.contains(distractor_name)) {
        calls.front().tool_name = std::string(arbiter::kDistractorTool);
        return CanonicalAnswer::make_calls(std::move(calls));
    }
    json& arguments = calls.front().arguments;
    if (arguments.empty()) {
        arguments["_spurious"] = true;
    } else {
        auto first = arguments.begin();
        *first = perturb_value(*first);
    }
    return CanonicalAnswer::make_calls(std::move(calls));
}

CanonicalAnswer respond_to_text(const DefenderBackend& backend,
                                const std::string& text,
                                std::span<const std::string> actions,
                                const corpus::SeedRecord& seed,
                                std::uint64_t trial_index) {
    if (const auto* external = std::get_if<ExternalDefender>(&backend))
        return external_respond(external->endpoint, text, seed);

    const auto& profile = std::get<WeaknessProfile>(backend);
    validate_profile(profile);
    double success = success_probability(profile, actions);
    std::uint64_t stream = mix_seed(profile.rng_seed, fnv1a64(seed.id));
    stream = mix_seed(stream, fnv1a64(text));
    stream = mix_seed(stream, trial_index);
    Rng rng(stream);
    if (rng.next_unit() < success) return seed.answer;
    return corrupted_answer(seed, actions);
}

CanonicalAnswer respond(const DefenderBackend& backend,
                        const rewriter::RewrittenQuery& rewritten,
                        const corpus::SeedRecord& seed,
                        std::uint64_t trial_index) {
    return respond_to_text(backend, rewritten.text, rewritten.actions, seed,
                           trial_index);
}

WeaknessProfile rl_update(
    const WeaknessProfile& profile,
    std::span<const std::pair<rewriter::RewrittenQuery, game::DefenseOutcome>>
        outcomes,
    double eta) {
    if (!(eta > 0.0) || !(eta < 1.0))
        throw std::invalid_argument("eta must lie in (0, 1)");
    WeaknessProfile updated = profile;
    for (const auto& [rewritten, outcome] : outcomes) {
        if (outcome.r_f != -1) continue;
        for (const std::string& op : distinct_ops(rewritten.actions)) {
            auto it = updated.failure_prob.find(op);
            if (it != updated.failure_prob.end()) it->second *= 1.0 - eta;
        }
    }
    return updated;
}

WeaknessProfile sft_update(const WeaknessProfile& profile,
                           std::span<const game::BadCaseRecord> dataset,
                           double eta) {
    if (!(eta > 0.0) || !(eta < 1.0))
        throw std::invalid_argument("eta must lie in (0, 1)");
    WeaknessProfile updated = profile;
    for (const auto& record : dataset) {
        for (const std::string& op : distinct_ops(record.actions)) {
            auto it = updated.failure_prob.find(op);
            if (it != updated.failure_prob.end()) it->second *= 1.0 - eta;
        }
    }
    return updated;
}

CanonicalAnswer external_respond(const wire::EndpointConfig& endpoint,
                                 const std::string& text,
                                 const corpus::SeedRecord& seed) {
    wire::ChatResult reply = wire::chat_complete(
        endpoint, {{"user", text}}, corpus::tools_wire_json(seed.tools));
    return wire::answer_from_chat(reply, "defender reply to seed " + seed.id);
}

}  // namespace fcarena::defender

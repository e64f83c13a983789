#include "fcarena/arbiter.hpp"

#include <algorithm>
#include <cctype>

namespace fcarena::arbiter {

using callspec::CanonicalAnswer;
using callspec::CanonicalCall;
using callspec::json;

namespace {

std::string lowercase(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) {
        return static_cast<char>(std::tolower(c));
    });
    return out;
}

bool all_actions_traceable(const rewriter::RewrittenQuery& rewritten,
                           const std::string& context_id) {
    for (const std::string& name : rewritten.actions) {
        auto op = rewriter::operator_from_name(name);
        if (!op)
            throw std::runtime_error("judging rewrite of seed " + context_id +
                                     ": unknown action '" + name + "'");
        if (!rewriter::operator_info(*op).stage1_traceable) return false;
    }
    return true;
}

CanonicalAnswer distractor_answer() {
    CanonicalCall call;
    call.tool_name = std::string(kDistractorTool);
    call.arguments = json::object();
    return CanonicalAnswer::make_calls({call});
}

CanonicalAnswer external_stage1(const ExternalJudge& judge_cfg,
                                const rewriter::RewrittenQuery& rewritten,
                                const corpus::SeedRecord& seed) {
    wire::ChatResult reply =
        wire::chat_complete(judge_cfg.stage1_endpoint, {{"user", rewritten.text}},
                            corpus::tools_wire_json(seed.tools));
    return wire::answer_from_chat(reply, "judge stage 1 of seed " + seed.id);
}

std::string replace_all(std::string text, std::string_view from,
                        std::string_view to) {
    std::size_t pos = 0;
    while ((pos = text.find(from, pos)) != std::string::npos) {
        text.replace(pos, from.size(), to);
        pos += to.size();
    }
    return text;
}

bool external_stage2(const ExternalJudge& judge_cfg,
                     const rewriter::RewrittenQuery& rewritten,
                     const corpus::SeedRecord& seed) {
    std::string prompt = replace_all(judge_cfg.stage2_prompt, "{query}",
                                     rewritten.text);
    prompt = replace_all(prompt, "{original}", seed.query);
    wire::ChatResult reply =
        wire::chat_complete(*judge_cfg.stage2_endpoint, {{"user", prompt}});
    std::string_view content = reply.content;
    while (!content.empty() &&
           (std::isspace(static_cast<unsigned char>(content.back())) != 0 ||
            content.back() == '.' || content.back() == '!'))
        content.remove_suffix(1);
    std::size_t word_start = content.size();
    while (word_start > 0 &&
           std::isalpha(static_cast<unsigned char>(content[word_start - 1])) != 0)
        --word_start;
    std::string verdict = lowercase(content.substr(word_start));
    if (verdict == "valid") return true;
    if (verdict == "invalid") return false;
    throw wire::PayloadError("judge verdict for seed " + seed.id +
                             " does not end in VALID or INVALID");
}

}  // namespace

CanonicalAnswer stage1_reconstruct(const JudgeBackend& backend,
                                   const rewriter::RewrittenQuery& rewritten,
                                   const corpus::SeedRecord& seed) {
    if (const auto* simulated = std::get_if<SimulatedJudge>(&backend)) {
        (void)simulated;
        if (all_actions_traceable(rewritten, rewritten.seed_id))
            return seed.answer;
        return distractor_answer();
    }
    return external_stage1(std::get<ExternalJudge>(backend), rewritten, seed);
}

bool stage2_validate(const rewriter::RewrittenQuery& rewritten,
                     const corpus::SeedRecord& seed,
                     const ValidationRules& rules) {
    for (const std::string& name : rewritten.actions) {
        auto op = rewriter::operator_from_name(name);
        if (!op)
            throw std::runtime_error("validating rewrite of seed " + seed.id +
                                     ": unknown action '" + name + "'");
        if (!rewriter::operator_info(*op).stage2_valid) return false;
    }

    std::string lowered = lowercase(rewritten.text);
    for (const std::string& pattern : rules.assistant_patterns)
        if (lowered.find(pattern) != std::string::npos) return false;

    if (rules.check_required_mentions) {
        for (const auto& call : seed.answer.calls) {
            const corpus::ToolSchema* tool = seed.find_tool(call.tool_name);
            if (tool == nullptr) continue;
            for (const auto& param : tool->parameters) {
                if (!param.required) continue;
                auto it = call.arguments.find(param.name);
                if (it == call.arguments.end() || !it->is_string()) continue;
                std::string value = lowercase(it->get<std::string>());
                if (value.empty()) continue;
                std::string escape = "the aforementioned " +
                                     lowercase(param.name);
                if (lowered.find(value) == std::string::npos &&
                    lowered.find(escape) == std::string::npos)
                    return false;
            }
        }
    }
    return true;
}

JudgeVerdict judge(const JudgeBackend& backend,
                   const rewriter::RewrittenQuery& rewritten,
                   const corpus::SeedRecord& seed) {
    JudgeVerdict verdict;
    CanonicalAnswer reconstructed;
    try {
        reconstructed = stage1_reconstruct(backend, rewritten, seed);
    } catch (const wire::TransportError& e) {
        throw wire::TransportError("judging rewrite of seed " +
                                       rewritten.seed_id + ": " + e.what(),
                                   e.attempts());
    }
    verdict.stage1_pass = callspec::tool_names_match(reconstructed, seed.answer);
    if (!verdict.stage1_pass) {
        verdict.stage2_valid = false;
        verdict.r_judge = -1;
        verdict.rationale = "stage 1: rewrite no longer maps to the original "
                            "tool; stage 2 skipped";
        return verdict;
    }

    if (const auto* external = std::get_if<ExternalJudge>(&backend);
        external != nullptr && external->stage2_endpoint.has_value()) {
        verdict.stage2_valid = external_stage2(*external, rewritten, seed);
    } else {
        const ValidationRules& rules =
            std::holds_alternative<SimulatedJudge>(backend)
                ? std::get<SimulatedJudge>(backend).rules
                : std::get<ExternalJudge>(backend).rules;
        verdict.stage2_valid = stage2_validate(rewritten, seed, rules);
    }
    verdict.r_judge = verdict.stage2_valid ? 1 : -1;
    verdict.rationale = verdict.stage2_valid
                            ? "stage 1: tool preserved; stage 2: semantics valid"
                            : "stage 1: tool preserved; stage 2: semantic "
                              "validity check failed";
    return verdict;
}

}  // namespace fcarena::arbiter

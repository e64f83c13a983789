#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "fcarena/callspec.hpp"
#include "fcarena/corpus.hpp"
#include "fcarena/rewriter.hpp"
#include "fcarena/wire.hpp"

// Two-stage judging of rewritten queries: stage 1 re-derives the tool from
// the rewrite, stage 2 checks semantic validity. A judge-valid rewrite
// earns +1, anything else -1; stage 2 runs only when stage 1 passed.
namespace fcarena::arbiter {

struct ValidationRules {
    // Lowercase substrings marking assistant-perspective phrasing.
    std::vector<std::string> assistant_patterns = {
        "as the assistant", "as your assistant", "i should handle",
        "i will call", "on behalf of the user"};
    // Require every required string-typed argument value to stay mentioned
    // (verbatim or as "the aforementioned <name>").
    bool check_required_mentions = true;
};

// Tool name the simulated stage-1 oracle falls back to when the rewrite
// no longer traces to the original tool.
inline constexpr std::string_view kDistractorTool = "unrelated_lookup";

struct SimulatedJudge {
    ValidationRules rules;
};

struct ExternalJudge {
    // FC-style endpoint that answers the rewritten query with a tool call.
    wire::EndpointConfig stage1_endpoint;
    // Reasoning endpoint whose reply must end in VALID or INVALID. When
    // absent, stage 2 falls back to the local rules.
    std::optional<wire::EndpointConfig> stage2_endpoint;
    // Stage-2 prompt; "{query}" is replaced with the rewritten text and
    // "{original}" with the seed query.
    std::string stage2_prompt =
        "Original request: {original}\nRewritten request: {query}\n"
        "Does the rewrite keep all key fields and stay phrased from the "
        "user's perspective? Answer with one word, VALID or INVALID.";
    ValidationRules rules;
};

using JudgeBackend = std::variant<SimulatedJudge, ExternalJudge>;

struct JudgeVerdict {
    bool stage1_pass = false;
    bool stage2_valid = false;  // meaningful only when stage1_pass
    int r_judge = -1;
    std::string rationale;
};

callspec::CanonicalAnswer stage1_reconstruct(const JudgeBackend& backend,
                                             const rewriter::RewrittenQuery& rewritten,
                                             const corpus::SeedRecord& seed);

// The rule-based stage-2 check (operator flags plus ValidationRules).
// External backends with a stage-2 endpoint consult it instead via judge().
bool stage2_validate(const rewriter::RewrittenQuery& rewritten,
                     const corpus::SeedRecord& seed,
                     const ValidationRules& rules);

JudgeVerdict judge(const JudgeBackend& backend,
                   const rewriter::RewrittenQuery& rewritten,
                   const corpus::SeedRecord& seed);

}  // namespace fcarena::arbiter

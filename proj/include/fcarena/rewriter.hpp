#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fcarena/corpus.hpp"

namespace fcarena::wire {
struct EndpointConfig;
}

// The attacker: a tabular softmax policy over rewrite operators, applied
// autoregressively to a seed query, plus an adapter for external LLM
// rewriters.
namespace fcarena::rewriter {

enum class RewriteOp : int {
    paraphrase_light,
    synonym_tool_terms,
    drop_optional_param,
    implicit_param,
    inject_distractor,
    unit_shift,
    perspective_flip,
    semantic_drift,
    drop_required_field,
};

inline constexpr std::size_t kNumOperators = 9;

struct OperatorInfo {
    RewriteOp op;
    const char* name;
    bool stage1_traceable;  // a judge can still infer the original tool
    bool stage2_valid;      // rewrite keeps key fields and user perspective
    double difficulty;      // informational ordering in [0,1]
};

const std::array<OperatorInfo, kNumOperators>& operator_table();
const OperatorInfo& operator_info(RewriteOp op);
const char* operator_name(RewriteOp op);
std::optional<RewriteOp> operator_from_name(std::string_view name);

// Name used by external adapters, outside the trainable vocabulary.
inline constexpr std::string_view kExternalActionName = "External";

// Deterministic rewrite rule; total over non-empty inputs and always
// returns text different from its input.
std::string apply_transform(RewriteOp op, const std::string& text,
                            const corpus::SeedRecord& seed);

// Prompt features fold into 18 buckets: call shape (single / multi-call /
// irrelevant) x language (zh / other) x tool count (1 / 2-3 / >=4). The
// action prefix folds in additively so later actions condition on earlier
// ones.
inline constexpr std::size_t kNumBuckets = 18;
inline constexpr std::size_t kThetaSize = kNumOperators * kNumBuckets;

std::size_t context_bucket(const corpus::QueryPrompt& prompt,
                           std::span<const std::string> prefix = {});

struct PolicyParams {
    std::vector<double> theta;  // kThetaSize logits, [op * kNumBuckets + bucket]
    double temperature = 1.0;
};

PolicyParams uniform_params(double temperature = 1.0);
void validate_params(const PolicyParams& params);

struct RewrittenQuery {
    std::string seed_id;
    std::string text;
    std::vector<std::string> actions;  // operator names, in application order
    std::optional<double> logprob;     // unset for external rewrites
    std::uint64_t rng_seed = 0;
};

std::array<double, kNumOperators> action_distribution(
    const PolicyParams& params, const corpus::QueryPrompt& prompt,
    std::span<const std::string> prefix = {});

RewrittenQuery sample_rewrite(const PolicyParams& params,
                              const corpus::QueryPrompt& prompt,
                              std::uint64_t rng_seed, std::size_t seq_len = 2);

double logprob_of(const PolicyParams& params, const corpus::QueryPrompt& prompt,
                  std::span<const std::string> actions);

// Per-parameter gradient of log pi(actions | prompt), laid out like theta.
std::vector<double> logprob_gradient(const PolicyParams& params,
                                     const corpus::QueryPrompt& prompt,
                                     std::span<const std::string> actions);

RewrittenQuery external_rewrite(const wire::EndpointConfig& endpoint,
                                const corpus::QueryPrompt& prompt);

}  // namespace fcarena::rewriter

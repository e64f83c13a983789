#include "fcarena/rewriter.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <stdexcept>

#include "fcarena/rng.hpp"
#include "fcarena/wire.hpp"

namespace fcarena::rewriter {

namespace {

constexpr std::array<OperatorInfo, kNumOperators> kOperators{{
    {RewriteOp::paraphrase_light, "ParaphraseLight", true, true, 0.1},
    {RewriteOp::synonym_tool_terms, "SynonymToolTerms", true, true, 0.25},
    {RewriteOp::drop_optional_param, "DropOptionalParam", true, true, 0.3},
    {RewriteOp::implicit_param, "ImplicitParam", true, true, 0.5},
    {RewriteOp::inject_distractor, "InjectDistractor", true, true, 0.6},
    {RewriteOp::unit_shift, "UnitShift", true, true, 0.4},
    {RewriteOp::perspective_flip, "PerspectiveFlip", true, false, 0.7},
    {RewriteOp::semantic_drift, "SemanticDrift", false, true, 0.8},
    {RewriteOp::drop_required_field, "DropRequiredField", true, false, 0.9},
}};

bool is_word_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) != 0 || c == '_';
}

bool find_word(const std::string& text, const std::string& word,
               std::size_t& pos_out) {
    std::size_t pos = 0;
    while ((pos = text.find(word, pos)) != std::string::npos) {
        bool left_ok = pos == 0 || !is_word_char(text[pos - 1]);
        std::size_t end = pos + word.size();
        bool right_ok = end >= text.size() || !is_word_char(text[end]);
        if (left_ok && right_ok) {
            pos_out = pos;
            return true;
        }
        ++pos;
    }
    return false;
}

bool replace_first_word(std::string& text, const std::string& word,
                        const std::string& replacement) {
    std::size_t pos = 0;
    if (!find_word(text, word, pos)) return false;
    text.replace(pos, word.size(), replacement);
    return true;
}

std::string value_as_text(const callspec::json& value) {
    if (value.is_string()) return value.get<std::string>();
    if (value.is_boolean()) return value.get<bool>() ? "true" : "false";
    if (value.is_number_integer())
        return std::to_string(value.get<std::int64_t>());
    if (value.is_number_unsigned())
        return std::to_string(value.get<std::uint64_t>());
    return value.dump();
}

std::string paraphrase_light(std::string text) {
    static const std::pair<const char*, const char*> kSwaps[] = {
        {"find", "locate"},     {"show", "display"},
        {"get", "fetch"},       {"need", "require"},
        {"want", "would like"}, {"check", "verify"},
        {"book", "reserve"},    {"send", "dispatch"},
        {"list", "enumerate"},  {"tell", "inform"},
    };
    bool changed = false;
    for (const auto& [from, to] : kSwaps)
        changed |= replace_first_word(text, from, to);
    if (!changed) text = "Please help me with the following: " + text;
    return text;
}

std::string synonym_tool_terms(std::string text,
                               const corpus::SeedRecord& seed) {
    static const std::pair<const char*, const char*> kSynonyms[] = {
        {"weather", "sky conditions"},   {"forecast", "outlook"},
        {"search", "digging around"},    {"convert", "turning"},
        {"calculate", "working out"},    {"translate", "rendering"},
        {"alarm", "reminder bell"},      {"timer", "countdown"},
        {"currency", "money"},           {"distance", "stretch of road"},
        {"email", "electronic message"}, {"restaurant", "place to eat"},
        {"flight", "plane trip"},        {"hotel", "place to stay"},
        {"news", "headlines"},           {"stock", "share price"},
        {"music", "tunes"},              {"reminder", "nudge"},
        {"taxi", "cab"},                 {"route", "way there"},
    };
    bool changed = false;
    for (const auto& tool : seed.tools) {
        std::string token;
        for (char c : tool.name + std::string(1, '_')) {
            if (c == '_' || c == '-' || c == '.') {
                if (token.size() >= 3) {
                    for (const auto& [from, to] : kSynonyms) {
                        if (token == from)
                            changed |= replace_first_word(text, token, to);
                    }
                }
                token.clear();
            } else {
                token.push_back(
                    static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
            }
        }
    }
    if (!changed) text += " (I'd rather not name the exact function.)";
    return text;
}

std::string drop_optional_param(std::string text,
                                const corpus::SeedRecord& seed) {
    for (const auto& call : seed.answer.calls) {
        const corpus::ToolSchema* tool = seed.find_tool(call.tool_name);
        if (tool == nullptr) continue;
        for (const auto& [arg_name, arg_value] : call.arguments.items()) {
            const corpus::ParamSpec* param = tool->find_param(arg_name);
            if (param == nullptr || param->required) continue;
            std::string needle = value_as_text(arg_value);
            std::size_t pos = text.find(needle);
            if (needle.empty() || pos == std::string::npos) continue;
            text.replace(pos, needle.size(), "whatever makes sense");
            return text;
        }
    }
    return text + " Keep the rest as defaults.";
}

std::string implicit_param(std::string text, const corpus::SeedRecord& seed) {
    for (const auto& call : seed.answer.calls) {
        const corpus::ToolSchema* tool = seed.find_tool(call.tool_name);
        if (tool == nullptr) continue;
        for (const auto& param : tool->parameters) {
            if (!param.required || !call.arguments.contains(param.name)) continue;
            std::string needle = value_as_text(call.arguments.at(param.name));
            std::size_t pos = text.find(needle);
            if (needle.empty() || pos == std::string::npos) continue;
            text.replace(pos, needle.size(),
                         "the aforementioned " + param.name);
            return text;
        }
    }
    return text + " Use the details I mentioned earlier.";
}

std::string inject_distractor(std::string text) {
    return text +
           " Also, while you're at it, can you tell me the height of Mount "
           "Everest?";
}

struct UnitRule {
    const char* unit;
    const char* special_from;  // exact count with an idiomatic rewrite
    const char* special_to;
    std::int64_t factor;
    const char* target_unit;
};

std::string unit_shift(std::string text) {
    static const UnitRule kRules[] = {
        {"minutes", "30", "half an hour", 60, "seconds"},
        {"minute", nullptr, nullptr, 60, "seconds"},
        {"hours", "24", "a day", 60, "minutes"},
        {"hour", nullptr, nullptr, 60, "minutes"},
        {"days", "7", "one week", 24, "hours"},
        {"day", nullptr, nullptr, 24, "hours"},
        {"kilometers", nullptr, nullptr, 1000, "meters"},
        {"km", nullptr, nullptr, 1000, "meters"},
        {"kilograms", nullptr, nullptr, 1000, "grams"},
        {"kg", nullptr, nullptr, 1000, "grams"},
        {"dollars", nullptr, nullptr, 100, "cents"},
    };
    std::size_t i = 0;
    while (i < text.size()) {
        if (!std::isdigit(static_cast<unsigned char>(text[i]))) {
            ++i;
            continue;
        }
        std::size_t start = i;
        while (i < text.size() &&
               std::isdigit(static_cast<unsigned char>(text[i])) &&
               i - start < 9)
            ++i;
        std::string digits = text.substr(start, i - start);
        std::size_t after = i;
        while (after < text.size() && text[after] == ' ') ++after;
        for (const UnitRule& rule : kRules) {
            std::size_t unit_len = std::string_view(rule.unit).size();
            if (text.compare(after, unit_len, rule.unit) != 0) continue;
            std::size_t end = after + unit_len;
            if (end < text.size() && is_word_char(text[end])) continue;
            std::string replacement;
            if (rule.special_from != nullptr && digits == rule.special_from) {
                replacement = rule.special_to;
            } else {
                replacement = std::to_string(std::stoll(digits) * rule.factor) +
                              " " + rule.target_unit;
            }
            text.replace(start, end - start, replacement);
            return text;
        }
    }
    return text + " Please convert any quantities to equivalent units first.";
}

std::string perspective_flip(std::string text) {
    return "As the assistant, I should handle this request: " + text;
}

std::string semantic_drift(std::string text) {
    return "Changing topics a bit: " + text +
           " ...actually, I mainly want your opinion on something unrelated.";
}

std::string drop_required_field(std::string text,
                                const corpus::SeedRecord& seed) {
    for (const auto& call : seed.answer.calls) {
        const corpus::ToolSchema* tool = seed.find_tool(call.tool_name);
        if (tool == nullptr) continue;
        for (const auto& param : tool->parameters) {
            if (!param.required || !call.arguments.contains(param.name)) continue;
            std::string needle = value_as_text(call.arguments.at(param.name));
            std::size_t pos = text.find(needle);
            if (needle.empty() || pos == std::string::npos) continue;
            text.replace(pos, needle.size(), "something");
            return text;
        }
    }
    return text + " I'll leave out the specifics.";
}

std::size_t prompt_base_bucket(const corpus::QueryPrompt& prompt) {
    const corpus::SeedRecord& seed = prompt.source;
    std::size_t shape;
    switch (seed.complexity) {
        case corpus::Complexity::single: shape = 0; break;
        case corpus::Complexity::parallel:
        case corpus::Complexity::multiple: shape = 1; break;
        case corpus::Complexity::irrelevant: shape = 2; break;
        default: shape = 0; break;
    }
    std::size_t lang = seed.language == corpus::Language::zh ? 1 : 0;
    std::size_t tools = seed.tools.size();
    std::size_t tool_bucket = tools <= 1 ? 0 : (tools <= 3 ? 1 : 2);
    return shape * 6 + lang * 3 + tool_bucket;
}

}  // namespace

const std::array<OperatorInfo, kNumOperators>& operator_table() {
    return kOperators;
}

const OperatorInfo& operator_info(RewriteOp op) {
    return kOperators[static_cast<std::size_t>(op)];
}

const char* operator_name(RewriteOp op) { return operator_info(op).name; }

std::optional<RewriteOp> operator_from_name(std::string_view name) {
    for (const auto& info : kOperators)
        if (name == info.name) return info.op;
    return std::nullopt;
}

std::string apply_transform(RewriteOp op, const std::string& text,
                            const corpus::SeedRecord& seed) {
    if (text.empty())
        throw std::invalid_argument("cannot rewrite empty text");
    switch (op) {
        case RewriteOp::paraphrase_light: return paraphrase_light(text);
        case RewriteOp::synonym_tool_terms: return synonym_tool_terms(text, seed);
        case RewriteOp::drop_optional_param: return drop_optional_param(text, seed);
        case RewriteOp::implicit_param: return implicit_param(text, seed);
        case RewriteOp::inject_distractor: return inject_distractor(text);
        case RewriteOp::unit_shift: return unit_shift(text);
        case RewriteOp::perspective_flip: return perspective_flip(text);
        case RewriteOp::semantic_drift: return semantic_drift(text);
        case RewriteOp::drop_required_field: return drop_required_field(text, seed);
    }
    throw std::invalid_argument("unknown rewrite operator");
}

std::size_t context_bucket(const corpus::QueryPrompt& prompt,
                           std::span<const std::string> prefix) {
    std::size_t bucket = prompt_base_bucket(prompt);
    for (const std::string& name : prefix) {
        auto op = operator_from_name(name);
        if (!op) throw std::invalid_argument("unknown action name: " + name);
        bucket += static_cast<std::size_t>(*op) + 1;
    }
    return bucket % kNumBuckets;
}

PolicyParams uniform_params(double temperature) {
    PolicyParams params;
    params.theta.assign(kThetaSize, 0.0);
    params.temperature = temperature;
    return params;
}

void validate_params(const PolicyParams& params) {
    if (params.theta.size() != kThetaSize)
        throw std::invalid_argument(
            "policy has " + std::to_string(params.theta.size()) +
            " logits, expected " + std::to_string(kThetaSize));
    for (double v : params.theta)
        if (!std::isfinite(v))
            throw std::domain_error("non-finite policy logit");
    if (!(params.temperature > 0.0) || !std::isfinite(params.temperature))
        throw std::domain_error("temperature must be positive and finite");
}

std::array<double, kNumOperators> action_distribution(
    const PolicyParams& params, const corpus::QueryPrompt& prompt,
    std::span<const std::string> prefix) {
    validate_params(params);
    std::size_t bucket = context_bucket(prompt, prefix);
    std::array<double, kNumOperators> logits{};
    double max_logit = -std::numeric_limits<double>::infinity();
    for (std::size_t op = 0; op < kNumOperators; ++op) {
        logits[op] = params.theta[op * kNumBuckets + bucket] / params.temperature;
        max_logit = std::max(max_logit, logits[op]);
    }
    double total = 0.0;
    for (std::size_t op = 0; op < kNumOperators; ++op) {
        logits[op] = std::exp(logits[op] - max_logit);
        total += logits[op];
    }
    for (std::size_t op = 0; op < kNumOperators; ++op) logits[op] /= total;
    return logits;
}

RewrittenQuery sample_rewrite(const PolicyParams& params,
                              const corpus::QueryPrompt& prompt,
                              std::uint64_t rng_seed, std::size_t seq_len) {
    if (seq_len == 0)
        throw std::invalid_argument("rewrite sequence length must be positive");
    Rng rng(mix_seed(rng_seed, fnv1a64(prompt.seed_id)));
    RewrittenQuery result;
    result.seed_id = prompt.seed_id;
    result.text = prompt.source.query;
    result.rng_seed = rng_seed;
    double logprob = 0.0;
    for (std::size_t t = 0; t < seq_len; ++t) {
        auto probs = action_distribution(params, prompt, result.actions);
        double u = rng.next_unit();
        std::size_t chosen = kNumOperators - 1;
        double cumulative = 0.0;
        for (std::size_t op = 0; op < kNumOperators; ++op) {
            cumulative += probs[op];
            if (u < cumulative) {
                chosen = op;
                break;
            }
        }
        logprob += std::log(probs[chosen]);
        auto op = static_cast<RewriteOp>(chosen);
        result.text = apply_transform(op, result.text, prompt.source);
        result.actions.emplace_back(operator_name(op));
    }
    result.logprob = logprob;
    return result;
}

double logprob_of(const PolicyParams& params, const corpus::QueryPrompt& prompt,
                  std::span<const std::string> actions) {
    double logprob = 0.0;
    std::vector<std::string> prefix;
    prefix.reserve(actions.size());
    for (const std::string& name : actions) {
        auto op = operator_from_name(name);
        if (!op) throw std::invalid_argument("unknown action name: " + name);
        auto probs = action_distribution(params, prompt, prefix);
        logprob += std::log(probs[static_cast<std::size_t>(*op)]);
        prefix.push_back(name);
    }
    return logprob;
}

std::vector<double> logprob_gradient(const PolicyParams& params,
                                     const corpus::QueryPrompt& prompt,
                                     std::span<const std::string> actions) {
    std::vector<double> grad(kThetaSize, 0.0);
    std::vector<std::string> prefix;
    prefix.reserve(actions.size());
    for (const std::string& name : actions) {
        auto op = operator_from_name(name);
        if (!op) throw std::invalid_argument("unknown action name: " + name);
        auto probs = action_distribution(params, prompt, prefix);
        std::size_t bucket = context_bucket(prompt, prefix);
        std::size_t chosen = static_cast<std::size_t>(*op);
        for (std::size_t o = 0; o < kNumOperators; ++o) {
            double indicator = o == chosen ? 1.0 : 0.0;
            grad[o * kNumBuckets + bucket] +=
                (indicator - probs[o]) / params.temperature;
        }
        prefix.push_back(name);
    }
    return grad;
}

RewrittenQuery external_rewrite(const wire::EndpointConfig& endpoint,
                                const corpus::QueryPrompt& prompt) {
    std::vector<wire::Message> messages{
        {"system", std::string(prompt.directives)},
        {"user", prompt.rendered_context},
    };
    wire::ChatResult reply = wire::chat_complete(endpoint, messages);
    if (reply.content.empty())
        throw wire::PayloadError("external rewriter returned empty text for seed " +
                                 prompt.seed_id);
    RewrittenQuery result;
    result.seed_id = prompt.seed_id;
    result.text = reply.content;
    result.actions.emplace_back(kExternalActionName);
    return result;
}

}  // namespace fcarena::rewriter

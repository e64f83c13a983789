#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "fcarena/callspec.hpp"
#include "fcarena/corpus.hpp"
#include "fcarena/game.hpp"
#include "fcarena/rewriter.hpp"
#include "fcarena/wire.hpp"

// The model under attack: a simulated responder whose per-operator failure
// probabilities shrink as it trains on its own bad cases, plus an external
// LLM adapter speaking the chat-completions tools format.
namespace fcarena::defender {

enum class FailureComposition { independent, max_probability };

struct WeaknessProfile {
    std::map<std::string, double> failure_prob;  // operator name -> [0, 1]
    double base_failure = 0.0;
    std::uint64_t rng_seed = 0;
    FailureComposition composition = FailureComposition::independent;
};

void validate_profile(const WeaknessProfile& profile);

struct ExternalDefender {
    wire::EndpointConfig endpoint;
};

using DefenderBackend = std::variant<WeaknessProfile, ExternalDefender>;

// Probability that the simulated defender answers correctly given the
// distinct operators applied to the query.
double success_probability(const WeaknessProfile& profile,
                           std::span<const std::string> actions);

// Deterministic wrong answer for (seed, operator set): a swapped tool when
// InjectDistractor was applied, otherwise one perturbed argument.
callspec::CanonicalAnswer corrupted_answer(const corpus::SeedRecord& seed,
                                           std::span<const std::string> actions);

callspec::CanonicalAnswer respond(const DefenderBackend& backend,
                                  const rewriter::RewrittenQuery& rewritten,
                                  const corpus::SeedRecord& seed,
                                  std::uint64_t trial_index = 0);

// Same contract for an unmodified query (no rewrite operators applied);
// used when training data mixes seed records back in.
callspec::CanonicalAnswer respond_to_text(const DefenderBackend& backend,
                                          const std::string& text,
                                          std::span<const std::string> actions,
                                          const corpus::SeedRecord& seed,
                                          std::uint64_t trial_index = 0);

// Every failed outcome multiplies each of its distinct operators' failure
// probabilities by (1 - eta); successes leave the profile untouched.
WeaknessProfile rl_update(
    const WeaknessProfile& profile,
    std::span<const std::pair<rewriter::RewrittenQuery, game::DefenseOutcome>>
        outcomes,
    double eta);

// Membership-driven variant: every record counts as one failure exposure.
WeaknessProfile sft_update(const WeaknessProfile& profile,
                           std::span<const game::BadCaseRecord> dataset,
                           double eta);

callspec::CanonicalAnswer external_respond(const wire::EndpointConfig& endpoint,
                                           const std::string& text,
                                           const corpus::SeedRecord& seed);

}  // namespace fcarena::defender

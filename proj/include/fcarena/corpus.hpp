#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "fcarena/callspec.hpp"

// Seed data: loading, validation, prompt templating, and per-round
// composition of the attacker's training set under a curriculum schedule.
namespace fcarena::corpus {

enum class Complexity { single, parallel, multiple, irrelevant };
enum class Language { en, zh, other };
// Optional evaluation tag; required only on records fed to evaluate().
enum class EvalCategory { non_live, live, relevance, irrelevance };

const char* to_string(Complexity c);
const char* to_string(Language l);
const char* to_string(EvalCategory c);
std::optional<Complexity> complexity_from_string(std::string_view s);
std::optional<Language> language_from_string(std::string_view s);
std::optional<EvalCategory> category_from_string(std::string_view s);

class ValidationError : public std::runtime_error {
  public:
    ValidationError(const std::string& what, std::string record_id)
        : std::runtime_error(what), record_id_(std::move(record_id)) {}
    const std::string& record_id() const { return record_id_; }

  private:
    std::string record_id_;
};

struct ParamSpec {
    std::string name;
    std::string type;  // string|integer|number|boolean|array|object|enum
    bool required = false;
    std::string description;
    std::vector<std::string> enum_values;
};

struct ToolSchema {
    std::string name;
    std::string description;
    std::vector<ParamSpec> parameters;

    const ParamSpec* find_param(std::string_view param_name) const;
};

struct SeedRecord {
    std::string id;
    std::string query;
    std::vector<ToolSchema> tools;
    callspec::CanonicalAnswer answer;
    Complexity complexity = Complexity::single;
    Language language = Language::en;
    std::optional<EvalCategory> category;  // evaluation inputs only

    const ToolSchema* find_tool(std::string_view tool_name) const;
};

void validate_record(const SeedRecord& record);

SeedRecord record_from_json(const callspec::json& value);
callspec::json record_to_json(const SeedRecord& record);

// Chat-completions "tools" array for the given schemas (enum parameters
// become string-typed with an enum list).
callspec::json tools_wire_json(std::span<const ToolSchema> tools);

// JSONL, one record per line. Order preserved; every record validated.
std::vector<SeedRecord> load_seed_dataset(const std::filesystem::path& path);
void save_seed_dataset(const std::filesystem::path& path,
                       std::span<const SeedRecord> records);

inline constexpr std::string_view kDefaultDirectives =
    "Rewrite the user query so it still requires the same tool call, but is "
    "phrased differently and is harder to handle. Reply with the rewritten "
    "query only.";

struct QueryPrompt {
    std::string seed_id;
    std::string rendered_context;  // embeds the verbatim original query
    std::string directives;
    // Snapshot of the templating input, carried so downstream consumers
    // (rewrite operators, the judge, the defender) never re-resolve ids.
    SeedRecord source;
};

QueryPrompt build_query_prompt(const SeedRecord& record,
                               std::string_view directives = kDefaultDirectives);

struct CurriculumMix {
    std::map<Complexity, double> fractions;  // sums to 1 +- 1e-9
    std::size_t count = 0;                   // > 0
};

struct CurriculumSchedule {
    std::vector<CurriculumMix> rounds;
};

void validate_schedule(const CurriculumSchedule& schedule);

// Compose the round's attacker training set. Quotas follow the mix via
// largest-remainder apportionment (each class within +-1 of fraction *
// count); classes short on seeds are sampled with replacement and a
// warning is reported through `warnings` when provided.
std::vector<QueryPrompt> compose_round_dataset(std::span<const SeedRecord> seeds,
                                               const CurriculumSchedule& schedule,
                                               std::size_t round_index,
                                               std::uint64_t rng_seed,
                                               std::vector<std::string>* warnings = nullptr,
                                               std::string_view directives = kDefaultDirectives);

}  // namespace fcarena::corpus

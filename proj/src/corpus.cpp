#include "fcarena/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "fcarena/rng.hpp"

namespace fcarena::corpus {

using callspec::json;

namespace {

const std::set<std::string> kParamTypes = {
    "string", "integer", "number", "boolean", "array", "object", "enum"};

[[noreturn]] void fail(const std::string& what, const std::string& record_id) {
    throw ValidationError("record '" + record_id + "': " + what, record_id);
}

std::string require_string(const json& obj, const char* key,
                           const std::string& record_id) {
    auto it = obj.find(key);
    if (it == obj.end() || !it->is_string())
        fail(std::string("missing or non-string field '") + key + "'", record_id);
    return it->get<std::string>();
}

}  // namespace

const char* to_string(Complexity c) {
    switch (c) {
        case Complexity::single: return "single";
        case Complexity::parallel: return "parallel";
        case Complexity::multiple: return "multiple";
        case Complexity::irrelevant: return "irrelevant";
    }
    return "single";
}

const char* to_string(Language l) {
    switch (l) {
        case Language::en: return "en";
        case Language::zh: return "zh";
        case Language::other: return "other";
    }
    return "en";
}

const char* to_string(EvalCategory c) {
    switch (c) {
        case EvalCategory::non_live: return "non_live";
        case EvalCategory::live: return "live";
        case EvalCategory::relevance: return "relevance";
        case EvalCategory::irrelevance: return "irrelevance";
    }
    return "non_live";
}

std::optional<Complexity> complexity_from_string(std::string_view s) {
    if (s == "single") return Complexity::single;
    if (s == "parallel") return Complexity::parallel;
    if (s == "multiple") return Complexity::multiple;
    if (s == "irrelevant") return Complexity::irrelevant;
    return std::nullopt;
}

std::optional<Language> language_from_string(std::string_view s) {
    if (s == "en") return Language::en;
    if (s == "zh") return Language::zh;
    if (s == "other") return Language::other;
    return std::nullopt;
}

std::optional<EvalCategory> category_from_string(std::string_view s) {
    if (s == "non_live") return EvalCategory::non_live;
    if (s == "live") return EvalCategory::live;
    if (s == "relevance") return EvalCategory::relevance;
    if (s == "irrelevance") return EvalCategory::irrelevance;
    return std::nullopt;
}

const ParamSpec* ToolSchema::find_param(std::string_view param_name) const {
    for (const auto& p : parameters)
        if (p.name == param_name) return &p;
    return nullptr;
}

const ToolSchema* SeedRecord::find_tool(std::string_view tool_name) const {
    for (const auto& t : tools)
        if (t.name == tool_name) return &t;
    return nullptr;
}

void validate_record(const SeedRecord& record) {
    const std::string& id = record.id;
    if (id.empty()) fail("empty id", id);
    if (record.query.empty()) fail("empty query", id);
    if (record.tools.empty()) fail("empty tool list", id);

    std::set<std::string_view> tool_names;
    for (const auto& tool : record.tools) {
        if (tool.name.empty()) fail("tool with empty name", id);
        if (!tool_names.insert(tool.name).second)
            fail("duplicate tool name '" + tool.name + "'", id);
        std::set<std::string_view> param_names;
        for (const auto& param : tool.parameters) {
            if (param.name.empty())
                fail("tool '" + tool.name + "' has a parameter with empty name", id);
            if (!param_names.insert(param.name).second)
                fail("tool '" + tool.name + "' has duplicate parameter '" +
                         param.name + "'",
                     id);
            if (!kParamTypes.contains(param.type))
                fail("parameter '" + param.name + "' has unknown type '" +
                         param.type + "'",
                     id);
            if (param.type == "enum" && param.enum_values.empty())
                fail("enum parameter '" + param.name + "' lists no values", id);
        }
    }

    if (record.complexity == Complexity::irrelevant) {
        if (!record.answer.refusal)
            fail("irrelevant record must have a refusal answer", id);
    } else {
        if (record.answer.refusal)
            fail("non-irrelevant record must not have a refusal answer", id);
        if (record.answer.calls.empty()) fail("answer lists no calls", id);
        if (record.complexity == Complexity::single &&
            record.answer.calls.size() != 1)
            fail("single-complexity record must have exactly one call", id);
        if (record.complexity != Complexity::single &&
            record.answer.calls.size() < 2)
            fail(std::string(to_string(record.complexity)) +
                     "-complexity record must have at least two calls",
                 id);
        for (const auto& call : record.answer.calls) {
            const ToolSchema* tool = record.find_tool(call.tool_name);
            if (tool == nullptr)
                fail("answer calls unknown tool '" + call.tool_name + "'", id);
            for (const auto& [arg_name, arg_value] : call.arguments.items()) {
                const ParamSpec* param = tool->find_param(arg_name);
                if (param == nullptr)
                    fail("answer passes unknown argument '" + arg_name +
                             "' to tool '" + tool->name + "'",
                         id);
                (void)arg_value;
            }
            for (const auto& param : tool->parameters) {
                if (param.required && !call.arguments.contains(param.name))
                    fail("answer omits required argument '" + param.name +
                             "' of tool '" + tool->name + "'",
                         id);
            }
        }
    }
}

SeedRecord record_from_json(const json& value) {
    if (!value.is_object())
        throw ValidationError("record is not a JSON object", "");
    SeedRecord record;
    record.id = require_string(value, "id", "");
    const std::string& id = record.id;
    record.query = require_string(value, "query", id);

    auto tools_it = value.find("tools");
    if (tools_it == value.end() || !tools_it->is_array())
        fail("missing or non-array field 'tools'", id);
    for (const auto& tool_json : *tools_it) {
        if (!tool_json.is_object()) fail("tool entry is not an object", id);
        ToolSchema tool;
        tool.name = require_string(tool_json, "name", id);
        if (auto it = tool_json.find("description");
            it != tool_json.end() && it->is_string())
            tool.description = it->get<std::string>();
        if (auto params_it = tool_json.find("parameters");
            params_it != tool_json.end()) {
            if (!params_it->is_object())
                fail("tool '" + tool.name + "' parameters is not an object", id);
            for (const auto& [param_name, param_json] : params_it->items()) {
                if (!param_json.is_object())
                    fail("parameter '" + param_name + "' is not an object", id);
                ParamSpec param;
                param.name = param_name;
                param.type = require_string(param_json, "type", id);
                if (auto it = param_json.find("description");
                    it != param_json.end() && it->is_string())
                    param.description = it->get<std::string>();
                if (auto it = param_json.find("required");
                    it != param_json.end() && it->is_boolean())
                    param.required = it->get<bool>();
                if (auto it = param_json.find("enum");
                    it != param_json.end() && it->is_array())
                    for (const auto& v : *it)
                        param.enum_values.push_back(v.is_string()
                                                        ? v.get<std::string>()
                                                        : v.dump());
                tool.parameters.push_back(std::move(param));
            }
        }
        record.tools.push_back(std::move(tool));
    }

    auto answer_it = value.find("answer");
    if (answer_it == value.end()) fail("missing field 'answer'", id);
    try {
        record.answer = callspec::answer_from_json(*answer_it);
    } catch (const callspec::FormatError& e) {
        fail(std::string("bad answer: ") + e.what(), id);
    }

    std::string complexity_str = require_string(value, "complexity", id);
    auto complexity = complexity_from_string(complexity_str);
    if (!complexity) fail("unknown complexity '" + complexity_str + "'", id);
    record.complexity = *complexity;

    std::string language_str = require_string(value, "language", id);
    auto language = language_from_string(language_str);
    if (!language) fail("unknown language '" + language_str + "'", id);
    record.language = *language;

    if (auto it = value.find("category"); it != value.end()) {
        if (!it->is_string()) fail("non-string field 'category'", id);
        auto category = category_from_string(it->get<std::string>());
        if (!category)
            fail("unknown category '" + it->get<std::string>() + "'", id);
        record.category = *category;
    }

    validate_record(record);
    return record;
}

json record_to_json(const SeedRecord& record) {
    json tools = json::array();
    for (const auto& tool : record.tools) {
        json params = json::object();
        for (const auto& param : tool.parameters) {
            json p{{"type", param.type}};
            if (!param.description.empty()) p["description"] = param.description;
            if (param.required) p["required"] = true;
            if (!param.enum_values.empty()) p["enum"] = param.enum_values;
            params[param.name] = std::move(p);
        }
        json t{{"name", tool.name}, {"parameters", std::move(params)}};
        if (!tool.description.empty()) t["description"] = tool.description;
        tools.push_back(std::move(t));
    }
    json value{{"id", record.id},
               {"query", record.query},
               {"tools", std::move(tools)},
               {"answer", callspec::answer_to_json(record.answer)},
               {"complexity", to_string(record.complexity)},
               {"language", to_string(record.language)}};
    if (record.category) value["category"] = to_string(*record.category);
    return value;
}

json tools_wire_json(std::span<const ToolSchema> tools) {
    json block = json::array();
    for (const auto& tool : tools) {
        json properties = json::object();
        json required = json::array();
        for (const auto& param : tool.parameters) {
            json p{{"type", param.type == "enum" ? "string" : param.type}};
            if (!param.description.empty()) p["description"] = param.description;
            if (!param.enum_values.empty()) p["enum"] = param.enum_values;
            properties[param.name] = std::move(p);
            if (param.required) required.push_back(param.name);
        }
        block.push_back({{"type", "function"},
                         {"function",
                          {{"name", tool.name},
                           {"description", tool.description},
                           {"parameters",
                            {{"type", "object"},
                             {"properties", std::move(properties)},
                             {"required", std::move(required)}}}}}});
    }
    return block;
}

std::vector<SeedRecord> load_seed_dataset(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in)
        throw ValidationError("cannot open seed dataset: " + path.string(), "");
    std::vector<SeedRecord> records;
    std::set<std::string> seen_ids;
    std::string line;
    std::size_t line_number = 0;
    while (std::getline(in, line)) {
        ++line_number;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        json value;
        try {
            value = json::parse(line);
        } catch (const json::parse_error& e) {
            throw ValidationError(path.string() + ":" +
                                      std::to_string(line_number) +
                                      ": invalid JSON: " + e.what(),
                                  "");
        }
        SeedRecord record;
        try {
            record = record_from_json(value);
        } catch (const ValidationError& e) {
            throw ValidationError(path.string() + ":" +
                                      std::to_string(line_number) + ": " +
                                      e.what(),
                                  e.record_id());
        }
        if (!seen_ids.insert(record.id).second)
            throw ValidationError(path.string() + ":" +
                                      std::to_string(line_number) +
                                      ": duplicate record id '" + record.id + "'",
                                  record.id);
        records.push_back(std::move(record));
    }
    return records;
}

void save_seed_dataset(const std::filesystem::path& path,
                       std::span<const SeedRecord> records) {
    std::ofstream out(path);
    if (!out)
        throw std::runtime_error("cannot write seed dataset: " + path.string());
    for (const auto& record : records)
        out << record_to_json(record).dump() << '\n';
}

QueryPrompt build_query_prompt(const SeedRecord& record,
                               std::string_view directives) {
    std::ostringstream ctx;
    ctx << "### Seed " << record.id << "\n";
    ctx << "Query: " << record.query << "\n";
    ctx << "Tools:\n";
    for (const auto& tool : record.tools) {
        ctx << "- " << tool.name;
        if (!tool.description.empty()) ctx << ": " << tool.description;
        ctx << "\n";
        for (const auto& param : tool.parameters) {
            ctx << "    " << param.name << " (" << param.type;
            if (param.required) ctx << ", required";
            ctx << ")";
            if (!param.description.empty()) ctx << ": " << param.description;
            if (!param.enum_values.empty()) {
                ctx << " [";
                for (std::size_t i = 0; i < param.enum_values.size(); ++i) {
                    if (i > 0) ctx << ", ";
                    ctx << param.enum_values[i];
                }
                ctx << "]";
            }
            ctx << "\n";
        }
    }
    ctx << "Ground truth: " << callspec::serialize_answer(record.answer) << "\n";
    ctx << "Directives: " << directives << "\n";

    QueryPrompt prompt;
    prompt.seed_id = record.id;
    prompt.rendered_context = ctx.str();
    prompt.directives = std::string(directives);
    prompt.source = record;
    return prompt;
}

void validate_schedule(const CurriculumSchedule& schedule) {
    if (schedule.rounds.empty())
        throw std::invalid_argument("curriculum schedule lists no rounds");
    for (std::size_t r = 0; r < schedule.rounds.size(); ++r) {
        const CurriculumMix& mix = schedule.rounds[r];
        std::string where = "curriculum round " + std::to_string(r);
        if (mix.count == 0)
            throw std::invalid_argument(where + ": count must be positive");
        if (mix.fractions.empty())
            throw std::invalid_argument(where + ": empty mix");
        double total = 0.0;
        for (const auto& [complexity, fraction] : mix.fractions) {
            (void)complexity;
            if (fraction < 0.0)
                throw std::invalid_argument(where + ": negative fraction");
            total += fraction;
        }
        if (std::abs(total - 1.0) > 1e-9)
            throw std::invalid_argument(where + ": fractions sum to " +
                                        std::to_string(total) + ", expected 1");
    }
}

std::vector<QueryPrompt> compose_round_dataset(std::span<const SeedRecord> seeds,
                                               const CurriculumSchedule& schedule,
                                               std::size_t round_index,
                                               std::uint64_t rng_seed,
                                               std::vector<std::string>* warnings,
                                               std::string_view directives) {
    validate_schedule(schedule);
    if (round_index >= schedule.rounds.size())
        throw std::out_of_range("round index " + std::to_string(round_index) +
                                " outside schedule of " +
                                std::to_string(schedule.rounds.size()) +
                                " rounds");
    const CurriculumMix& mix = schedule.rounds[round_index];

    // Largest-remainder apportionment: every class lands within one unit
    // of fraction * count and quotas add up to count exactly.
    struct Quota {
        Complexity complexity;
        std::size_t floor_count;
        double remainder;
    };
    std::vector<Quota> quotas;
    std::size_t assigned = 0;
    for (const auto& [complexity, fraction] : mix.fractions) {
        double exact = fraction * static_cast<double>(mix.count);
        auto floor_count = static_cast<std::size_t>(exact);
        quotas.push_back({complexity, floor_count, exact - static_cast<double>(floor_count)});
        assigned += floor_count;
    }
    std::stable_sort(quotas.begin(), quotas.end(),
                     [](const Quota& a, const Quota& b) {
                         return a.remainder > b.remainder;
                     });
    for (std::size_t i = 0; assigned < mix.count; ++assigned, ++i)
        ++quotas[i % quotas.size()].floor_count;

    std::map<Complexity, std::vector<const SeedRecord*>> pools;
    for (const auto& seed : seeds) pools[seed.complexity].push_back(&seed);

    Rng rng(mix_seed(rng_seed, static_cast<std::uint64_t>(round_index)));
    std::vector<QueryPrompt> prompts;
    prompts.reserve(mix.count);
    std::stable_sort(quotas.begin(), quotas.end(),
                     [](const Quota& a, const Quota& b) {
                         return a.complexity < b.complexity;
                     });
    for (const auto& quota : quotas) {
        if (quota.floor_count == 0) continue;
        auto pool_it = pools.find(quota.complexity);
        if (pool_it == pools.end() || pool_it->second.empty())
            throw std::runtime_error(std::string("no seeds of complexity '") +
                                     to_string(quota.complexity) +
                                     "' available for round " +
                                     std::to_string(round_index));
        std::vector<const SeedRecord*> pool = pool_it->second;
        if (pool.size() >= quota.floor_count) {
            // Partial Fisher-Yates: the first floor_count entries become a
            // uniform without-replacement draw.
            for (std::size_t i = 0; i < quota.floor_count; ++i) {
                std::size_t j = i + static_cast<std::size_t>(
                                        rng.next_below(pool.size() - i));
                std::swap(pool[i], pool[j]);
                prompts.push_back(build_query_prompt(*pool[i], directives));
            }
        } else {
            if (warnings != nullptr)
                warnings->push_back(
                    std::string("complexity '") + to_string(quota.complexity) +
                    "' has " + std::to_string(pool.size()) + " seeds for a quota of " +
                    std::to_string(quota.floor_count) + " in round " +
                    std::to_string(round_index) + "; sampling with replacement");
            for (std::size_t i = 0; i < quota.floor_count; ++i) {
                std::size_t j = static_cast<std::size_t>(rng.next_below(pool.size()));
                prompts.push_back(build_query_prompt(*pool[j], directives));
            }
        }
    }
    return prompts;
}

}  // namespace fcarena::corpus

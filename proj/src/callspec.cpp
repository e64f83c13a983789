#include "fcarena/callspec.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>

namespace fcarena::callspec {

namespace {

std::string trim(std::string_view s) {
    std::size_t begin = 0;
    std::size_t end = s.size();
    while (begin < end && std::isspace(static_cast<unsigned char>(s[begin]))) ++begin;
    while (end > begin && std::isspace(static_cast<unsigned char>(s[end - 1]))) --end;
    return std::string(s.substr(begin, end - begin));
}

std::string lowercase(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

double as_double(const json& v) {
    if (v.is_number_integer()) return static_cast<double>(v.get<std::int64_t>());
    if (v.is_number_unsigned()) return static_cast<double>(v.get<std::uint64_t>());
    return v.get<double>();
}

bool numbers_equal(const json& a, const json& b) {
    if (a.is_number_integer() && b.is_number_integer()) {
        return a.get<std::int64_t>() == b.get<std::int64_t>();
    }
    return std::fabs(as_double(a) - as_double(b)) <= kNumericTolerance;
}

void collect_value_diffs(const json& a, const json& b, const std::string& path,
                         std::vector<std::string>& out);

void collect_object_diffs(const json& a, const json& b, const std::string& path,
                          std::vector<std::string>& out) {
    for (auto it = a.begin(); it != a.end(); ++it) {
        const std::string child = path + "." + it.key();
        auto other = b.find(it.key());
        if (other == b.end()) {
            out.push_back(child);
        } else {
            collect_value_diffs(it.value(), *other, child, out);
        }
    }
    for (auto it = b.begin(); it != b.end(); ++it) {
        if (!a.contains(it.key())) {
            out.push_back(path + "." + it.key());
        }
    }
}

void collect_value_diffs(const json& a, const json& b, const std::string& path,
                         std::vector<std::string>& out) {
    if (a.is_number() && b.is_number()) {
        if (!numbers_equal(a, b)) out.push_back(path);
        return;
    }
    if (a.type() != b.type()) {
        out.push_back(path);
        return;
    }
    if (a.is_object()) {
        collect_object_diffs(a, b, path, out);
        return;
    }
    if (a.is_array()) {
        const std::size_t common = std::min(a.size(), b.size());
        for (std::size_t i = 0; i < common; ++i) {
            collect_value_diffs(a[i], b[i], path + "[" + std::to_string(i) + "]", out);
        }
        if (a.size() != b.size()) out.push_back(path);
        return;
    }
    if (a != b) out.push_back(path);
}

CanonicalCall call_from_json(const json& value) {
    if (!value.is_object() || !value.contains("name") || !value["name"].is_string()) {
        throw FormatError("call object must carry a string \"name\"");
    }
    CanonicalCall call;
    call.tool_name = trim(value["name"].get<std::string>());
    if (call.tool_name.empty()) {
        throw FormatError("call tool name must be non-empty");
    }
    if (value.contains("arguments")) {
        if (!value["arguments"].is_object()) {
            throw FormatError("call \"arguments\" must be an object");
        }
        call.arguments = canonicalize_value(value["arguments"]);
    }
    return call;
}

// Multiset matching of calls under a tolerance-aware predicate, by
// backtracking over pairings. Call lists are small (parallel calls are a
// handful at most), so this stays cheap.
template <typename Pred>
bool multiset_match(const std::vector<CanonicalCall>& a, const std::vector<CanonicalCall>& b,
                    Pred&& matches) {
    if (a.size() != b.size()) return false;
    std::vector<bool> used(b.size(), false);
    const auto try_match = [&](auto&& self, std::size_t i) -> bool {
        if (i == a.size()) return true;
        for (std::size_t j = 0; j < b.size(); ++j) {
            if (used[j] || !matches(a[i], b[j])) continue;
            used[j] = true;
            if (self(self, i + 1)) return true;
            used[j] = false;
        }
        return false;
    };
    return try_match(try_match, 0);
}

}  // namespace

CanonicalAnswer CanonicalAnswer::make_refusal() {
    CanonicalAnswer answer;
    answer.refusal = true;
    return answer;
}

CanonicalAnswer CanonicalAnswer::make_calls(std::vector<CanonicalCall> calls) {
    if (calls.empty()) {
        throw FormatError("a Calls answer must contain at least one call");
    }
    CanonicalAnswer answer;
    answer.calls = std::move(calls);
    return answer;
}

const char* to_string(CallDiff::Kind kind) {
    switch (kind) {
        case CallDiff::Kind::equal: return "equal";
        case CallDiff::Kind::tool_mismatch: return "tool_mismatch";
        case CallDiff::Kind::missing_call: return "missing_call";
        case CallDiff::Kind::extra_call: return "extra_call";
        case CallDiff::Kind::arg_mismatch: return "arg_mismatch";
        case CallDiff::Kind::variant_mismatch: return "variant_mismatch";
    }
    return "unknown";
}

json canonicalize_value(const json& value) {
    switch (value.type()) {
        case json::value_t::string:
            return json(trim(value.get_ref<const std::string&>()));
        case json::value_t::number_float: {
            const double d = value.get<double>();
            if (std::isfinite(d) && std::floor(d) == d &&
                std::fabs(d) <= 9007199254740992.0) {  // 2^53
                return json(static_cast<std::int64_t>(d));
            }
            return value;
        }
        case json::value_t::number_unsigned: {
            const std::uint64_t u = value.get<std::uint64_t>();
            if (u <= static_cast<std::uint64_t>(INT64_MAX)) {
                return json(static_cast<std::int64_t>(u));
            }
            return value;
        }
        case json::value_t::array: {
            json out = json::array();
            for (const auto& item : value) out.push_back(canonicalize_value(item));
            return out;
        }
        case json::value_t::object: {
            json out = json::object();
            for (auto it = value.begin(); it != value.end(); ++it) {
                out[it.key()] = canonicalize_value(it.value());
            }
            return out;
        }
        default:
            return value;
    }
}

bool values_equal(const json& a, const json& b) {
    if (a.is_number() && b.is_number()) return numbers_equal(a, b);
    if (a.type() != b.type()) return false;
    if (a.is_object()) {
        if (a.size() != b.size()) return false;
        for (auto it = a.begin(); it != a.end(); ++it) {
            auto other = b.find(it.key());
            if (other == b.end() || !values_equal(it.value(), *other)) return false;
        }
        return true;
    }
    if (a.is_array()) {
        if (a.size() != b.size()) return false;
        for (std::size_t i = 0; i < a.size(); ++i) {
            if (!values_equal(a[i], b[i])) return false;
        }
        return true;
    }
    return a == b;
}

CanonicalAnswer parse_answer(std::string_view raw, const ParseOptions& opts) {
    const std::string flat = lowercase(trim(raw));
    for (const auto& phrase : opts.refusal_phrases) {
        if (flat == lowercase(phrase)) return CanonicalAnswer::make_refusal();
    }

    json parsed;
    try {
        parsed = json::parse(raw);
    } catch (const json::parse_error& e) {
        throw ParseError(e.what(), e.byte);
    }
    return answer_from_json(parsed);
}

json answer_to_json(const CanonicalAnswer& answer) {
    if (answer.is_refusal()) {
        return json{{"refusal", true}};
    }
    json calls = json::array();
    for (const auto& call : answer.calls) {
        calls.push_back(json{{"name", call.tool_name}, {"arguments", call.arguments}});
    }
    return json{{"calls", std::move(calls)}};
}

CanonicalAnswer answer_from_json(const json& value) {
    if (!value.is_object()) {
        throw FormatError("answer must be a JSON object");
    }
    if (value.contains("refusal")) {
        if (!value["refusal"].is_boolean() || !value["refusal"].get<bool>()) {
            throw FormatError("\"refusal\" must be the literal true");
        }
        return CanonicalAnswer::make_refusal();
    }
    if (value.contains("calls")) {
        if (!value["calls"].is_array()) {
            throw FormatError("\"calls\" must be an array");
        }
        std::vector<CanonicalCall> calls;
        for (const auto& item : value["calls"]) {
            calls.push_back(call_from_json(item));
        }
        return CanonicalAnswer::make_calls(std::move(calls));
    }
    throw FormatError("unknown top-level answer shape (expected \"calls\" or \"refusal\")");
}

std::string serialize_answer(const CanonicalAnswer& answer) {
    return answer_to_json(answer).dump();
}

bool calls_equal(const CanonicalCall& a, const CanonicalCall& b) {
    return a.tool_name == b.tool_name && values_equal(a.arguments, b.arguments);
}

bool answers_equal(const CanonicalAnswer& y, const CanonicalAnswer& y_hat) {
    if (y.is_refusal() != y_hat.is_refusal()) return false;
    if (y.is_refusal()) return true;
    return multiset_match(y.calls, y_hat.calls, calls_equal);
}

bool tool_names_match(const CanonicalAnswer& y, const CanonicalAnswer& y_hat) {
    if (y.is_refusal() != y_hat.is_refusal()) return false;
    if (y.is_refusal()) return true;
    if (y.calls.size() != y_hat.calls.size()) return false;
    std::vector<std::string> a, b;
    a.reserve(y.calls.size());
    b.reserve(y_hat.calls.size());
    for (const auto& call : y.calls) a.push_back(call.tool_name);
    for (const auto& call : y_hat.calls) b.push_back(call.tool_name);
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    return a == b;
}

CallDiff diff_answers(const CanonicalAnswer& y, const CanonicalAnswer& y_hat) {
    CallDiff diff;
    if (y.is_refusal() != y_hat.is_refusal()) {
        diff.kind = CallDiff::Kind::variant_mismatch;
        return diff;
    }
    if (answers_equal(y, y_hat)) {
        diff.kind = CallDiff::Kind::equal;
        return diff;
    }
    if (!tool_names_match(y, y_hat)) {
        if (y.calls.size() < y_hat.calls.size()) {
            diff.kind = CallDiff::Kind::missing_call;
        } else if (y.calls.size() > y_hat.calls.size()) {
            diff.kind = CallDiff::Kind::extra_call;
        } else {
            diff.kind = CallDiff::Kind::tool_mismatch;
        }
        return diff;
    }

    // Same tool-name multiset, differing arguments: pair calls greedily in
    // y_hat order (first unused y call with the same name) and report every
    // differing path.
    diff.kind = CallDiff::Kind::arg_mismatch;
    std::vector<bool> used(y.calls.size(), false);
    for (std::size_t j = 0; j < y_hat.calls.size(); ++j) {
        std::size_t pick = y.calls.size();
        for (std::size_t i = 0; i < y.calls.size(); ++i) {
            if (used[i] || y.calls[i].tool_name != y_hat.calls[j].tool_name) continue;
            // Prefer an exactly matching call so equal pairs never produce paths.
            if (calls_equal(y.calls[i], y_hat.calls[j])) {
                pick = i;
                break;
            }
            if (pick == y.calls.size()) pick = i;
        }
        used[pick] = true;
        const std::string base = "calls[" + std::to_string(j) + "].arguments";
        collect_value_diffs(y.calls[pick].arguments, y_hat.calls[j].arguments, base,
                            diff.paths);
    }
    return diff;
}

}  // namespace fcarena::callspec

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

// Canonical representation and equality semantics for function-call
// answers. "Equal" here means structural (AST) equality: call order at the
// top level is ignored, object keys are sorted, strings are trimmed, and
// numbers compare within an absolute tolerance so that serialization
// jitter (1 vs 1.0, 0.1 vs 0.10000000000000001) never counts as a model
// failure.
namespace fcarena::callspec {

using json = nlohmann::json;

// Absolute tolerance for numeric argument comparison, applied after
// decimal normalization (integral floats collapse to integers).
inline constexpr double kNumericTolerance = 1e-9;

class ParseError : public std::runtime_error {
  public:
    ParseError(const std::string& what, std::size_t byte_offset)
        : std::runtime_error(what), byte_offset_(byte_offset) {}
    std::size_t byte_offset() const { return byte_offset_; }

  private:
    std::size_t byte_offset_;
};

class FormatError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

struct CanonicalCall {
    std::string tool_name;
    json arguments = json::object();  // canonical: keys sorted, values normalized
};

struct CanonicalAnswer {
    // Either a non-empty list of calls or an explicit refusal.
    std::vector<CanonicalCall> calls;
    bool refusal = false;

    static CanonicalAnswer make_refusal();
    static CanonicalAnswer make_calls(std::vector<CanonicalCall> calls);
    bool is_refusal() const { return refusal; }
};

struct CallDiff {
    enum class Kind {
        equal,
        tool_mismatch,
        missing_call,
        extra_call,
        arg_mismatch,
        variant_mismatch,
    };
    Kind kind = Kind::equal;
    std::vector<std::string> paths;  // differing argument paths (arg_mismatch)
};

const char* to_string(CallDiff::Kind kind);

// Recursively canonicalize a JSON value: trim strings, collapse integral
// floats to integers, sort object keys (nlohmann's default map already
// orders them), preserve array order.
json canonicalize_value(const json& value);

// Tolerance-aware structural equality of canonical values.
bool values_equal(const json& a, const json& b);

struct ParseOptions {
    // Trimmed, case-insensitive plain-text markers that map to Refusal.
    std::vector<std::string> refusal_phrases = {
        "i cannot help with that",
        "i can't help with that",
        "no suitable tool is available",
        "none of the provided tools apply",
    };
};

// Parse raw model output into a canonical answer. Accepts the canonical
// JSON shapes ({"calls": [...]} / {"refusal": true}) and the configured
// refusal phrase set.
CanonicalAnswer parse_answer(std::string_view raw, const ParseOptions& opts = {});

json answer_to_json(const CanonicalAnswer& answer);
CanonicalAnswer answer_from_json(const json& value);

// Key-sorted serialization: byte-equal serializations iff the canonical
// forms are identical.
std::string serialize_answer(const CanonicalAnswer& answer);

bool calls_equal(const CanonicalCall& a, const CanonicalCall& b);

// The y = y_hat predicate: same variant and the same multiset of calls,
// where a call matches on tool name plus exact canonical-argument
// equality. Top-level call order is ignored.
bool answers_equal(const CanonicalAnswer& y, const CanonicalAnswer& y_hat);

// Stage-1 predicate: multisets of tool names equal, arguments ignored.
// Refusal matches only Refusal.
bool tool_names_match(const CanonicalAnswer& y, const CanonicalAnswer& y_hat);

CallDiff diff_answers(const CanonicalAnswer& y, const CanonicalAnswer& y_hat);

}  // namespace fcarena::callspec

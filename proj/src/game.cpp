#include "fcarena/game.hpp"

#include <fstream>

namespace fcarena::game {

using callspec::json;

AttackOutcome adversarial_reward(const arbiter::JudgeVerdict& verdict,
                                 const callspec::CanonicalAnswer& y,
                                 const callspec::CanonicalAnswer& y_hat,
                                 std::string rewritten_id) {
    AttackOutcome outcome;
    outcome.rewritten_id = std::move(rewritten_id);
    outcome.verdict = verdict;
    outcome.defender_answer = y;
    bool defender_failed = !callspec::answers_equal(y, y_hat);
    outcome.r_adv = (verdict.r_judge == 1 && defender_failed) ? 1 : -1;
    return outcome;
}

DefenseOutcome defense_reward(const callspec::CanonicalAnswer& y,
                              const callspec::CanonicalAnswer& y_hat,
                              std::string rewritten_id) {
    DefenseOutcome outcome;
    outcome.rewritten_id = std::move(rewritten_id);
    outcome.answer = y;
    outcome.r_f = callspec::answers_equal(y, y_hat) ? 1 : -1;
    return outcome;
}

bool is_bad_case(const AttackOutcome& outcome) { return outcome.r_adv == 1; }

json bad_case_to_json(const BadCaseRecord& record) {
    return json{{"rewritten_query", record.rewritten_query},
                {"seed_id", record.seed_id},
                {"actions", record.actions},
                {"ground_truth", callspec::answer_to_json(record.ground_truth)},
                {"round", record.round},
                {"timestep", record.timestep}};
}

BadCaseRecord bad_case_from_json(const json& value) {
    if (!value.is_object())
        throw callspec::FormatError("bad-case record is not a JSON object");
    BadCaseRecord record;
    try {
        record.rewritten_query = value.at("rewritten_query").get<std::string>();
        record.seed_id = value.at("seed_id").get<std::string>();
        record.actions = value.at("actions").get<std::vector<std::string>>();
        record.ground_truth = callspec::answer_from_json(value.at("ground_truth"));
        record.round = value.at("round").get<int>();
        record.timestep = value.at("timestep").get<int>();
    } catch (const json::exception& e) {
        throw callspec::FormatError(std::string("malformed bad-case record: ") +
                                    e.what());
    }
    return record;
}

void write_bad_cases(const std::filesystem::path& path,
                     std::span<const BadCaseRecord> records) {
    std::ofstream out(path);
    if (!out)
        throw std::runtime_error("cannot write bad cases: " + path.string());
    for (const auto& record : records)
        out << bad_case_to_json(record).dump() << '\n';
}

std::vector<BadCaseRecord> load_bad_cases(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("cannot open bad cases: " + path.string());
    std::vector<BadCaseRecord> records;
    std::string line;
    std::size_t line_number = 0;
    while (std::getline(in, line)) {
        ++line_number;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        try {
            records.push_back(bad_case_from_json(json::parse(line)));
        } catch (const std::exception& e) {
            throw std::runtime_error(path.string() + ":" +
                                     std::to_string(line_number) + ": " +
                                     e.what());
        }
    }
    return records;
}

}  // namespace fcarena::game

#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "fcarena/arbiter.hpp"
#include "fcarena/callspec.hpp"

// Zero-sum reward coupling between attacker and defender. On judge-valid
// rewrites the attacker scores +1 exactly when the defender's answer
// deviates from ground truth; the defender scores the negation.
namespace fcarena::game {

struct AttackOutcome {
    std::string rewritten_id;
    arbiter::JudgeVerdict verdict;
    callspec::CanonicalAnswer defender_answer;
    int r_adv = -1;
};

struct DefenseOutcome {
    std::string rewritten_id;
    callspec::CanonicalAnswer answer;
    int r_f = -1;
};

AttackOutcome adversarial_reward(const arbiter::JudgeVerdict& verdict,
                                 const callspec::CanonicalAnswer& y,
                                 const callspec::CanonicalAnswer& y_hat,
                                 std::string rewritten_id = {});

DefenseOutcome defense_reward(const callspec::CanonicalAnswer& y,
                              const callspec::CanonicalAnswer& y_hat,
                              std::string rewritten_id = {});

bool is_bad_case(const AttackOutcome& outcome);

struct BadCaseRecord {
    std::string rewritten_query;
    std::string seed_id;
    std::vector<std::string> actions;
    callspec::CanonicalAnswer ground_truth;
    int round = 0;
    int timestep = 0;
};

callspec::json bad_case_to_json(const BadCaseRecord& record);
BadCaseRecord bad_case_from_json(const callspec::json& value);

void write_bad_cases(const std::filesystem::path& path,
                     std::span<const BadCaseRecord> records);
std::vector<BadCaseRecord> load_bad_cases(const std::filesystem::path& path);

}  // namespace fcarena::game

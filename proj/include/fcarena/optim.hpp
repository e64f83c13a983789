#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <utility>
#include <vector>

#include "fcarena/corpus.hpp"
#include "fcarena/rewriter.hpp"

// Policy optimization: negative log-likelihood loss, score-function policy
// gradient with optional baseline, a single-epoch clipped-surrogate variant,
// exact enumeration oracles for verification, and the early-stop monitor.
namespace fcarena::optim {

struct RolloutBatch {
    std::vector<corpus::QueryPrompt> prompts;
    struct Entry {
        std::size_t prompt_index = 0;
        rewriter::RewrittenQuery rewritten;
        double shaped_reward = 0.0;  // game reward plus diversity bonus
    };
    std::vector<Entry> entries;
};

struct TrainStepReport {
    double objective_estimate = 0.0;
    double gradient_norm = 0.0;
    double entropy = 0.0;
    bool updated = false;
};

enum class Baseline { none, batch_mean };

double sft_loss(const rewriter::PolicyParams& params,
                std::span<const std::pair<corpus::QueryPrompt,
                                          std::vector<std::string>>> dataset);

double estimate_objective(const RolloutBatch& batch);

std::pair<rewriter::PolicyParams, TrainStepReport> policy_gradient_step(
    const rewriter::PolicyParams& params, const RolloutBatch& batch,
    double learning_rate, Baseline baseline = Baseline::batch_mean);

// One pass of minibatched clipped-surrogate ascent against the stored
// rollout logprobs; minibatch_size 0 means a quarter of the batch.
std::pair<rewriter::PolicyParams, TrainStepReport> clipped_surrogate_step(
    const rewriter::PolicyParams& params, const RolloutBatch& batch,
    double learning_rate, double clip_ratio = 0.2,
    std::size_t minibatch_size = 0);

using SequenceReward = std::function<double(std::span<const std::string>)>;

// Exact expectation over all action sequences of the given length; the
// gradient variant returns d/d theta of that expectation, laid out like
// theta. Both are enumeration oracles for verifying the sampled estimator.
double enumerated_expected_reward(const rewriter::PolicyParams& params,
                                  const corpus::QueryPrompt& prompt,
                                  const SequenceReward& reward,
                                  std::size_t seq_len = 1);
std::vector<double> enumerated_expected_reward_gradient(
    const rewriter::PolicyParams& params, const corpus::QueryPrompt& prompt,
    const SequenceReward& reward, std::size_t seq_len = 1);

// Max relative error between the analytic gradient and central differences
// of the objective, normalized by the larger gradient magnitude.
double finite_difference_check(
    const rewriter::PolicyParams& params,
    const std::function<double(const rewriter::PolicyParams&)>& objective,
    std::span<const double> analytic_gradient, double epsilon_fd = 1e-5);

struct RewardHistory {
    std::vector<double> per_timestep_mean;
    int window = 10;
    double epsilon = 0.2;
};

// True once the last `window` consecutive deltas are all below epsilon,
// which needs at least window + 1 recorded means.
bool should_stop(const RewardHistory& history);

}  // namespace fcarena::optim

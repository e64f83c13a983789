#include "fcarena/optim.hpp"

#include <cmath>
#include <stdexcept>

#include "fcarena/kernels.hpp"

namespace fcarena::optim {

using rewriter::kNumOperators;
using rewriter::kThetaSize;
using rewriter::PolicyParams;

namespace {

const corpus::QueryPrompt& prompt_of(const RolloutBatch& batch,
                                     const RolloutBatch::Entry& entry) {
    if (entry.prompt_index >= batch.prompts.size())
        throw std::out_of_range("rollout entry references prompt " +
                                std::to_string(entry.prompt_index) +
                                " in a batch of " +
                                std::to_string(batch.prompts.size()));
    return batch.prompts[entry.prompt_index];
}

double entry_entropy(const PolicyParams& params,
                     const corpus::QueryPrompt& prompt,
                     std::span<const std::string> actions,
                     std::size_t& steps) {
    double total = 0.0;
    std::vector<std::string> prefix;
    for (const std::string& name : actions) {
        auto probs = rewriter::action_distribution(params, prompt, prefix);
        for (double p : probs)
            if (p > 0.0) total -= p * std::log(p);
        prefix.push_back(name);
        ++steps;
    }
    return total;
}

double batch_mean_reward(const RolloutBatch& batch) {
    double total = 0.0;
    for (const auto& entry : batch.entries) total += entry.shaped_reward;
    return total / static_cast<double>(batch.entries.size());
}

void require_logprobs(const RolloutBatch& batch) {
    for (const auto& entry : batch.entries)
        if (!entry.rewritten.logprob.has_value())
            throw std::invalid_argument(
                "rollout for seed " + entry.rewritten.seed_id +
                " has no logprob; external rollouts are not gradient-trainable");
}

void enumerate_sequences(const PolicyParams& params,
                         const corpus::QueryPrompt& prompt,
                         std::size_t seq_len,
                         std::vector<std::string>& prefix, double prob,
                         const std::function<void(std::span<const std::string>,
                                                  double)>& visit) {
    if (prefix.size() == seq_len) {
        visit(prefix, prob);
        return;
    }
    auto probs = rewriter::action_distribution(params, prompt, prefix);
    for (std::size_t op = 0; op < kNumOperators; ++op) {
        prefix.emplace_back(
            rewriter::operator_name(static_cast<rewriter::RewriteOp>(op)));
        enumerate_sequences(params, prompt, seq_len, prefix, prob * probs[op],
                            visit);
        prefix.pop_back();
    }
}

}  // namespace

double sft_loss(const PolicyParams& params,
                std::span<const std::pair<corpus::QueryPrompt,
                                          std::vector<std::string>>> dataset) {
    if (dataset.empty())
        throw std::invalid_argument("sft_loss needs a non-empty dataset");
    double total = 0.0;
    for (const auto& [prompt, actions] : dataset)
        total -= rewriter::logprob_of(params, prompt, actions);
    return total / static_cast<double>(dataset.size());
}

double estimate_objective(const RolloutBatch& batch) {
    if (batch.entries.empty())
        throw std::invalid_argument("empty rollout batch");
    return batch_mean_reward(batch);
}

std::pair<PolicyParams, TrainStepReport> policy_gradient_step(
    const PolicyParams& params, const RolloutBatch& batch,
    double learning_rate, Baseline baseline) {
    if (batch.entries.empty())
        throw std::invalid_argument("empty rollout batch");
    require_logprobs(batch);

    double mean_reward = batch_mean_reward(batch);
    double base = baseline == Baseline::batch_mean ? mean_reward : 0.0;
    double inv_batch = 1.0 / static_cast<double>(batch.entries.size());

    std::vector<double> grad(kThetaSize, 0.0);
    double entropy_total = 0.0;
    std::size_t entropy_steps = 0;
    for (const auto& entry : batch.entries) {
        const corpus::QueryPrompt& prompt = prompt_of(batch, entry);
        double weight = (entry.shaped_reward - base) * inv_batch;
        std::vector<double> entry_grad = rewriter::logprob_gradient(
            params, prompt, entry.rewritten.actions);
        kernels::axpy(grad, entry_grad, weight);
        entropy_total +=
            entry_entropy(params, prompt, entry.rewritten.actions, entropy_steps);
    }

    PolicyParams updated = params;
    kernels::axpy(updated.theta, grad, learning_rate);

    TrainStepReport report;
    report.objective_estimate = mean_reward;
    report.gradient_norm = std::sqrt(kernels::dot(grad, grad));
    report.entropy =
        entropy_steps == 0 ? 0.0
                           : entropy_total / static_cast<double>(entropy_steps);
    report.updated = true;
    return {std::move(updated), report};
}

std::pair<PolicyParams, TrainStepReport> clipped_surrogate_step(
    const PolicyParams& params, const RolloutBatch& batch,
    double learning_rate, double clip_ratio, std::size_t minibatch_size) {
    if (batch.entries.empty())
        throw std::invalid_argument("empty rollout batch");
    if (!(clip_ratio > 0.0))
        throw std::invalid_argument("clip ratio must be positive");
    require_logprobs(batch);

    std::size_t batch_size = batch.entries.size();
    if (minibatch_size == 0) minibatch_size = std::max<std::size_t>(1, batch_size / 4);
    double mean_reward = batch_mean_reward(batch);

    double entropy_total = 0.0;
    std::size_t entropy_steps = 0;
    for (const auto& entry : batch.entries)
        entropy_total += entry_entropy(params, prompt_of(batch, entry),
                                       entry.rewritten.actions, entropy_steps);

    PolicyParams current = params;
    for (std::size_t start = 0; start < batch_size; start += minibatch_size) {
        std::size_t end = std::min(batch_size, start + minibatch_size);
        std::vector<double> grad(kThetaSize, 0.0);
        double inv_chunk = 1.0 / static_cast<double>(end - start);
        for (std::size_t i = start; i < end; ++i) {
            const auto& entry = batch.entries[i];
            const corpus::QueryPrompt& prompt = prompt_of(batch, entry);
            double advantage = entry.shaped_reward - mean_reward;
            double new_logprob =
                rewriter::logprob_of(current, prompt, entry.rewritten.actions);
            double ratio = std::exp(new_logprob - *entry.rewritten.logprob);
            bool clipped_out = (advantage > 0.0 && ratio > 1.0 + clip_ratio) ||
                               (advantage < 0.0 && ratio < 1.0 - clip_ratio);
            if (clipped_out) continue;
            std::vector<double> entry_grad = rewriter::logprob_gradient(
                current, prompt, entry.rewritten.actions);
            kernels::axpy(grad, entry_grad, advantage * ratio * inv_chunk);
        }
        kernels::axpy(current.theta, grad, learning_rate);
    }

    std::vector<double> delta(kThetaSize);
    for (std::size_t i = 0; i < kThetaSize; ++i)
        delta[i] = (current.theta[i] - params.theta[i]) / learning_rate;

    TrainStepReport report;
    report.objective_estimate = mean_reward;
    report.gradient_norm = std::sqrt(kernels::dot(delta, delta));
    report.entropy =
        entropy_steps == 0 ? 0.0
                           : entropy_total / static_cast<double>(entropy_steps);
    report.updated = true;
    return {std::move(current), report};
}

double enumerated_expected_reward(const PolicyParams& params,
                                  const corpus::QueryPrompt& prompt,
                                  const SequenceReward& reward,
                                  std::size_t seq_len) {
    if (seq_len == 0) throw std::invalid_argument("sequence length must be positive");
    double expectation = 0.0;
    std::vector<std::string> prefix;
    enumerate_sequences(params, prompt, seq_len, prefix, 1.0,
                        [&](std::span<const std::string> actions, double prob) {
                            expectation += prob * reward(actions);
                        });
    return expectation;
}

std::vector<double> enumerated_expected_reward_gradient(
    const PolicyParams& params, const corpus::QueryPrompt& prompt,
    const SequenceReward& reward, std::size_t seq_len) {
    if (seq_len == 0) throw std::invalid_argument("sequence length must be positive");
    std::vector<double> grad(kThetaSize, 0.0);
    std::vector<std::string> prefix;
    enumerate_sequences(
        params, prompt, seq_len, prefix, 1.0,
        [&](std::span<const std::string> actions, double prob) {
            std::vector<double> seq_grad =
                rewriter::logprob_gradient(params, prompt, actions);
            kernels::axpy(grad, seq_grad, prob * reward(actions));
        });
    return grad;
}

double finite_difference_check(
    const PolicyParams& params,
    const std::function<double(const PolicyParams&)>& objective,
    std::span<const double> analytic_gradient, double epsilon_fd) {
    if (analytic_gradient.size() != params.theta.size())
        throw std::invalid_argument("gradient size mismatch");
    if (!(epsilon_fd > 0.0))
        throw std::invalid_argument("finite-difference step must be positive");

    std::vector<double> numeric(params.theta.size());
    PolicyParams probe = params;
    for (std::size_t i = 0; i < params.theta.size(); ++i) {
        probe.theta[i] = params.theta[i] + epsilon_fd;
        double up = objective(probe);
        probe.theta[i] = params.theta[i] - epsilon_fd;
        double down = objective(probe);
        probe.theta[i] = params.theta[i];
        numeric[i] = (up - down) / (2.0 * epsilon_fd);
    }

    double scale = 1e-12;
    for (std::size_t i = 0; i < numeric.size(); ++i) {
        scale = std::max(scale, std::abs(numeric[i]));
        scale = std::max(scale, std::abs(analytic_gradient[i]));
    }
    double worst = 0.0;
    for (std::size_t i = 0; i < numeric.size(); ++i)
        worst = std::max(worst, std::abs(numeric[i] - analytic_gradient[i]) / scale);
    return worst;
}

bool should_stop(const RewardHistory& history) {
    if (history.window < 2)
        throw std::invalid_argument("early-stop window must be at least 2");
    if (!(history.epsilon > 0.0))
        throw std::invalid_argument("early-stop epsilon must be positive");
    std::size_t window = static_cast<std::size_t>(history.window);
    const auto& means = history.per_timestep_mean;
    if (means.size() < window + 1) return false;
    for (std::size_t i = means.size() - window; i < means.size(); ++i)
        if (!(std::abs(means[i] - means[i - 1]) < history.epsilon)) return false;
    return true;
}

}  // namespace fcarena::optim

#include "fcarena/diversity.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "fcarena/kernels.hpp"
#include "fcarena/rng.hpp"

namespace fcarena::diversity {

EmbeddingVector embed(std::string_view text, std::size_t dim) {
    if (text.empty())
        throw std::invalid_argument("cannot embed empty text");
    if (dim == 0) throw std::invalid_argument("embedding dimension must be positive");
    EmbeddingVector embedding;
    embedding.values.assign(dim, 0.0);
    for (std::size_t n = 2; n <= 3; ++n) {
        if (text.size() < n) continue;
        for (std::size_t i = 0; i + n <= text.size(); ++i) {
            std::uint64_t h = fnv1a64(text.substr(i, n));
            double sign = (h >> 63) != 0 ? 1.0 : -1.0;
            embedding.values[h % dim] += sign;
        }
    }
    double squared = kernels::dot(embedding.values, embedding.values);
    if (squared == 0.0) {
        embedding.values[fnv1a64(text) % dim] = 1.0;
        squared = 1.0;
    }
    double norm = std::sqrt(squared);
    kernels::scale(embedding.values, 1.0 / norm);
    embedding.norm = std::sqrt(kernels::dot(embedding.values, embedding.values));
    return embedding;
}

double cosine_similarity(const EmbeddingVector& a, const EmbeddingVector& b) {
    if (a.values.size() != b.values.size())
        throw std::invalid_argument("embedding dimensions differ: " +
                                    std::to_string(a.values.size()) + " vs " +
                                    std::to_string(b.values.size()));
    if (a.norm == 0.0 || b.norm == 0.0)
        throw std::invalid_argument("cosine of a zero embedding is undefined");
    double cosine = kernels::dot(a.values, b.values) / (a.norm * b.norm);
    return std::clamp(cosine, -1.0, 1.0);
}

DiversityReport batch_diversity(std::span<const EmbeddingVector> embeddings,
                                double alpha) {
    if (embeddings.size() < 2)
        throw std::invalid_argument("diversity needs a batch of at least 2");
    if (alpha < 0.0) throw std::invalid_argument("alpha must be non-negative");
    std::size_t batch = embeddings.size();
    double total = 0.0;
    for (std::size_t i = 0; i < batch; ++i)
        for (std::size_t j = i + 1; j < batch; ++j)
            total += 1.0 - cosine_similarity(embeddings[i], embeddings[j]);
    DiversityReport report;
    report.batch_size = batch;
    report.mean_pairwise_distance =
        total * 2.0 / (static_cast<double>(batch) * static_cast<double>(batch - 1));
    report.bonus = alpha * report.mean_pairwise_distance;
    return report;
}

double per_sample_diversity_bonus(std::span<const EmbeddingVector> embeddings,
                                  std::size_t index, double alpha) {
    if (embeddings.size() < 2)
        throw std::invalid_argument("diversity needs a batch of at least 2");
    if (index >= embeddings.size())
        throw std::out_of_range("sample index " + std::to_string(index) +
                                " outside batch of " +
                                std::to_string(embeddings.size()));
    if (alpha < 0.0) throw std::invalid_argument("alpha must be non-negative");
    double total = 0.0;
    for (std::size_t j = 0; j < embeddings.size(); ++j) {
        if (j == index) continue;
        total += 1.0 - cosine_similarity(embeddings[index], embeddings[j]);
    }
    return alpha * total / static_cast<double>(embeddings.size() - 1);
}

}  // namespace fcarena::diversity

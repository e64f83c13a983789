#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

// Text embeddings and the batch diversity bonus: alpha times the mean
// pairwise cosine distance of a batch, also distributable per sample so a
// shaped reward's batch mean reproduces the batch bonus exactly.
namespace fcarena::diversity {

inline constexpr std::size_t kDefaultDim = 256;
inline constexpr double kDefaultAlpha = 0.05;

struct EmbeddingVector {
    std::vector<double> values;
    double norm = 0.0;
};

// Deterministic hashed character n-gram (n in {2,3}) bag, L2-normalized.
EmbeddingVector embed(std::string_view text, std::size_t dim = kDefaultDim);

double cosine_similarity(const EmbeddingVector& a, const EmbeddingVector& b);

struct DiversityReport {
    std::size_t batch_size = 0;
    double mean_pairwise_distance = 0.0;  // in [0, 2]
    double bonus = 0.0;                   // alpha * mean_pairwise_distance
};

DiversityReport batch_diversity(std::span<const EmbeddingVector> embeddings,
                                double alpha);

// alpha * mean over j != index of (1 - cos(v_index, v_j)). Averaging this
// over the batch gives batch_diversity().bonus.
double per_sample_diversity_bonus(std::span<const EmbeddingVector> embeddings,
                                  std::size_t index, double alpha);

}  // namespace fcarena::diversity

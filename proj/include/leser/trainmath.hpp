#pragma once

#include <cstddef>
#include <vector>

namespace leser {

/// In-batch similarity matrix: sims[i][j] = sim(anchor_i, positive_j),
/// stored row-major.
struct SimilarityBatch {
    std::size_t n = 0;
    std::vector<double> sims;
    double scale = 20.0;

    [[nodiscard]] double at(std::size_t i, std::size_t j) const { return sims[i * n + j]; }
};

/// Multiple negatives symmetric ranking loss.
///
/// Half the sum of two mean cross-entropies over scale * sims: each row i
/// against target column i (anchor -> positives) and each column j against
/// target row j (positive -> anchors). Every off-diagonal entry acts as an
/// in-batch negative. Log-sum-exp is shifted by the max for stability.
///
/// Throws InvalidArgument when n == 0, sims.size() != n*n, or scale <= 0.
double mnsr_loss(const SimilarityBatch& batch);

}  // namespace leser

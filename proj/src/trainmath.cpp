#include "leser/trainmath.hpp"

#include <algorithm>
#include <cmath>

#include "leser/error.hpp"

namespace leser {

namespace {

// -log softmax(logits)[target]
template <typename Get>
double cross_entropy(std::size_t n, std::size_t target, Get logit) {
    double hi = logit(0);
    for (std::size_t i = 1; i < n; ++i) {
        hi = std::max(hi, logit(i));
    }
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sum += std::exp(logit(i) - hi);
    }
    return hi + std::log(sum) - logit(target);
}

}  // namespace

double mnsr_loss(const SimilarityBatch& batch) {
    const std::size_t n = batch.n;
    if (n == 0) {
        throw InvalidArgument("batch must contain at least one pair");
    }
    if (batch.sims.size() != n * n) {
        throw InvalidArgument("similarity matrix is not " + std::to_string(n) + "x" + std::to_string(n));
    }
    if (!(batch.scale > 0.0)) {
        throw InvalidArgument("scale must be positive");
    }
    const double s = batch.scale;

    double forward = 0.0;
    double backward = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        forward += cross_entropy(n, i, [&](std::size_t j) { return s * batch.at(i, j); });
        backward += cross_entropy(n, i, [&](std::size_t j) { return s * batch.at(j, i); });
    }
    const double loss = 0.5 * (forward / static_cast<double>(n) + backward / static_cast<double>(n));
    // Rounding can leave a tiny negative value when every target dominates.
    return std::max(loss, 0.0);
}

}  // namespace leser

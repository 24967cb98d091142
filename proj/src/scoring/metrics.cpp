#include "gel/scoring/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "gel/errors.hpp"

namespace gel {

namespace {

void check_inputs(std::span<const double> scores, std::span<const int> labels) {
    if (scores.size() != labels.size()) throw DimensionError("metrics: scores and labels differ in length");
    for (double s : scores) {
        if (!std::isfinite(s)) throw MetricError("metrics: non-finite score");
    }
    for (int l : labels) {
        if (l != 0 && l != 1) throw MetricError("metrics: labels must be 0 or 1");
    }
}

} // namespace

double auc(std::span<const double> scores, std::span<const int> labels) {
    check_inputs(scores, labels);
    const std::size_t n = scores.size();
    const auto positives = static_cast<std::size_t>(std::count(labels.begin(), labels.end(), 1));
    const std::size_t negatives = n - positives;
    if (positives == 0 || negatives == 0) throw MetricError("auc: both classes must be present");

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

    // Average ranks over tie groups; rank sum of positives gives U.
    double rank_sum = 0.0;
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && scores[order[j + 1]] == scores[order[i]]) ++j;
        const double mid = 0.5 * static_cast<double>(i + j) + 1.0;
        for (std::size_t k = i; k <= j; ++k) {
            if (labels[order[k]] == 1) rank_sum += mid;
        }
        i = j + 1;
    }
    const double p = static_cast<double>(positives);
    const double u = rank_sum - p * (p + 1.0) / 2.0;
    return u / (p * static_cast<double>(negatives));
}

double recall_at_k(std::span<const double> scores, std::span<const int> labels, Index k) {
    check_inputs(scores, labels);
    const auto n = static_cast<Index>(scores.size());
    if (k < 1 || k > n) throw MetricError("recall_at_k: k must lie in [1, n]");
    const auto positives = std::count(labels.begin(), labels.end(), 1);
    if (positives == 0) throw MetricError("recall_at_k: no positive labels");

    std::vector<std::size_t> order(scores.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
    Index hits = 0;
    for (Index r = 0; r < k; ++r) hits += labels[order[static_cast<std::size_t>(r)]];
    return static_cast<double>(hits) / static_cast<double>(positives);
}

Index default_k(Index n) {
    const auto tenth = static_cast<Index>(std::llround(static_cast<double>(n) / 10.0));
    return std::min(n, std::max<Index>(10, tenth));
}

Metrics evaluate(std::span<const double> scores, std::span<const int> labels, Index k) {
    Metrics m;
    m.auc = auc(scores, labels);
    m.recall_at_k = recall_at_k(scores, labels, k);
    m.k = k;
    m.n = static_cast<Index>(scores.size());
    m.anomalies = std::count(labels.begin(), labels.end(), 1);
    return m;
}

nlohmann::json to_json(const Metrics& m) {
    return {{"auc", m.auc}, {"recall_at_k", m.recall_at_k}, {"k", m.k}, {"n", m.n}, {"anomalies", m.anomalies}};
}

} // namespace gel

#pragma once

#include <span>

#include <json.hpp>

#include "gel/numeric/dense.hpp"

namespace gel {

/// Mann-Whitney AUC with ties counted 1/2. Throws MetricError unless both
/// classes are present.
double auc(std::span<const double> scores, std::span<const int> labels);

/// Fraction of positives among the k highest scores; ties go to the lower
/// node index. Throws MetricError if there are no positives or k is outside [1, n].
double recall_at_k(std::span<const double> scores, std::span<const int> labels, Index k);

/// max(10, round(n / 10)), capped at n.
Index default_k(Index n);

struct Metrics {
    double auc = 0.0;
    double recall_at_k = 0.0;
    Index k = 0;
    Index n = 0;
    Index anomalies = 0;
};

Metrics evaluate(std::span<const double> scores, std::span<const int> labels, Index k);
nlohmann::json to_json(const Metrics& m);

} // namespace gel

#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <vector>

#include <json.hpp>

#include "gel/graph/graph.hpp"
#include "gel/scoring/uncertainty.hpp"
#include "gel/training/train.hpp"

namespace gel {

/// lambda_f, lambda_t weight the feature and topology uncertainty blocks;
/// lambda_g, lambda_r weight graph and reconstruction uncertainty in each.
/// All zero gives the pure reconstruction-error score.
struct ScoreWeights {
    double feature = 0.8;
    double topology = 0.2;
    double graph = 0.3;
    double reconstruction = 0.7;

    static ScoreWeights reconstruction_only() { return {0.0, 0.0, 0.0, 0.0}; }
    bool all_zero() const { return feature == 0.0 && topology == 0.0 && graph == 0.0 && reconstruction == 0.0; }
    void validate() const;
};

nlohmann::json to_json(const ScoreWeights& w);
ScoreWeights score_weights_from_json(const nlohmann::json& j, ScoreWeights base = {});

enum class Component { GraphFeature, ReconstFeature, GraphTopology, ReconstTopology, ErrorFeature, ErrorTopology };
inline constexpr std::size_t kComponentCount = 6;

/// Per-node score decomposition. `components` hold raw values; `lower` and
/// `upper` are the min/max used for min-max normalization (a constant
/// component normalizes to 0).
struct AnomalyReport {
    std::array<DenseVector, kComponentCount> components;
    std::array<double, kComponentCount> lower{};
    std::array<double, kComponentCount> upper{};
    DenseVector score;
    /// Same model, all weights zero.
    DenseVector baseline;
    std::vector<bool> uncovered;

    const DenseVector& component(Component c) const { return components[static_cast<std::size_t>(c)]; }
    DenseVector normalized(Component c) const;
    Index size() const { return score.size(); }
};

/// Min-max scaling to [0, 1]; constant input maps to all zeros.
DenseVector min_max_normalize(const DenseVector& v, double* lower = nullptr, double* upper = nullptr);

/// Encodes the clean graph once and assembles
///   y = lf (lg Ug_f + lr Ur_f) + lt (lg Ug_t + lr Ur_t) + err_f + err_t
/// over min-max normalized components. err_f is the L1 feature error and
/// err_t sums 1 - A_hat over the node's actual neighbours.
AnomalyReport anomaly_scores(const ModelState& model, const AttributedGraph& g, const ScoreWeights& w,
                             const PairPolicy& policy = {}, std::uint64_t seed = 0);

/// node_id,y,u_graph_f,u_reconst_f,u_graph_t,u_reconst_t,err_f,err_t[,y_baseline]
void write_scores_csv(std::ostream& out, const AnomalyReport& report, bool include_baseline = false);
void write_scores_csv(const std::filesystem::path& path, const AnomalyReport& report, bool include_baseline = false);

} // namespace gel

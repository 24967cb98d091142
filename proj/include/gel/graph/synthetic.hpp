#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include <json.hpp>

#include "gel/graph/graph.hpp"

namespace gel {

/// Parameters of the anomaly-injected benchmark graph.
///
/// Normal nodes are drawn from `clusters` isotropic Gaussians (std
/// `cluster_std`, centres ~ N(0, center_spread^2)) and wired to their
/// `knn` nearest neighbours in feature space. `clique_count` cliques of
/// `clique_size` random nodes are then fully connected (structural
/// anomalies), and `outlier_count` further nodes get their features replaced
/// by a point at distance r * cluster_std from their own centre, r uniform in
/// [contextual_min_radius, contextual_max_radius] (contextual anomalies).
struct SyntheticConfig {
    Index num_nodes = 200;
    Index feature_dim = 8;
    Index clique_size = 5;
    Index clique_count = 2;
    Index outlier_count = 10;
    std::uint64_t seed = 0;

    Index clusters = 4;
    double cluster_std = 1.0;
    double center_spread = 3.0;
    Index knn = 3;
    double contextual_min_radius = 4.0;
    double contextual_max_radius = 6.0;

    /// Throws ContractError on infeasible counts or radii.
    void validate() const;
};

struct SyntheticGraph {
    AttributedGraph graph;
    std::vector<Index> cluster_of;
    DenseMatrix cluster_means;
    std::vector<Index> structural_nodes;
    std::vector<Index> contextual_nodes;
};

SyntheticGraph synthesize_graph(const SyntheticConfig& cfg);

nlohmann::json to_json(const SyntheticConfig& cfg);
SyntheticConfig synthetic_config_from_json(const nlohmann::json& j, SyntheticConfig base = {});

/// Writes features.csv, edges.csv, labels.csv and generation.json into `dir`.
void write_synthetic(const SyntheticGraph& result, const SyntheticConfig& cfg,
                     const std::filesystem::path& dir);

} // namespace gel

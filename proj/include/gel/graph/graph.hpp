#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <vector>

#include "gel/numeric/dense.hpp"

namespace gel {

/// Undirected edge, stored canonically with u < v.
struct Edge {
    Index u = 0;
    Index v = 0;

    friend bool operator==(const Edge&, const Edge&) = default;
    friend auto operator<=>(const Edge&, const Edge&) = default;
};

/// Returns the edge with endpoints ordered (min, max).
inline Edge canonical(Index a, Index b) { return a < b ? Edge{a, b} : Edge{b, a}; }

/// Node features, an undirected simple edge set and optional 0/1 anomaly labels.
/// Immutable after construction; the constructor canonicalizes and deduplicates
/// edges and throws ContractError on self-loops, out-of-range endpoints,
/// non-finite features or a label vector of the wrong length.
class AttributedGraph {
public:
    AttributedGraph(DenseMatrix features, std::vector<Edge> edges,
                    std::optional<std::vector<int>> labels = std::nullopt);

    Index num_nodes() const noexcept { return features_.rows(); }
    Index feature_dim() const noexcept { return features_.cols(); }
    const DenseMatrix& features() const noexcept { return features_; }
    const std::vector<Edge>& edges() const noexcept { return edges_; }
    bool has_labels() const noexcept { return labels_.has_value(); }
    const std::vector<int>& labels() const;

    bool has_edge(Index a, Index b) const;
    /// Sorted neighbour lists.
    const std::vector<std::vector<Index>>& neighbors() const noexcept { return neighbors_; }
    /// Dense 0/1 adjacency without self-loops.
    DenseMatrix adjacency() const;

private:
    DenseMatrix features_;
    std::vector<Edge> edges_;
    std::optional<std::vector<int>> labels_;
    std::vector<std::vector<Index>> neighbors_;
};

/// Reads the CSV triple described in the README. Directed duplicates collapse
/// into one undirected edge. Throws ParseError (with line number) or IoError.
AttributedGraph load_graph(const std::filesystem::path& features_path,
                           const std::filesystem::path& edges_path,
                           const std::optional<std::filesystem::path>& labels_path = std::nullopt);

/// Writes features with round-trip precision, one "u,v" line per edge and
/// (if present) one label per line.
void save_graph(const AttributedGraph& graph, const std::filesystem::path& features_path,
                const std::filesystem::path& edges_path,
                const std::optional<std::filesystem::path>& labels_path = std::nullopt);

/// D^{-1/2} (A + I) D^{-1/2} with degrees taken on A + I.
DenseMatrix normalized_adjacency(Index num_nodes, const std::vector<Edge>& edges);
inline DenseMatrix normalized_adjacency(const AttributedGraph& g) {
    return normalized_adjacency(g.num_nodes(), g.edges());
}

struct PerturbationConfig {
    /// Standard deviation of the additive feature noise. When `relative_to_std`
    /// is set, column h receives noise with std `noise_sigma * std(X[:, h])`.
    double noise_sigma = 0.1;
    bool relative_to_std = true;
    /// Probability of dropping each undirected edge. Must be < 1.
    double edge_dropout = 0.1;
    std::uint64_t seed = 0;

    void validate() const;
};

struct PerturbedGraph {
    DenseMatrix features;
    std::vector<Edge> edges;

    DenseMatrix adjacency(Index num_nodes) const;
};

/// Gaussian feature noise plus one Bernoulli(1 - p) keep-draw per undirected
/// edge. Deterministic in (cfg.seed, stream).
PerturbedGraph perturb(const AttributedGraph& g, const PerturbationConfig& cfg, std::uint64_t stream);

/// Same perturbation, packaged as a new graph that keeps the labels.
AttributedGraph corrupt(const AttributedGraph& g, const PerturbationConfig& cfg, std::uint64_t stream);

/// Population standard deviation of each feature column.
DenseVector column_std(const DenseMatrix& features);

} // namespace gel

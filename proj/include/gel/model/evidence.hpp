#pragma once

#include <cstdint>
#include <vector>

#include "gel/graph/graph.hpp"
#include "gel/numeric/dense.hpp"

namespace gel {

/// Lower bound added to the relu outputs of the nu and beta heads.
inline constexpr double kEvidenceFloor = 1e-6;
/// Lower bound on alpha - 1.
inline constexpr double kAlphaFloor = 1e-4;

/// Normal-Inverse-Gamma parameters, one set per (node, feature) entry.
/// Invariants: nu > 0, alpha > 1, beta > 0 entrywise; all four are n x d.
struct NIGParams {
    DenseMatrix gamma;
    DenseMatrix nu;
    DenseMatrix alpha;
    DenseMatrix beta;

    /// Throws ContractError on shape mismatch or a violated positivity invariant.
    void validate() const;
};

/// Node pairs evaluated by the topology head. Pairs are stored canonically
/// (first < second); `flags` is the observed adjacency entry and `weights`
/// the multiplicity each pair carries in summed losses.
struct PairSet {
    std::vector<Index> first;
    std::vector<Index> second;
    std::vector<double> flags;
    std::vector<double> weights;

    std::size_t size() const noexcept { return first.size(); }
    void push(Index a, Index b, double flag, double weight = 1.0);
};

/// How node pairs are chosen for the topology terms.
struct PairPolicy {
    enum class Mode { Auto, All, Sampled };
    Mode mode = Mode::Auto;
    /// Auto evaluates all unordered pairs up to this node count.
    Index full_pair_limit = 2000;
    /// Sampled mode, training: uniform non-edges drawn per observed edge.
    Index negatives_per_edge = 5;
    /// Sampled mode, scoring: uniform non-edges drawn per node.
    Index negatives_per_node = 5;
};

/// Every unordered pair i < j, flagged by `edges`.
PairSet all_pairs(Index num_nodes, const std::vector<Edge>& edges);

/// All edges plus `negatives_per_edge * |E|` non-edges sampled with
/// replacement; non-edge weights are rescaled by #non-edges / #sampled so the
/// weighted sum is an unbiased estimate of the full-pair sum.
PairSet sampled_pairs_per_edge(Index num_nodes, const std::vector<Edge>& edges, Index negatives_per_edge,
                               std::uint64_t seed);

/// All edges plus `negatives_per_node` distinct non-edges incident to each node.
PairSet sampled_pairs_per_node(Index num_nodes, const std::vector<Edge>& edges, Index negatives_per_node,
                               std::uint64_t seed);

PairSet training_pairs(Index num_nodes, const std::vector<Edge>& edges, const PairPolicy& policy,
                       std::uint64_t seed);
PairSet scoring_pairs(Index num_nodes, const std::vector<Edge>& edges, const PairPolicy& policy,
                      std::uint64_t seed);

/// Beta evidence (eps, eps_bar) per evaluated pair; eps = E + 1, eps_bar = E_bar + 1.
struct BetaEvidence {
    PairSet pairs;
    DenseVector eps;
    DenseVector eps_bar;

    DenseVector strength() const { return eps + eps_bar; }
    /// b = (eps - 1) / S
    DenseVector belief() const;
    /// b_bar = (eps_bar - 1) / S
    DenseVector disbelief() const;
};

/// X_hat = E[mu] = gamma.
inline const DenseMatrix& reconstruct_features(const NIGParams& p) { return p.gamma; }

/// A_hat_ij = E[p_ij] = eps / (eps + eps_bar), per evaluated pair.
DenseVector reconstruct_topology(const BetaEvidence& e);

} // namespace gel

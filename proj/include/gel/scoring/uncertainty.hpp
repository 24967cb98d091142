#pragma once

#include <cmath>
#include <concepts>
#include <vector>

#include "gel/model/evidence.hpp"

namespace gel {

// Entry-level formulas, templated so they can be checked on any floating type.

/// Variance of mu: beta / (nu (alpha - 1)).
template <std::floating_point Scalar>
Scalar feature_reconstruction_uncertainty(Scalar nu, Scalar alpha, Scalar beta) {
    return beta / (nu * (alpha - 1));
}

/// Expected sigma^2: beta / (alpha - 1).
template <std::floating_point Scalar>
Scalar feature_graph_uncertainty(Scalar alpha, Scalar beta) {
    return beta / (alpha - 1);
}

/// 1 / S.
template <std::floating_point Scalar>
Scalar topology_reconstruction_uncertainty(Scalar eps, Scalar eps_bar) {
    return 1 / (eps + eps_bar);
}

/// (b + b_bar)(1 - |b - b_bar| / (b + b_bar)) with b = (eps - 1)/S,
/// b_bar = (eps_bar - 1)/S; zero for vacuous evidence (b = b_bar = 0).
template <std::floating_point Scalar>
Scalar topology_graph_uncertainty(Scalar eps, Scalar eps_bar) {
    const Scalar s = eps + eps_bar;
    const Scalar b = (eps - 1) / s;
    const Scalar b_bar = (eps_bar - 1) / s;
    const Scalar mass = b + b_bar;
    if (mass <= 0) return 0;
    return mass * (1 - std::abs(b - b_bar) / mass);
}

struct NodeUncertainty {
    DenseVector graph;
    DenseVector reconstruction;
};

/// Per-node means over the d feature entries.
NodeUncertainty feature_uncertainties(const NIGParams& p);

struct TopologyUncertainty : NodeUncertainty {
    /// Nodes without any evaluated incident pair; their values are 0.
    std::vector<bool> uncovered;
};

/// Per-node means over all evaluated pairs incident to the node.
TopologyUncertainty topology_uncertainties(const BetaEvidence& e, Index num_nodes);

} // namespace gel

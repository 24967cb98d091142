#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "gel/model/evidence.hpp"
#include "gel/model/layers.hpp"

namespace gel {

/// Feature head (gamma, nu, alpha, beta stacks) and pairwise topology head.
///
/// gamma: three layers, tanh, tanh, linear.
/// nu, alpha, beta: two relu layers each.
/// pair: two relu layers on [z_i || z_j] with two outputs (eps, eps_bar).
struct HeadWeights {
    Mlp gamma;
    Mlp nu;
    Mlp alpha;
    Mlp beta;
    Mlp pair;

    Index latent_dim() const { return gamma.input_dim(); }
    Index feature_dim() const { return gamma.output_dim(); }
};

/// Hidden width defaults to the latent width. The final biases of the relu
/// stacks start at 1 so the output units begin in their active region.
HeadWeights init_heads(Index latent_dim, Index feature_dim, std::uint64_t seed, Index hidden_dim = 0);

/// Same architecture with every weight and bias zero.
HeadWeights zero_heads(Index latent_dim, Index feature_dim, Index hidden_dim = 0);

struct HeadVars {
    MlpVars gamma;
    MlpVars nu;
    MlpVars alpha;
    MlpVars beta;
    MlpVars pair;
};

HeadVars bind(ad::Tape& tape, const HeadWeights& w);

/// NIG parameters as tape nodes, each n x d.
struct NigVars {
    ad::Var gamma;
    ad::Var nu;
    ad::Var alpha;
    ad::Var beta;

    NIGParams values() const { return {gamma.value(), nu.value(), alpha.value(), beta.value()}; }
};

/// gamma unconstrained; nu = relu(.) + 1e-6; beta = relu(.) + 1e-6;
/// alpha = relu(.) + 1 + 1e-4.
NigVars feature_head(const ad::Var& z, const HeadVars& w);

/// Beta evidence as tape nodes, each m x 1 for m evaluated pairs.
struct BetaVars {
    ad::Var eps;
    ad::Var eps_bar;
};

/// (eps, eps_bar) = relu(MLP(z_i || z_j)) + 1 with i < j. Pairs are expected
/// canonical; throws ContractError on out-of-range indices.
BetaVars topology_head(const ad::Var& z, const HeadVars& w, const PairSet& pairs);

/// Tape-free evaluation for arbitrary (possibly unordered) index pairs.
BetaEvidence topology_head(const DenseMatrix& z, const HeadWeights& w, const std::vector<std::pair<Index, Index>>& pairs);
NIGParams feature_head(const DenseMatrix& z, const HeadWeights& w);
BetaEvidence topology_head(const DenseMatrix& z, const HeadWeights& w, const PairSet& pairs);

} // namespace gel

#pragma once

#include <cstdint>
#include <vector>

#include "gel/numeric/dense.hpp"
#include "gel/numeric/tape.hpp"

namespace gel {

/// GCN weight stack d -> h_1 -> ... -> d'. No biases.
struct EncoderWeights {
    std::vector<DenseMatrix> layers;
    std::uint64_t seed = 0;

    Index input_dim() const { return layers.front().rows(); }
    Index latent_dim() const { return layers.back().cols(); }
    std::size_t depth() const { return layers.size(); }
};

/// Uniform(-sqrt(3/fan_in), sqrt(3/fan_in)) weights, deterministic in `seed`.
EncoderWeights init_encoder(Index input_dim, const std::vector<Index>& hidden_dims, Index latent_dim,
                            std::uint64_t seed);

std::vector<ad::Var> bind(ad::Tape& tape, const EncoderWeights& w);

/// H <- A_norm H W per layer, tanh between layers, linear last layer.
ad::Var encode(const ad::Var& features, const ad::Var& adjacency, const std::vector<ad::Var>& weights);

/// Tape-free convenience returning Z.
DenseMatrix encode(const DenseMatrix& features, const DenseMatrix& adjacency, const EncoderWeights& w);

} // namespace gel

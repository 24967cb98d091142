#include "gel/model/encoder.hpp"

#include <cmath>

#include "gel/errors.hpp"
#include "gel/model/layers.hpp"
#include "gel/random.hpp"

namespace gel {

EncoderWeights init_encoder(Index input_dim, const std::vector<Index>& hidden_dims, Index latent_dim,
                            std::uint64_t seed) {
    std::vector<Index> dims{input_dim};
    dims.insert(dims.end(), hidden_dims.begin(), hidden_dims.end());
    dims.push_back(latent_dim);
    for (Index d : dims) {
        if (d < 1) throw ContractError("encoder dimensions must be >= 1");
    }
    Rng rng(derive_seed(seed, 0xE7C0));
    EncoderWeights w;
    w.seed = seed;
    for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
        const double bound = std::sqrt(3.0 / static_cast<double>(dims[l]));
        w.layers.push_back(uniform_matrix(dims[l], dims[l + 1], bound, rng));
    }
    return w;
}

std::vector<ad::Var> bind(ad::Tape& tape, const EncoderWeights& w) {
    std::vector<ad::Var> vars;
    vars.reserve(w.layers.size());
    for (const auto& m : w.layers) vars.push_back(tape.leaf(m));
    return vars;
}

ad::Var encode(const ad::Var& features, const ad::Var& adjacency, const std::vector<ad::Var>& weights) {
    if (weights.empty()) throw ContractError("encoder has no layers");
    if (adjacency.rows() != adjacency.cols() || adjacency.cols() != features.rows()) {
        throw DimensionError("encode: adjacency must be n x n with n = feature rows");
    }
    ad::Var h = features;
    for (std::size_t l = 0; l < weights.size(); ++l) {
        h = ad::matmul(adjacency, ad::matmul(h, weights[l]));
        if (l + 1 < weights.size()) h = ad::tanh(h);
    }
    return h;
}

DenseMatrix encode(const DenseMatrix& features, const DenseMatrix& adjacency, const EncoderWeights& w) {
    ad::Tape tape;
    std::vector<ad::Var> vars;
    for (const auto& m : w.layers) vars.push_back(tape.constant(m));
    return encode(tape.constant(features), tape.constant(adjacency), vars).value();
}

} // namespace gel

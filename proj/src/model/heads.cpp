#include "gel/model/heads.hpp"

#include <string>

#include "gel/errors.hpp"
#include "gel/random.hpp"

namespace gel {

namespace {

using A = Activation;

Mlp relu_stack(Index in, Index hidden, Index out, Rng& rng) {
    Mlp m = make_mlp({in, hidden, out}, {A::Relu, A::Relu}, rng);
    m.layers.back().bias.setOnes();
    return m;
}

void zero(Mlp& m) {
    for (auto& l : m.layers) {
        l.weight.setZero();
        l.bias.setZero();
    }
}

} // namespace

HeadWeights init_heads(Index latent_dim, Index feature_dim, std::uint64_t seed, Index hidden_dim) {
    if (latent_dim < 1 || feature_dim < 1) throw ContractError("head dimensions must be >= 1");
    const Index h = hidden_dim > 0 ? hidden_dim : latent_dim;
    Rng rng(derive_seed(seed, 0x4EAD));
    HeadWeights w;
    w.gamma = make_mlp({latent_dim, h, h, feature_dim}, {A::Tanh, A::Tanh, A::Identity}, rng);
    w.nu = relu_stack(latent_dim, h, feature_dim, rng);
    w.alpha = relu_stack(latent_dim, h, feature_dim, rng);
    w.beta = relu_stack(latent_dim, h, feature_dim, rng);
    w.pair = relu_stack(2 * latent_dim, h, 2, rng);
    return w;
}

HeadWeights zero_heads(Index latent_dim, Index feature_dim, Index hidden_dim) {
    HeadWeights w = init_heads(latent_dim, feature_dim, 0, hidden_dim);
    for (Mlp* m : {&w.gamma, &w.nu, &w.alpha, &w.beta, &w.pair}) zero(*m);
    return w;
}

HeadVars bind(ad::Tape& tape, const HeadWeights& w) {
    return {bind(tape, w.gamma), bind(tape, w.nu), bind(tape, w.alpha), bind(tape, w.beta), bind(tape, w.pair)};
}

NigVars feature_head(const ad::Var& z, const HeadVars& w) {
    if (z.cols() != w.gamma.weights.front().rows()) {
        throw DimensionError("feature_head: latent width mismatch");
    }
    NigVars out;
    out.gamma = forward(w.gamma, z);
    out.nu = forward(w.nu, z) + kEvidenceFloor;
    out.alpha = forward(w.alpha, z) + (1.0 + kAlphaFloor);
    out.beta = forward(w.beta, z) + kEvidenceFloor;
    return out;
}

BetaVars topology_head(const ad::Var& z, const HeadVars& w, const PairSet& pairs) {
    if (2 * z.cols() != w.pair.weights.front().rows()) {
        throw DimensionError("topology_head: latent width mismatch");
    }
    const Index n = z.rows();
    std::vector<Index> lo(pairs.size());
    std::vector<Index> hi(pairs.size());
    for (std::size_t k = 0; k < pairs.size(); ++k) {
        const Index a = pairs.first[k];
        const Index b = pairs.second[k];
        if (a < 0 || b < 0 || a >= n || b >= n) {
            throw ContractError("topology_head: pair (" + std::to_string(a) + "," + std::to_string(b) +
                                ") out of range");
        }
        lo[k] = std::min(a, b);
        hi[k] = std::max(a, b);
    }
    const ad::Var joined = ad::concat_cols(ad::gather_rows(z, lo), ad::gather_rows(z, hi));
    const ad::Var evidence = forward(w.pair, joined) + 1.0;
    return {ad::slice_cols(evidence, 0, 1), ad::slice_cols(evidence, 1, 1)};
}

NIGParams feature_head(const DenseMatrix& z, const HeadWeights& w) {
    ad::Tape tape;
    return feature_head(tape.constant(z), bind(tape, w)).values();
}

BetaEvidence topology_head(const DenseMatrix& z, const HeadWeights& w, const PairSet& pairs) {
    ad::Tape tape;
    const auto vars = topology_head(tape.constant(z), bind(tape, w), pairs);
    BetaEvidence e;
    e.pairs = pairs;
    for (std::size_t k = 0; k < pairs.size(); ++k) {
        if (pairs.first[k] > pairs.second[k]) std::swap(e.pairs.first[k], e.pairs.second[k]);
    }
    e.eps = vars.eps.value().col(0);
    e.eps_bar = vars.eps_bar.value().col(0);
    return e;
}

BetaEvidence topology_head(const DenseMatrix& z, const HeadWeights& w,
                           const std::vector<std::pair<Index, Index>>& pairs) {
    PairSet set;
    for (const auto& [a, b] : pairs) {
        set.first.push_back(a);
        set.second.push_back(b);
        set.flags.push_back(0.0);
        set.weights.push_back(1.0);
    }
    return topology_head(z, w, set);
}

} // namespace gel

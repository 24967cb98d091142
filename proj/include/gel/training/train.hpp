#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include <json.hpp>

#include "gel/graph/graph.hpp"
#include "gel/losses/losses.hpp"
#include "gel/model/encoder.hpp"
#include "gel/model/evidence.hpp"
#include "gel/model/heads.hpp"

namespace gel {

struct TrainConfig {
    /// 0 selects 16 for feature_dim <= 32 and 64 otherwise.
    Index latent_dim = 0;
    std::vector<Index> hidden_dims{32};
    /// 0 uses the latent width.
    Index head_hidden_dim = 0;
    std::size_t epochs = 200;
    double learning_rate = 0.01;
    LossWeights loss_weights;
    PerturbationConfig perturbation;
    PairPolicy pairs;
    std::uint64_t seed = 0;

    Index resolved_latent_dim(Index feature_dim) const;
    void validate() const;
};

nlohmann::json to_json(const TrainConfig& cfg);
TrainConfig train_config_from_json(const nlohmann::json& j, TrainConfig base = {});
/// FNV-1a 64 of the canonical JSON dump, as 16 hex digits.
std::string config_hash(const TrainConfig& cfg);

/// Bias-corrected first/second moment estimates per parameter block.
struct AdamState {
    static constexpr double kBeta1 = 0.9;
    static constexpr double kBeta2 = 0.999;
    static constexpr double kEpsilon = 1e-8;

    std::vector<DenseMatrix> first;
    std::vector<DenseMatrix> second;
    std::uint64_t steps = 0;
};

struct ModelState {
    EncoderWeights encoder;
    HeadWeights heads;
    AdamState optimizer;

    Index feature_dim() const { return encoder.input_dim(); }
    Index latent_dim() const { return encoder.latent_dim(); }
};

/// Fresh model for the given feature width; moments zeroed.
ModelState init_model(Index feature_dim, const TrainConfig& cfg);

/// Parameter blocks in a fixed order (encoder layers, then gamma, nu, alpha,
/// beta, pair stacks; weight before bias).
std::vector<DenseMatrix*> parameters(ModelState& state);
std::vector<const DenseMatrix*> parameters(const ModelState& state);
std::vector<std::string> parameter_names(const ModelState& state);

/// One Adam update. `gradients` follows `parameters()` order; throws
/// ContractError on count or shape mismatch.
void step(ModelState& state, const std::vector<DenseMatrix>& gradients, double learning_rate);

struct EpochRecord {
    double total = 0.0;
    double nll_feature = 0.0;
    double nll_topology = 0.0;
    double reg_feature = 0.0;
    double reg_topology = 0.0;
    double seconds = 0.0;
};

using TrainHistory = std::vector<EpochRecord>;

struct TrainResult {
    ModelState state;
    TrainHistory history;
};

/// Per epoch: perturb, encode the perturbed graph, evaluate both heads, the
/// four losses against clean features and perturbed adjacency flags, then one
/// Adam step. Deterministic in cfg.seed. Throws NumericalAbort on a
/// non-finite loss, gradient or parameter.
TrainResult train(const AttributedGraph& g, const TrainConfig& cfg);

} // namespace gel

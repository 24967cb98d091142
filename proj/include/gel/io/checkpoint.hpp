#pragma once

#include <filesystem>
#include <ostream>

#include "gel/training/train.hpp"

namespace gel::io {

/// Encoder-only container: header {"kind": "gel-encoder", "seed", "layer_order"}.
void save_encoder(const std::filesystem::path& path, const EncoderWeights& w);
EncoderWeights load_encoder(const std::filesystem::path& path);

/// Full checkpoint: encoder, heads and Adam moments plus the training config
/// and its hash. Header kind "gel-checkpoint".
void save_checkpoint(const std::filesystem::path& path, const ModelState& state, const TrainConfig& cfg);

struct Checkpoint {
    ModelState state;
    TrainConfig config;
    std::string config_hash;
};

Checkpoint load_checkpoint(const std::filesystem::path& path);

/// epoch,total,nll_f,nll_t,reg_f,reg_t (no wall times).
void write_history_csv(std::ostream& out, const TrainHistory& history);
void write_history_csv(const std::filesystem::path& path, const TrainHistory& history);

} // namespace gel::io

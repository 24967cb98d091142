#include "gel/io/checkpoint.hpp"

#include <charconv>
#include <fstream>

#include "gel/errors.hpp"
#include "gel/io/container.hpp"

namespace gel::io {

namespace {

std::string format_double(double v) {
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

void assign(DenseMatrix& target, const DenseMatrix& source, const std::string& name) {
    if (source.rows() != target.rows() || source.cols() != target.cols()) {
        throw IoError("tensor '" + name + "' has an unexpected shape");
    }
    target = source;
}

} // namespace

void save_encoder(const std::filesystem::path& path, const EncoderWeights& w) {
    std::vector<NamedMatrix> tensors;
    nlohmann::json order = nlohmann::json::array();
    for (std::size_t l = 0; l < w.layers.size(); ++l) {
        tensors.push_back({"encoder." + std::to_string(l), w.layers[l]});
        order.push_back(tensors.back().name);
    }
    write_container(path, {{"kind", "gel-encoder"}, {"seed", w.seed}, {"layer_order", order}}, tensors);
}

EncoderWeights load_encoder(const std::filesystem::path& path) {
    const Container c = read_container(path);
    if (c.header.value("kind", "") != "gel-encoder") throw IoError(path.string() + ": not an encoder container");
    EncoderWeights w;
    w.seed = c.header.at("seed").get<std::uint64_t>();
    for (const auto& name : c.header.at("layer_order")) w.layers.push_back(c.tensor(name.get<std::string>()));
    for (std::size_t l = 1; l < w.layers.size(); ++l) {
        if (w.layers[l - 1].cols() != w.layers[l].rows()) throw IoError(path.string() + ": layer shapes do not chain");
    }
    return w;
}

void save_checkpoint(const std::filesystem::path& path, const ModelState& state, const TrainConfig& cfg) {
    const auto names = parameter_names(state);
    const auto params = parameters(state);
    std::vector<NamedMatrix> tensors;
    for (std::size_t k = 0; k < params.size(); ++k) tensors.push_back({names[k], *params[k]});
    for (std::size_t k = 0; k < params.size(); ++k) tensors.push_back({"adam.m." + names[k], state.optimizer.first[k]});
    for (std::size_t k = 0; k < params.size(); ++k) tensors.push_back({"adam.v." + names[k], state.optimizer.second[k]});

    nlohmann::json header = {
        {"kind", "gel-checkpoint"},
        {"version", 1},
        {"feature_dim", state.feature_dim()},
        {"latent_dim", state.latent_dim()},
        {"encoder_seed", state.encoder.seed},
        {"adam_steps", state.optimizer.steps},
        {"config", to_json(cfg)},
        {"config_hash", config_hash(cfg)},
    };
    write_container(path, std::move(header), tensors);
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
    const Container c = read_container(path);
    if (c.header.value("kind", "") != "gel-checkpoint") throw IoError(path.string() + ": not a checkpoint");
    Checkpoint ck;
    try {
        ck.config = train_config_from_json(c.header.at("config"));
        ck.config_hash = c.header.at("config_hash").get<std::string>();
        const Index d = c.header.at("feature_dim").get<Index>();
        ck.state = init_model(d, ck.config);
        ck.state.encoder.seed = c.header.at("encoder_seed").get<std::uint64_t>();
        ck.state.optimizer.steps = c.header.at("adam_steps").get<std::uint64_t>();
    } catch (const nlohmann::json::exception& e) {
        throw IoError(path.string() + ": malformed checkpoint header: " + e.what());
    } catch (const ContractError& e) {
        throw IoError(path.string() + ": invalid checkpoint config: " + e.what());
    }
    const auto names = parameter_names(ck.state);
    auto params = parameters(ck.state);
    for (std::size_t k = 0; k < params.size(); ++k) {
        assign(*params[k], c.tensor(names[k]), names[k]);
        assign(ck.state.optimizer.first[k], c.tensor("adam.m." + names[k]), names[k]);
        assign(ck.state.optimizer.second[k], c.tensor("adam.v." + names[k]), names[k]);
    }
    return ck;
}

void write_history_csv(std::ostream& out, const TrainHistory& history) {
    out << "epoch,total,nll_f,nll_t,reg_f,reg_t\n";
    for (std::size_t e = 0; e < history.size(); ++e) {
        const auto& r = history[e];
        out << e << ',' << format_double(r.total) << ',' << format_double(r.nll_feature) << ','
            << format_double(r.nll_topology) << ',' << format_double(r.reg_feature) << ','
            << format_double(r.reg_topology) << '\n';
    }
}

void write_history_csv(const std::filesystem::path& path, const TrainHistory& history) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + path.string());
    write_history_csv(out, history);
}

} // namespace gel::io

#include "gel/training/train.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <utility>

#include "gel/errors.hpp"
#include "gel/random.hpp"

namespace gel {

namespace {

constexpr std::uint64_t kEncoderStream = 1;
constexpr std::uint64_t kHeadStream = 2;
constexpr std::uint64_t kPerturbStream = 3;
constexpr std::uint64_t kPairStream = 4;

void collect(Mlp& m, std::vector<DenseMatrix*>& out) {
    for (auto& l : m.layers) {
        out.push_back(&l.weight);
        out.push_back(&l.bias);
    }
}

void collect_names(const Mlp& m, const std::string& prefix, std::vector<std::string>& out) {
    for (std::size_t l = 0; l < m.layers.size(); ++l) {
        out.push_back(prefix + "." + std::to_string(l) + ".weight");
        out.push_back(prefix + "." + std::to_string(l) + ".bias");
    }
}

void collect_vars(const MlpVars& m, std::vector<ad::Var>& out) {
    for (std::size_t l = 0; l < m.weights.size(); ++l) {
        out.push_back(m.weights[l]);
        out.push_back(m.biases[l]);
    }
}

const char* policy_name(PairPolicy::Mode m) {
    switch (m) {
    case PairPolicy::Mode::All:
        return "all";
    case PairPolicy::Mode::Sampled:
        return "sampled";
    case PairPolicy::Mode::Auto:
        break;
    }
    return "auto";
}

PairPolicy::Mode policy_mode(const std::string& s) {
    if (s == "all") return PairPolicy::Mode::All;
    if (s == "sampled") return PairPolicy::Mode::Sampled;
    if (s == "auto") return PairPolicy::Mode::Auto;
    throw ContractError("unknown pair policy '" + s + "'");
}

} // namespace

Index TrainConfig::resolved_latent_dim(Index feature_dim) const {
    if (latent_dim > 0) return latent_dim;
    return feature_dim <= 32 ? 16 : 64;
}

void TrainConfig::validate() const {
    if (epochs < 1) throw ContractError("epochs must be >= 1");
    if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) throw ContractError("learning rate must be > 0");
    if (latent_dim < 0 || head_hidden_dim < 0) throw ContractError("dimensions must be non-negative");
    for (Index h : hidden_dims) {
        if (h < 1) throw ContractError("hidden dimensions must be >= 1");
    }
    if (pairs.negatives_per_edge < 0 || pairs.negatives_per_node < 0 || pairs.full_pair_limit < 0) {
        throw ContractError("pair policy counts must be non-negative");
    }
    loss_weights.validate();
    perturbation.validate();
}

nlohmann::json to_json(const TrainConfig& cfg) {
    return {
        {"latent_dim", cfg.latent_dim},
        {"hidden_dims", cfg.hidden_dims},
        {"head_hidden_dim", cfg.head_hidden_dim},
        {"epochs", cfg.epochs},
        {"learning_rate", cfg.learning_rate},
        {"loss_weights",
         {{"nll_feature", cfg.loss_weights.nll_feature},
          {"nll_topology", cfg.loss_weights.nll_topology},
          {"reg_feature", cfg.loss_weights.reg_feature},
          {"reg_topology", cfg.loss_weights.reg_topology}}},
        {"perturbation",
         {{"noise_sigma", cfg.perturbation.noise_sigma},
          {"relative_to_std", cfg.perturbation.relative_to_std},
          {"edge_dropout", cfg.perturbation.edge_dropout}}},
        {"pairs",
         {{"mode", policy_name(cfg.pairs.mode)},
          {"full_pair_limit", cfg.pairs.full_pair_limit},
          {"negatives_per_edge", cfg.pairs.negatives_per_edge},
          {"negatives_per_node", cfg.pairs.negatives_per_node}}},
        {"seed", cfg.seed},
    };
}

TrainConfig train_config_from_json(const nlohmann::json& j, TrainConfig cfg) {
    auto get = [](const nlohmann::json& obj, const char* key, auto& field) {
        if (obj.contains(key)) field = obj.at(key).get<std::decay_t<decltype(field)>>();
    };
    get(j, "latent_dim", cfg.latent_dim);
    get(j, "hidden_dims", cfg.hidden_dims);
    get(j, "head_hidden_dim", cfg.head_hidden_dim);
    get(j, "epochs", cfg.epochs);
    get(j, "learning_rate", cfg.learning_rate);
    get(j, "seed", cfg.seed);
    if (j.contains("loss_weights")) {
        const auto& w = j.at("loss_weights");
        get(w, "nll_feature", cfg.loss_weights.nll_feature);
        get(w, "nll_topology", cfg.loss_weights.nll_topology);
        get(w, "reg_feature", cfg.loss_weights.reg_feature);
        get(w, "reg_topology", cfg.loss_weights.reg_topology);
    }
    if (j.contains("perturbation")) {
        const auto& p = j.at("perturbation");
        get(p, "noise_sigma", cfg.perturbation.noise_sigma);
        get(p, "relative_to_std", cfg.perturbation.relative_to_std);
        get(p, "edge_dropout", cfg.perturbation.edge_dropout);
    }
    if (j.contains("pairs")) {
        const auto& p = j.at("pairs");
        if (p.contains("mode")) cfg.pairs.mode = policy_mode(p.at("mode").get<std::string>());
        get(p, "full_pair_limit", cfg.pairs.full_pair_limit);
        get(p, "negatives_per_edge", cfg.pairs.negatives_per_edge);
        get(p, "negatives_per_node", cfg.pairs.negatives_per_node);
    }
    return cfg;
}

std::string config_hash(const TrainConfig& cfg) {
    const std::string text = to_json(cfg).dump();
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

ModelState init_model(Index feature_dim, const TrainConfig& cfg) {
    const Index latent = cfg.resolved_latent_dim(feature_dim);
    ModelState s{init_encoder(feature_dim, cfg.hidden_dims, latent, derive_seed(cfg.seed, kEncoderStream)),
                 init_heads(latent, feature_dim, derive_seed(cfg.seed, kHeadStream), cfg.head_hidden_dim),
                 {}};
    for (const DenseMatrix* p : parameters(std::as_const(s))) {
        s.optimizer.first.push_back(DenseMatrix::Zero(p->rows(), p->cols()));
        s.optimizer.second.push_back(DenseMatrix::Zero(p->rows(), p->cols()));
    }
    return s;
}

std::vector<DenseMatrix*> parameters(ModelState& state) {
    std::vector<DenseMatrix*> out;
    for (auto& w : state.encoder.layers) out.push_back(&w);
    for (Mlp* m : {&state.heads.gamma, &state.heads.nu, &state.heads.alpha, &state.heads.beta, &state.heads.pair}) {
        collect(*m, out);
    }
    return out;
}

std::vector<const DenseMatrix*> parameters(const ModelState& state) {
    auto mutable_ptrs = parameters(const_cast<ModelState&>(state));
    return {mutable_ptrs.begin(), mutable_ptrs.end()};
}

std::vector<std::string> parameter_names(const ModelState& state) {
    std::vector<std::string> out;
    for (std::size_t l = 0; l < state.encoder.layers.size(); ++l) out.push_back("encoder." + std::to_string(l));
    collect_names(state.heads.gamma, "heads.gamma", out);
    collect_names(state.heads.nu, "heads.nu", out);
    collect_names(state.heads.alpha, "heads.alpha", out);
    collect_names(state.heads.beta, "heads.beta", out);
    collect_names(state.heads.pair, "heads.pair", out);
    return out;
}

void step(ModelState& state, const std::vector<DenseMatrix>& gradients, double learning_rate) {
    auto params = parameters(state);
    auto& opt = state.optimizer;
    if (gradients.size() != params.size() || opt.first.size() != params.size() ||
        opt.second.size() != params.size()) {
        throw ContractError("step: expected " + std::to_string(params.size()) + " gradient blocks");
    }
    for (std::size_t k = 0; k < params.size(); ++k) {
        if (gradients[k].rows() != params[k]->rows() || gradients[k].cols() != params[k]->cols()) {
            throw ContractError("step: gradient block " + std::to_string(k) + " has the wrong shape");
        }
    }
    ++opt.steps;
    const double t = static_cast<double>(opt.steps);
    const double correction1 = 1.0 - std::pow(AdamState::kBeta1, t);
    const double correction2 = 1.0 - std::pow(AdamState::kBeta2, t);
    for (std::size_t k = 0; k < params.size(); ++k) {
        const DenseMatrix& g = gradients[k];
        opt.first[k] = AdamState::kBeta1 * opt.first[k] + (1.0 - AdamState::kBeta1) * g;
        opt.second[k] = AdamState::kBeta2 * opt.second[k] + (1.0 - AdamState::kBeta2) * g.cwiseAbs2();
        const auto m_hat = opt.first[k].array() / correction1;
        const auto v_hat = opt.second[k].array() / correction2;
        params[k]->array() -= learning_rate * m_hat / (v_hat.sqrt() + AdamState::kEpsilon);
    }
}

TrainResult train(const AttributedGraph& g, const TrainConfig& cfg) {
    cfg.validate();
    if (g.num_nodes() < 1 || g.feature_dim() < 1) throw ContractError("train: graph is empty");

    TrainResult result{init_model(g.feature_dim(), cfg), {}};
    ModelState& state = result.state;
    const auto names = parameter_names(state);
    PerturbationConfig perturbation = cfg.perturbation;
    perturbation.seed = derive_seed(cfg.seed, kPerturbStream);
    const Index n = g.num_nodes();

    for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
        const auto started = std::chrono::steady_clock::now();
        const PerturbedGraph view = perturb(g, perturbation, epoch);
        const PairSet pairs =
            training_pairs(n, view.edges, cfg.pairs, derive_seed(derive_seed(cfg.seed, kPairStream), epoch));

        ad::Tape tape;
        const auto encoder_vars = bind(tape, state.encoder);
        const auto head_vars = bind(tape, state.heads);
        LossParts parts;
        ad::Var total;
        try {
            const ad::Var z = encode(tape.constant(view.features),
                                     tape.constant(normalized_adjacency(n, view.edges)), encoder_vars);
            const NigVars nig = feature_head(z, head_vars);
            const BetaVars evidence = topology_head(z, head_vars, pairs);
            parts = {nig_nll(nig, g.features()), beta_nll(evidence, pairs), feature_evidence_reg(nig, g.features()),
                     topology_evidence_reg(evidence, pairs)};
            total = total_loss(parts, cfg.loss_weights);
        } catch (const DomainError& e) {
            throw NumericalAbort(epoch, std::string("forward pass: ") + e.what());
        } catch (const ContractError& e) {
            throw NumericalAbort(epoch, std::string("forward pass: ") + e.what());
        }

        const std::pair<const char*, ad::Var> terms[] = {{"nll_feature", parts.nll_feature},
                                                         {"nll_topology", parts.nll_topology},
                                                         {"reg_feature", parts.reg_feature},
                                                         {"reg_topology", parts.reg_topology},
                                                         {"total", total}};
        for (const auto& [name, var] : terms) {
            if (!std::isfinite(var.scalar())) throw NumericalAbort(epoch, name);
        }

        const ad::GradientSet grads = tape.backward(total);
        std::vector<ad::Var> leaves(encoder_vars.begin(), encoder_vars.end());
        for (const MlpVars* m : {&head_vars.gamma, &head_vars.nu, &head_vars.alpha, &head_vars.beta, &head_vars.pair}) {
            collect_vars(*m, leaves);
        }
        std::vector<DenseMatrix> blocks;
        blocks.reserve(leaves.size());
        for (std::size_t k = 0; k < leaves.size(); ++k) {
            const DenseMatrix& gk = grads[leaves[k]];
            if (!gk.allFinite()) throw NumericalAbort(epoch, "gradient of " + names[k]);
            blocks.push_back(gk);
        }

        step(state, blocks, cfg.learning_rate);
        const auto params = parameters(std::as_const(state));
        for (std::size_t k = 0; k < params.size(); ++k) {
            if (!params[k]->allFinite()) throw NumericalAbort(epoch, "parameter " + names[k]);
        }

        const double seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
        result.history.push_back({total.scalar(), parts.nll_feature.scalar(), parts.nll_topology.scalar(),
                                  parts.reg_feature.scalar(), parts.reg_topology.scalar(), seconds});
    }
    return result;
}

} // namespace gel

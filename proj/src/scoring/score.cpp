#include "gel/scoring/score.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <string>

#include "gel/errors.hpp"

namespace gel {

void ScoreWeights::validate() const {
    for (double v : {feature, topology, graph, reconstruction}) {
        if (!std::isfinite(v) || v < 0.0) throw ContractError("score weights must be finite and non-negative");
    }
}

nlohmann::json to_json(const ScoreWeights& w) {
    return {{"lambda_f", w.feature}, {"lambda_t", w.topology}, {"lambda_g", w.graph}, {"lambda_r", w.reconstruction}};
}

ScoreWeights score_weights_from_json(const nlohmann::json& j, ScoreWeights base) {
    if (!j.is_object()) throw ContractError("score weights must be a JSON object");
    base.feature = j.value("lambda_f", base.feature);
    base.topology = j.value("lambda_t", base.topology);
    base.graph = j.value("lambda_g", base.graph);
    base.reconstruction = j.value("lambda_r", base.reconstruction);
    base.validate();
    return base;
}

DenseVector min_max_normalize(const DenseVector& v, double* lower, double* upper) {
    const double lo = v.size() > 0 ? v.minCoeff() : 0.0;
    const double hi = v.size() > 0 ? v.maxCoeff() : 0.0;
    if (lower != nullptr) *lower = lo;
    if (upper != nullptr) *upper = hi;
    if (!(hi > lo)) return DenseVector::Zero(v.size());
    return (v.array() - lo) / (hi - lo);
}

DenseVector AnomalyReport::normalized(Component c) const {
    const auto k = static_cast<std::size_t>(c);
    const double lo = lower[k];
    const double hi = upper[k];
    if (!(hi > lo)) return DenseVector::Zero(components[k].size());
    return (components[k].array() - lo) / (hi - lo);
}

AnomalyReport anomaly_scores(const ModelState& model, const AttributedGraph& g, const ScoreWeights& w,
                             const PairPolicy& policy, std::uint64_t seed) {
    w.validate();
    if (g.feature_dim() != model.feature_dim()) {
        throw ContractError("anomaly_scores: graph feature width does not match the model");
    }
    const Index n = g.num_nodes();
    const DenseMatrix z = encode(g.features(), normalized_adjacency(g), model.encoder);
    const NIGParams nig = feature_head(z, model.heads);
    const BetaEvidence evidence = topology_head(z, model.heads, scoring_pairs(n, g.edges(), policy, seed));

    const NodeUncertainty uf = feature_uncertainties(nig);
    TopologyUncertainty ut = topology_uncertainties(evidence, n);

    DenseVector err_f = (g.features() - reconstruct_features(nig)).cwiseAbs().rowwise().sum();
    DenseVector err_t = DenseVector::Zero(n);
    const DenseVector a_hat = reconstruct_topology(evidence);
    for (std::size_t k = 0; k < evidence.pairs.size(); ++k) {
        if (evidence.pairs.flags[k] != 1.0) continue;
        const double miss = 1.0 - a_hat(static_cast<Index>(k));
        err_t(evidence.pairs.first[k]) += miss;
        err_t(evidence.pairs.second[k]) += miss;
    }

    AnomalyReport r;
    r.components = {uf.graph, uf.reconstruction, ut.graph, ut.reconstruction, std::move(err_f), std::move(err_t)};
    std::array<DenseVector, kComponentCount> norm;
    for (std::size_t k = 0; k < kComponentCount; ++k) {
        norm[k] = min_max_normalize(r.components[k], &r.lower[k], &r.upper[k]);
    }
    r.uncovered = std::move(ut.uncovered);

    using enum Component;
    auto at = [&](Component c) -> const DenseVector& { return norm[static_cast<std::size_t>(c)]; };
    r.baseline = at(ErrorFeature) + at(ErrorTopology);
    r.score = w.feature * (w.graph * at(GraphFeature) + w.reconstruction * at(ReconstFeature)) +
              w.topology * (w.graph * at(GraphTopology) + w.reconstruction * at(ReconstTopology)) + r.baseline;
    return r;
}

namespace {

void put(std::string& line, double v) {
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    line.push_back(',');
    line.append(buf, ptr);
}

} // namespace

void write_scores_csv(std::ostream& out, const AnomalyReport& report, bool include_baseline) {
    out << "node_id,y,u_graph_f,u_reconst_f,u_graph_t,u_reconst_t,err_f,err_t";
    if (include_baseline) out << ",y_baseline";
    out << '\n';
    std::string line;
    for (Index i = 0; i < report.size(); ++i) {
        line = std::to_string(i);
        put(line, report.score(i));
        for (const auto& c : report.components) put(line, c(i));
        if (include_baseline) put(line, report.baseline(i));
        line.push_back('\n');
        out << line;
    }
}

void write_scores_csv(const std::filesystem::path& path, const AnomalyReport& report, bool include_baseline) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + path.string());
    write_scores_csv(out, report, include_baseline);
    if (!out) throw IoError("failed writing " + path.string());
}

} // namespace gel

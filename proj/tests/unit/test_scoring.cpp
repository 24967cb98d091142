#include <cmath>
#include <random>
#include <sstream>
#include <vector>

#include <gtest/gtest.h>

#include "gel/errors.hpp"
#include "gel/graph/synthetic.hpp"
#include "gel/scoring/metrics.hpp"
#include "gel/scoring/score.hpp"
#include "gel/scoring/uncertainty.hpp"

namespace {

using gel::DenseMatrix;
using gel::DenseVector;
using gel::Index;

gel::NIGParams constant_nig(Index n, Index d, double nu, double alpha, double beta) {
    return {DenseMatrix::Zero(n, d), DenseMatrix::Constant(n, d, nu), DenseMatrix::Constant(n, d, alpha),
            DenseMatrix::Constant(n, d, beta)};
}

TEST(FeatureUncertainty, Substitution) {
    auto u = gel::feature_uncertainties(constant_nig(2, 3, 1.0, 2.0, 1.0));
    EXPECT_DOUBLE_EQ(u.graph(0), 1.0);
    EXPECT_DOUBLE_EQ(u.reconstruction(1), 1.0);
    u = gel::feature_uncertainties(constant_nig(1, 1, 2.0, 3.0, 1.0));
    EXPECT_DOUBLE_EQ(u.graph(0), 0.5);
    EXPECT_DOUBLE_EQ(u.reconstruction(0), 0.25);
}

TEST(FeatureUncertainty, MeanOverDimensions) {
    auto p = constant_nig(1, 2, 1.0, 2.0, 1.0);
    p.beta(0, 1) = 3.0;
    const auto u = gel::feature_uncertainties(p);
    EXPECT_DOUBLE_EQ(u.graph(0), 2.0);
    EXPECT_DOUBLE_EQ(u.reconstruction(0), 2.0);
}

TEST(FeatureUncertainty, Monotonicity) {
    for (double nu = 0.1; nu < 10.0; nu += 0.1) {
        EXPECT_GT(gel::feature_reconstruction_uncertainty(nu, 2.0, 1.0),
                  gel::feature_reconstruction_uncertainty(nu + 0.1, 2.0, 1.0));
    }
}

gel::BetaEvidence evidence_for(std::vector<std::pair<Index, Index>> pairs, std::vector<double> eps,
                               std::vector<double> eps_bar) {
    gel::BetaEvidence e;
    for (const auto& [a, b] : pairs) e.pairs.push(a, b, 0.0);
    e.eps = Eigen::Map<DenseVector>(eps.data(), static_cast<Index>(eps.size()));
    e.eps_bar = Eigen::Map<DenseVector>(eps_bar.data(), static_cast<Index>(eps_bar.size()));
    return e;
}

TEST(TopologyUncertainty, Substitution) {
    EXPECT_DOUBLE_EQ(gel::topology_graph_uncertainty(2.0, 2.0), 0.5);
    EXPECT_DOUBLE_EQ(gel::topology_reconstruction_uncertainty(2.0, 2.0), 0.25);
    EXPECT_DOUBLE_EQ(gel::topology_graph_uncertainty(5.0, 1.0), 0.0);
    EXPECT_DOUBLE_EQ(gel::topology_graph_uncertainty(1.0, 1.0), 0.0);
    EXPECT_DOUBLE_EQ(gel::topology_reconstruction_uncertainty(1.0, 1.0), 0.5);
}

TEST(TopologyUncertainty, PerNodeMeansAndCoverage) {
    const auto e = evidence_for({{0, 1}, {1, 2}}, {2.0, 1.0}, {2.0, 1.0});
    const auto u = gel::topology_uncertainties(e, 4);
    EXPECT_DOUBLE_EQ(u.graph(0), 0.5);
    EXPECT_DOUBLE_EQ(u.graph(1), 0.25);
    EXPECT_DOUBLE_EQ(u.graph(2), 0.0);
    EXPECT_DOUBLE_EQ(u.reconstruction(1), 0.375);
    EXPECT_EQ(u.reconstruction(3), 0.0);
    EXPECT_EQ(u.uncovered, (std::vector<bool>{false, false, false, true}));
}

TEST(TopologyUncertainty, Errors) {
    auto e = evidence_for({{0, 1}}, {2.0, 1.0}, {2.0, 1.0});
    EXPECT_THROW(gel::topology_uncertainties(e, 2), gel::DimensionError);
    e = evidence_for({{0, 5}}, {2.0}, {2.0});
    EXPECT_THROW(gel::topology_uncertainties(e, 3), gel::ContractError);
}

TEST(TopologyUncertainty, RangeOnRandomEvidence) {
    std::mt19937_64 gen(2);
    std::uniform_real_distribution<double> u(1.0, 40.0);
    for (int k = 0; k < 5000; ++k) {
        const double a = u(gen);
        const double b = u(gen);
        const double g = gel::topology_graph_uncertainty(a, b);
        const double r = gel::topology_reconstruction_uncertainty(a, b);
        EXPECT_GE(g, 0.0);
        EXPECT_LE(g, 1.0);
        EXPECT_GT(r, 0.0);
        EXPECT_LE(r, 0.5);
    }
}

TEST(MinMax, NormalizesToUnitRange) {
    DenseVector v(4);
    v << 3.0, -1.0, 7.0, 2.0;
    double lo = 0.0;
    double hi = 0.0;
    const DenseVector n = gel::min_max_normalize(v, &lo, &hi);
    EXPECT_EQ(lo, -1.0);
    EXPECT_EQ(hi, 7.0);
    EXPECT_EQ(n.minCoeff(), 0.0);
    EXPECT_EQ(n.maxCoeff(), 1.0);
    EXPECT_DOUBLE_EQ(n(0), 0.5);
    EXPECT_TRUE(gel::min_max_normalize(DenseVector::Constant(3, 4.2)).isZero());
}

TEST(ScoreWeights, ValidationAndJson) {
    EXPECT_NO_THROW(gel::ScoreWeights{}.validate());
    EXPECT_TRUE(gel::ScoreWeights::reconstruction_only().all_zero());
    EXPECT_THROW((gel::ScoreWeights{-0.1, 0, 0, 0}.validate()), gel::ContractError);
    const gel::ScoreWeights w{0.1, 0.2, 0.3, 0.4};
    const auto j = gel::to_json(w);
    EXPECT_EQ(j.at("lambda_r"), 0.4);
    const auto back = gel::score_weights_from_json(j);
    EXPECT_EQ(gel::to_json(back), j);
}

gel::ModelState trained_model(const gel::AttributedGraph& g, std::size_t epochs, std::uint64_t seed) {
    gel::TrainConfig cfg;
    cfg.epochs = epochs;
    cfg.seed = seed;
    return gel::train(g, cfg).state;
}

TEST(AnomalyScores, ZeroWeightsGiveBaseline) {
    gel::SyntheticConfig sc;
    sc.num_nodes = 40;
    sc.clique_size = 3;
    sc.clique_count = 1;
    sc.outlier_count = 2;
    const auto g = gel::synthesize_graph(sc).graph;
    const auto model = trained_model(g, 10, 0);
    const auto r = gel::anomaly_scores(model, g, gel::ScoreWeights::reconstruction_only());
    using enum gel::Component;
    const DenseVector expected = r.normalized(ErrorFeature) + r.normalized(ErrorTopology);
    EXPECT_TRUE(r.score.isApprox(expected, 1e-15));
    EXPECT_EQ(r.score, r.baseline);
    const auto full = gel::anomaly_scores(model, g, {});
    EXPECT_EQ(full.baseline, r.baseline);
    for (std::size_t k = 0; k < gel::kComponentCount; ++k) {
        EXPECT_TRUE(full.components[k].allFinite());
        EXPECT_GE(full.components[k].minCoeff(), 0.0);
        const auto n = full.normalized(static_cast<gel::Component>(k));
        EXPECT_GE(n.minCoeff(), 0.0);
        EXPECT_LE(n.maxCoeff(), 1.0);
    }
}

TEST(AnomalyScores, IdenticalNodesScoreEqually) {
    DenseMatrix x(4, 2);
    x << 1.0, 2.0, 1.0, 2.0, -1.0, 0.5, 3.0, -2.0;
    const gel::AttributedGraph g(x, {{0, 2}, {1, 2}, {2, 3}});
    const auto model = trained_model(g, 5, 1);
    const auto r = gel::anomaly_scores(model, g, {});
    EXPECT_NEAR(r.score(0), r.score(1), 1e-12);
    for (const auto& c : r.components) EXPECT_NEAR(c(0), c(1), 1e-12);
}

TEST(AnomalyScores, WidthMismatchRejected) {
    const gel::AttributedGraph g(DenseMatrix::Zero(3, 2), {{0, 1}});
    gel::TrainConfig cfg;
    const auto model = gel::init_model(3, cfg);
    EXPECT_THROW(gel::anomaly_scores(model, g, {}), gel::ContractError);
}

TEST(AnomalyScores, TopologyErrorSumsOverNeighbours) {
    DenseMatrix x(3, 1);
    x << 0.0, 1.0, 2.0;
    const gel::AttributedGraph g(x, {{0, 1}, {1, 2}});
    gel::ModelState model = gel::init_model(1, gel::TrainConfig{});
    model.heads = gel::zero_heads(model.latent_dim(), 1);
    const auto r = gel::anomaly_scores(model, g, {});
    using enum gel::Component;
    // zero heads: every pair predicts 0.5, so a node misses 0.5 per neighbour
    EXPECT_DOUBLE_EQ(r.component(ErrorTopology)(0), 0.5);
    EXPECT_DOUBLE_EQ(r.component(ErrorTopology)(1), 1.0);
    EXPECT_DOUBLE_EQ(r.component(ErrorFeature)(2), 2.0);
}

TEST(ScoresCsv, HeaderAndRows) {
    gel::AnomalyReport r;
    for (auto& c : r.components) c = DenseVector::Constant(2, 0.5);
    r.score = DenseVector::Constant(2, 1.25);
    r.baseline = DenseVector::Constant(2, 0.75);
    std::ostringstream plain;
    gel::write_scores_csv(plain, r);
    EXPECT_EQ(plain.str(),
              "node_id,y,u_graph_f,u_reconst_f,u_graph_t,u_reconst_t,err_f,err_t\n"
              "0,1.25,0.5,0.5,0.5,0.5,0.5,0.5\n1,1.25,0.5,0.5,0.5,0.5,0.5,0.5\n");
    std::ostringstream with;
    gel::write_scores_csv(with, r, true);
    EXPECT_NE(with.str().find(",y_baseline\n0,1.25,0.5,0.5,0.5,0.5,0.5,0.5,0.75\n"), std::string::npos);
}

TEST(Auc, Examples) {
    const std::vector<int> labels{0, 0, 1, 1};
    EXPECT_DOUBLE_EQ(gel::auc(std::vector<double>{0.1, 0.4, 0.35, 0.8}, labels), 0.75);
    EXPECT_DOUBLE_EQ(gel::auc(std::vector<double>{0.1, 0.2, 0.3, 0.4}, labels), 1.0);
    EXPECT_DOUBLE_EQ(gel::auc(std::vector<double>{1, 1, 1, 1}, labels), 0.5);
    EXPECT_DOUBLE_EQ(gel::auc(std::vector<double>{0.4, 0.3, 0.2, 0.1}, labels), 0.0);
}

TEST(Auc, MatchesBruteForceAndIsRankInvariant) {
    std::mt19937_64 gen(9);
    std::uniform_int_distribution<int> coarse(0, 6);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<double> s(30);
        std::vector<int> l(30);
        for (std::size_t i = 0; i < s.size(); ++i) {
            s[i] = coarse(gen);
            l[i] = i < 8 ? 1 : 0;
        }
        double wins = 0.0;
        for (std::size_t i = 0; i < s.size(); ++i)
            for (std::size_t j = 0; j < s.size(); ++j)
                if (l[i] == 1 && l[j] == 0) wins += s[i] > s[j] ? 1.0 : (s[i] == s[j] ? 0.5 : 0.0);
        EXPECT_NEAR(gel::auc(s, l), wins / (8.0 * 22.0), 1e-14);
        std::vector<double> t(s.size());
        for (std::size_t i = 0; i < s.size(); ++i) t[i] = std::exp(3.0 * s[i]) - 7.0;
        EXPECT_DOUBLE_EQ(gel::auc(t, l), gel::auc(s, l));
    }
}

TEST(Auc, Errors) {
    EXPECT_THROW(gel::auc(std::vector<double>{0.1, 0.2}, std::vector<int>{1, 1}), gel::MetricError);
    EXPECT_THROW(gel::auc(std::vector<double>{0.1}, std::vector<int>{1, 0}), gel::DimensionError);
    EXPECT_THROW(gel::auc(std::vector<double>{0.1, NAN}, std::vector<int>{1, 0}), gel::MetricError);
    EXPECT_THROW(gel::auc(std::vector<double>{0.1, 0.2}, std::vector<int>{2, 0}), gel::MetricError);
}

TEST(RecallAtK, Examples) {
    const std::vector<double> s{0.9, 0.1, 0.8, 0.7, 0.2};
    EXPECT_DOUBLE_EQ(gel::recall_at_k(s, std::vector<int>{1, 0, 1, 0, 0}, 2), 1.0);
    EXPECT_DOUBLE_EQ(gel::recall_at_k(s, std::vector<int>{0, 1, 0, 0, 0}, 5), 1.0);
    EXPECT_DOUBLE_EQ(gel::recall_at_k(s, std::vector<int>{0, 1, 1, 0, 0}, 3), 0.5);
    EXPECT_THROW(gel::recall_at_k(s, std::vector<int>{0, 0, 0, 0, 0}, 3), gel::MetricError);
    EXPECT_THROW(gel::recall_at_k(s, std::vector<int>{1, 0, 0, 0, 0}, 0), gel::MetricError);
    EXPECT_THROW(gel::recall_at_k(s, std::vector<int>{1, 0, 0, 0, 0}, 6), gel::MetricError);
}

TEST(RecallAtK, TiesGoToLowerIndex) {
    const std::vector<double> s{0.5, 0.5, 0.5};
    EXPECT_DOUBLE_EQ(gel::recall_at_k(s, std::vector<int>{1, 0, 0}, 1), 1.0);
    EXPECT_DOUBLE_EQ(gel::recall_at_k(s, std::vector<int>{0, 0, 1}, 2), 0.0);
}

TEST(Metrics, DefaultKAndJson) {
    EXPECT_EQ(gel::default_k(200), 20);
    EXPECT_EQ(gel::default_k(50), 10);
    EXPECT_EQ(gel::default_k(124), 12);
    EXPECT_EQ(gel::default_k(6), 6);
    const auto m = gel::evaluate(std::vector<double>{0.1, 0.9, 0.3}, std::vector<int>{0, 1, 0}, 1);
    const auto j = gel::to_json(m);
    EXPECT_EQ(j.at("auc"), 1.0);
    EXPECT_EQ(j.at("recall_at_k"), 1.0);
    EXPECT_EQ(j.at("k"), 1);
    EXPECT_EQ(j.at("n"), 3);
    EXPECT_EQ(j.at("anomalies"), 1);
}

} // namespace

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>

#include <gtest/gtest.h>

#include "gel/errors.hpp"
#include "gel/graph/synthetic.hpp"

namespace {

using gel::Index;
using gel::SyntheticConfig;

TEST(Synthetic, DefaultLabelCount) {
    const auto s = gel::synthesize_graph(SyntheticConfig{});
    const auto& labels = s.graph.labels();
    EXPECT_EQ(std::accumulate(labels.begin(), labels.end(), 0), 20);
    EXPECT_EQ(s.structural_nodes.size(), 10u);
    EXPECT_EQ(s.contextual_nodes.size(), 10u);
    EXPECT_EQ(s.graph.num_nodes(), 200);
    EXPECT_EQ(s.graph.feature_dim(), 8);
}

TEST(Synthetic, NoAnomaliesMeansAllZeroLabels) {
    SyntheticConfig cfg;
    cfg.clique_size = 0;
    cfg.clique_count = 0;
    cfg.outlier_count = 0;
    const auto s = gel::synthesize_graph(cfg);
    for (int l : s.graph.labels()) EXPECT_EQ(l, 0);
}

TEST(Synthetic, InfeasibleCountsRejected) {
    SyntheticConfig cfg;
    cfg.num_nodes = 20;
    cfg.clique_size = 5;
    cfg.clique_count = 3;
    cfg.outlier_count = 6;
    EXPECT_THROW(gel::synthesize_graph(cfg), gel::ContractError);
    cfg = {};
    cfg.clique_size = 1;
    EXPECT_THROW(gel::synthesize_graph(cfg), gel::ContractError);
    cfg = {};
    cfg.contextual_min_radius = 2.0;
    EXPECT_THROW(gel::synthesize_graph(cfg), gel::ContractError);
    cfg = {};
    cfg.outlier_count = -1;
    EXPECT_THROW(gel::synthesize_graph(cfg), gel::ContractError);
}

TEST(Synthetic, DeterministicInSeed) {
    SyntheticConfig cfg;
    cfg.seed = 17;
    const auto a = gel::synthesize_graph(cfg);
    const auto b = gel::synthesize_graph(cfg);
    EXPECT_EQ(a.graph.features(), b.graph.features());
    EXPECT_EQ(a.graph.edges(), b.graph.edges());
    EXPECT_EQ(a.graph.labels(), b.graph.labels());
    cfg.seed = 18;
    EXPECT_NE(gel::synthesize_graph(cfg).graph.features(), a.graph.features());
}

TEST(Synthetic, CliquesAreFullyConnected) {
    const auto s = gel::synthesize_graph(SyntheticConfig{});
    const auto& members = s.structural_nodes;
    ASSERT_EQ(members.size(), 10u);
    for (Index v : members) {
        int mates = 0;
        for (Index u : members) mates += s.graph.has_edge(u, v);
        EXPECT_GE(mates, 4) << v;
    }
}

TEST(Synthetic, ContextualNodesAreFarFromOwnCluster) {
    SyntheticConfig cfg;
    const auto s = gel::synthesize_graph(cfg);
    for (Index v : s.contextual_nodes) {
        const Index c = s.cluster_of[static_cast<std::size_t>(v)];
        const double r = (s.graph.features().row(v) - s.cluster_means.row(c)).norm();
        EXPECT_GE(r, 3.0 * cfg.cluster_std - 1e-12);
        EXPECT_LE(r, cfg.contextual_max_radius * cfg.cluster_std + 1e-12);
    }
}

TEST(Synthetic, AnomalySetsAreDisjoint) {
    const auto s = gel::synthesize_graph(SyntheticConfig{});
    std::set<Index> all(s.structural_nodes.begin(), s.structural_nodes.end());
    all.insert(s.contextual_nodes.begin(), s.contextual_nodes.end());
    EXPECT_EQ(all.size(), 20u);
}

TEST(Synthetic, JsonRoundTrip) {
    SyntheticConfig cfg;
    cfg.num_nodes = 77;
    cfg.knn = 6;
    cfg.cluster_std = 0.5;
    cfg.seed = 123456789012345ULL;
    const auto back = gel::synthetic_config_from_json(gel::to_json(cfg));
    EXPECT_EQ(gel::to_json(back), gel::to_json(cfg));
}

TEST(Synthetic, WriteProducesFiles) {
    const auto dir = std::filesystem::temp_directory_path() / "gel_synth_write";
    std::filesystem::remove_all(dir);
    SyntheticConfig cfg;
    const auto s = gel::synthesize_graph(cfg);
    gel::write_synthetic(s, cfg, dir);
    for (const char* f : {"features.csv", "edges.csv", "labels.csv", "generation.json"})
        EXPECT_TRUE(std::filesystem::exists(dir / f)) << f;
    const auto back = gel::load_graph(dir / "features.csv", dir / "edges.csv", dir / "labels.csv");
    EXPECT_EQ(back.features(), s.graph.features());
    EXPECT_EQ(back.edges(), s.graph.edges());
    std::ifstream in(dir / "labels.csv");
    std::stringstream buf;
    buf << in.rdbuf();
    const std::string text = buf.str();
    EXPECT_EQ(std::count(text.begin(), text.end(), '1'), 20);
    std::filesystem::remove_all(dir);
}

} // namespace

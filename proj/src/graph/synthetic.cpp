#include "gel/graph/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>

#include "gel/errors.hpp"
#include "gel/random.hpp"

namespace gel {

namespace {

// Fisher-Yates over [0, n) driven by Rng.
std::vector<Index> random_permutation(Index n, Rng& rng) {
    std::vector<Index> perm(static_cast<std::size_t>(n));
    std::iota(perm.begin(), perm.end(), Index{0});
    for (std::size_t i = perm.size(); i > 1; --i) {
        const auto j = static_cast<std::size_t>(rng.below(i));
        std::swap(perm[i - 1], perm[j]);
    }
    return perm;
}

} // namespace

void SyntheticConfig::validate() const {
    if (num_nodes < 1 || feature_dim < 1) {
        throw ContractError("synthetic graph needs n >= 1 and d >= 1");
    }
    if (clique_size < 0 || clique_count < 0 || outlier_count < 0) {
        throw ContractError("anomaly counts must be non-negative");
    }
    if (clique_count > 0 && clique_size < 2) {
        throw ContractError("cliques need at least two nodes");
    }
    if (clique_size * clique_count + outlier_count > num_nodes) {
        throw ContractError("q*c + m = " + std::to_string(clique_size * clique_count + outlier_count) +
                            " exceeds node count " + std::to_string(num_nodes));
    }
    if (clusters < 1 || !(cluster_std > 0.0) || knn < 0) {
        throw ContractError("invalid cluster parameters");
    }
    if (!(contextual_min_radius >= 3.0) || contextual_max_radius < contextual_min_radius) {
        throw ContractError("contextual radius range must satisfy 3 <= min <= max");
    }
}

SyntheticGraph synthesize_graph(const SyntheticConfig& cfg) {
    cfg.validate();
    Rng rng(derive_seed(cfg.seed, 0x5EED));
    const Index n = cfg.num_nodes;
    const Index d = cfg.feature_dim;
    const Index k = std::min(cfg.clusters, n);

    DenseMatrix means(k, d);
    for (Index c = 0; c < k; ++c)
        for (Index h = 0; h < d; ++h) means(c, h) = rng.normal(0.0, cfg.center_spread);

    std::vector<Index> cluster_of(static_cast<std::size_t>(n));
    DenseMatrix x(n, d);
    for (Index i = 0; i < n; ++i) {
        const Index c = i % k;
        cluster_of[static_cast<std::size_t>(i)] = c;
        for (Index h = 0; h < d; ++h) x(i, h) = rng.normal(means(c, h), cfg.cluster_std);
    }

    // k-nearest-neighbour wiring on the clean features.
    std::vector<Edge> edges;
    const Index knn = std::min(cfg.knn, n - 1);
    std::vector<std::pair<double, Index>> dist(static_cast<std::size_t>(n));
    for (Index i = 0; i < n && knn > 0; ++i) {
        for (Index j = 0; j < n; ++j) {
            dist[static_cast<std::size_t>(j)] = {j == i ? std::numeric_limits<double>::infinity()
                                                        : (x.row(i) - x.row(j)).squaredNorm(),
                                                 j};
        }
        std::partial_sort(dist.begin(), dist.begin() + knn, dist.end());
        for (Index r = 0; r < knn; ++r) edges.push_back(canonical(i, dist[static_cast<std::size_t>(r)].second));
    }

    const auto order = random_permutation(n, rng);
    std::size_t cursor = 0;
    std::vector<int> labels(static_cast<std::size_t>(n), 0);

    std::vector<Index> structural;
    for (Index c = 0; c < cfg.clique_count; ++c) {
        std::vector<Index> members(order.begin() + static_cast<std::ptrdiff_t>(cursor),
                                   order.begin() + static_cast<std::ptrdiff_t>(cursor + cfg.clique_size));
        cursor += static_cast<std::size_t>(cfg.clique_size);
        for (std::size_t a = 0; a < members.size(); ++a)
            for (std::size_t b = a + 1; b < members.size(); ++b) edges.push_back(canonical(members[a], members[b]));
        structural.insert(structural.end(), members.begin(), members.end());
    }

    std::vector<Index> contextual;
    for (Index m = 0; m < cfg.outlier_count; ++m) {
        const Index v = order[cursor++];
        const Index c = cluster_of[static_cast<std::size_t>(v)];
        DenseVector dir(d);
        for (Index h = 0; h < d; ++h) dir(h) = rng.normal();
        while (dir.norm() == 0.0) dir(0) = rng.normal();
        dir.normalize();
        const double radius = rng.uniform(cfg.contextual_min_radius, cfg.contextual_max_radius) * cfg.cluster_std;
        x.row(v) = means.row(c) + radius * dir.transpose();
        contextual.push_back(v);
    }

    for (Index v : structural) labels[static_cast<std::size_t>(v)] = 1;
    for (Index v : contextual) labels[static_cast<std::size_t>(v)] = 1;
    std::sort(structural.begin(), structural.end());
    std::sort(contextual.begin(), contextual.end());

    return SyntheticGraph{AttributedGraph(std::move(x), std::move(edges), std::move(labels)),
                          std::move(cluster_of), std::move(means), std::move(structural),
                          std::move(contextual)};
}

nlohmann::json to_json(const SyntheticConfig& cfg) {
    return {
        {"n", cfg.num_nodes},
        {"d", cfg.feature_dim},
        {"clique_size", cfg.clique_size},
        {"clique_count", cfg.clique_count},
        {"outlier_count", cfg.outlier_count},
        {"seed", cfg.seed},
        {"clusters", cfg.clusters},
        {"cluster_std", cfg.cluster_std},
        {"center_spread", cfg.center_spread},
        {"knn", cfg.knn},
        {"contextual_min_radius", cfg.contextual_min_radius},
        {"contextual_max_radius", cfg.contextual_max_radius},
    };
}

SyntheticConfig synthetic_config_from_json(const nlohmann::json& j, SyntheticConfig base) {
    auto get = [&](const char* key, auto& field) {
        if (j.contains(key)) field = j.at(key).get<std::decay_t<decltype(field)>>();
    };
    get("n", base.num_nodes);
    get("d", base.feature_dim);
    get("clique_size", base.clique_size);
    get("clique_count", base.clique_count);
    get("outlier_count", base.outlier_count);
    get("seed", base.seed);
    get("clusters", base.clusters);
    get("cluster_std", base.cluster_std);
    get("center_spread", base.center_spread);
    get("knn", base.knn);
    get("contextual_min_radius", base.contextual_min_radius);
    get("contextual_max_radius", base.contextual_max_radius);
    return base;
}

void write_synthetic(const SyntheticGraph& result, const SyntheticConfig& cfg,
                     const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
    save_graph(result.graph, dir / "features.csv", dir / "edges.csv", dir / "labels.csv");

    nlohmann::json sidecar = to_json(cfg);
    sidecar["structural_nodes"] = result.structural_nodes;
    sidecar["contextual_nodes"] = result.contextual_nodes;
    sidecar["edges"] = result.graph.edges().size();
    std::ofstream out(dir / "generation.json", std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + (dir / "generation.json").string());
    out << sidecar.dump(2) << '\n';
}

} // namespace gel

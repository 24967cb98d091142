#include "gel/model/evidence.hpp"

#include <algorithm>
#include <set>

#include "gel/errors.hpp"
#include "gel/random.hpp"

namespace gel {

void NIGParams::validate() const {
    const auto same = [&](const DenseMatrix& m) { return m.rows() == gamma.rows() && m.cols() == gamma.cols(); };
    if (!same(nu) || !same(alpha) || !same(beta)) {
        throw ContractError("NIG parameter blocks differ in shape");
    }
    if (!(nu.array() > 0.0).all()) throw ContractError("NIG invariant violated: nu must be > 0");
    if (!(alpha.array() > 1.0).all()) throw ContractError("NIG invariant violated: alpha must be > 1");
    if (!(beta.array() > 0.0).all()) throw ContractError("NIG invariant violated: beta must be > 0");
    if (!gamma.allFinite() || !nu.allFinite() || !alpha.allFinite() || !beta.allFinite()) {
        throw ContractError("NIG parameters must be finite");
    }
}

void PairSet::push(Index a, Index b, double flag, double weight) {
    const Edge e = canonical(a, b);
    first.push_back(e.u);
    second.push_back(e.v);
    flags.push_back(flag);
    weights.push_back(weight);
}

PairSet all_pairs(Index num_nodes, const std::vector<Edge>& edges) {
    PairSet out;
    const auto total = static_cast<std::size_t>(num_nodes * (num_nodes - 1) / 2);
    out.first.reserve(total);
    out.second.reserve(total);
    out.flags.reserve(total);
    out.weights.reserve(total);
    std::vector<Edge> sorted = edges;
    std::sort(sorted.begin(), sorted.end());
    auto next = sorted.begin();
    for (Index i = 0; i < num_nodes; ++i) {
        for (Index j = i + 1; j < num_nodes; ++j) {
            const Edge e{i, j};
            const bool linked = next != sorted.end() && *next == e;
            if (linked) ++next;
            out.push(i, j, linked ? 1.0 : 0.0);
        }
    }
    return out;
}

PairSet sampled_pairs_per_edge(Index num_nodes, const std::vector<Edge>& edges, Index negatives_per_edge,
                               std::uint64_t seed) {
    PairSet out;
    std::set<Edge> edge_set(edges.begin(), edges.end());
    for (const auto& e : edge_set) out.push(e.u, e.v, 1.0);

    const double total_pairs = static_cast<double>(num_nodes) * static_cast<double>(num_nodes - 1) / 2.0;
    const double non_edges = total_pairs - static_cast<double>(edge_set.size());
    const auto wanted = static_cast<std::size_t>(negatives_per_edge) * edge_set.size();
    if (non_edges <= 0.0 || wanted == 0 || num_nodes < 2) return out;

    const double weight = non_edges / static_cast<double>(wanted);
    Rng rng(seed);
    const auto n = static_cast<std::uint64_t>(num_nodes);
    for (std::size_t drawn = 0; drawn < wanted;) {
        const auto a = static_cast<Index>(rng.below(n));
        const auto b = static_cast<Index>(rng.below(n));
        if (a == b || edge_set.count(canonical(a, b))) continue;
        out.push(a, b, 0.0, weight);
        ++drawn;
    }
    return out;
}

PairSet sampled_pairs_per_node(Index num_nodes, const std::vector<Edge>& edges, Index negatives_per_node,
                               std::uint64_t seed) {
    PairSet out;
    std::set<Edge> edge_set(edges.begin(), edges.end());
    for (const auto& e : edge_set) out.push(e.u, e.v, 1.0);

    Rng rng(seed);
    std::set<Edge> chosen;
    const auto n = static_cast<std::uint64_t>(num_nodes);
    for (Index v = 0; v < num_nodes; ++v) {
        const Index budget = std::min<Index>(negatives_per_node, num_nodes - 1);
        Index got = 0;
        // Bounded attempts so dense neighbourhoods cannot stall the loop.
        for (Index attempt = 0; got < budget && attempt < 20 * (budget + 1); ++attempt) {
            const auto w = static_cast<Index>(rng.below(n));
            if (w == v) continue;
            const Edge e = canonical(v, w);
            if (edge_set.count(e) || chosen.count(e)) continue;
            chosen.insert(e);
            out.push(e.u, e.v, 0.0);
            ++got;
        }
    }
    return out;
}

namespace {

bool use_all_pairs(Index num_nodes, const PairPolicy& policy) {
    switch (policy.mode) {
    case PairPolicy::Mode::All:
        return true;
    case PairPolicy::Mode::Sampled:
        return false;
    case PairPolicy::Mode::Auto:
        break;
    }
    return num_nodes <= policy.full_pair_limit;
}

} // namespace

PairSet training_pairs(Index num_nodes, const std::vector<Edge>& edges, const PairPolicy& policy,
                       std::uint64_t seed) {
    if (use_all_pairs(num_nodes, policy)) return all_pairs(num_nodes, edges);
    return sampled_pairs_per_edge(num_nodes, edges, policy.negatives_per_edge, seed);
}

PairSet scoring_pairs(Index num_nodes, const std::vector<Edge>& edges, const PairPolicy& policy,
                      std::uint64_t seed) {
    if (use_all_pairs(num_nodes, policy)) return all_pairs(num_nodes, edges);
    return sampled_pairs_per_node(num_nodes, edges, policy.negatives_per_node, seed);
}

DenseVector BetaEvidence::belief() const { return (eps.array() - 1.0) / strength().array(); }

DenseVector BetaEvidence::disbelief() const { return (eps_bar.array() - 1.0) / strength().array(); }

DenseVector reconstruct_topology(const BetaEvidence& e) { return e.eps.array() / e.strength().array(); }

} // namespace gel

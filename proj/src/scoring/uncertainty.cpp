#include "gel/scoring/uncertainty.hpp"

#include "gel/errors.hpp"

namespace gel {

NodeUncertainty feature_uncertainties(const NIGParams& p) {
    p.validate();
    const Index n = p.gamma.rows();
    const Index d = p.gamma.cols();
    NodeUncertainty u{DenseVector::Zero(n), DenseVector::Zero(n)};
    if (d == 0) return u;
    for (Index i = 0; i < n; ++i) {
        double g = 0.0;
        double r = 0.0;
        for (Index h = 0; h < d; ++h) {
            g += feature_graph_uncertainty(p.alpha(i, h), p.beta(i, h));
            r += feature_reconstruction_uncertainty(p.nu(i, h), p.alpha(i, h), p.beta(i, h));
        }
        u.graph(i) = g / static_cast<double>(d);
        u.reconstruction(i) = r / static_cast<double>(d);
    }
    return u;
}

TopologyUncertainty topology_uncertainties(const BetaEvidence& e, Index num_nodes) {
    const std::size_t m = e.pairs.size();
    if (static_cast<std::size_t>(e.eps.size()) != m || static_cast<std::size_t>(e.eps_bar.size()) != m) {
        throw DimensionError("topology_uncertainties: evidence length does not match pair count");
    }
    TopologyUncertainty u;
    u.graph = DenseVector::Zero(num_nodes);
    u.reconstruction = DenseVector::Zero(num_nodes);
    std::vector<Index> count(static_cast<std::size_t>(num_nodes), 0);
    for (std::size_t k = 0; k < m; ++k) {
        const Index a = e.pairs.first[k];
        const Index b = e.pairs.second[k];
        if (a < 0 || b < 0 || a >= num_nodes || b >= num_nodes) {
            throw ContractError("topology_uncertainties: pair index out of range");
        }
        const double eps = e.eps(static_cast<Index>(k));
        const double eps_bar = e.eps_bar(static_cast<Index>(k));
        const double g = topology_graph_uncertainty(eps, eps_bar);
        const double r = topology_reconstruction_uncertainty(eps, eps_bar);
        for (Index v : {a, b}) {
            u.graph(v) += g;
            u.reconstruction(v) += r;
            ++count[static_cast<std::size_t>(v)];
        }
    }
    u.uncovered.assign(static_cast<std::size_t>(num_nodes), false);
    for (Index v = 0; v < num_nodes; ++v) {
        const Index c = count[static_cast<std::size_t>(v)];
        if (c == 0) {
            u.uncovered[static_cast<std::size_t>(v)] = true;
            continue;
        }
        u.graph(v) /= static_cast<double>(c);
        u.reconstruction(v) /= static_cast<double>(c);
    }
    return u;
}

} // namespace gel

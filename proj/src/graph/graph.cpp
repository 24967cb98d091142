#include "gel/graph/graph.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>

#include "gel/errors.hpp"
#include "gel/random.hpp"

namespace gel {

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split_csv(std::string_view line) {
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    while (true) {
        const auto comma = line.find(',', start);
        fields.push_back(trim(line.substr(start, comma - start)));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return fields;
}

template <typename T>
bool parse_number(std::string_view field, T& out) {
    if (field.empty()) return false;
    if (field.front() == '+') field.remove_prefix(1);
    const auto* end = field.data() + field.size();
    auto [ptr, ec] = std::from_chars(field.data(), end, out);
    return ec == std::errc() && ptr == end;
}

std::ifstream open_input(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open " + path.string());
    }
    return in;
}

std::ofstream open_output(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw IoError("cannot write " + path.string());
    }
    return out;
}

bool skip_line(std::string_view line) {
    const auto t = trim(line);
    return t.empty() || t.front() == '#';
}

std::string format_double(double v) {
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

} // namespace

AttributedGraph::AttributedGraph(DenseMatrix features, std::vector<Edge> edges,
                                 std::optional<std::vector<int>> labels)
    : features_(std::move(features)), labels_(std::move(labels)) {
    const Index n = features_.rows();
    if (!features_.allFinite()) {
        throw ContractError("graph features must be finite");
    }
    for (auto& e : edges) {
        if (e.u < 0 || e.v < 0 || e.u >= n || e.v >= n) {
            throw ContractError("edge endpoint out of range [0, " + std::to_string(n) + ")");
        }
        if (e.u == e.v) {
            throw ContractError("self-loop on node " + std::to_string(e.u));
        }
        e = canonical(e.u, e.v);
    }
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
    edges_ = std::move(edges);

    if (labels_ && static_cast<Index>(labels_->size()) != n) {
        throw ContractError("label count " + std::to_string(labels_->size()) + " != node count " +
                            std::to_string(n));
    }

    neighbors_.assign(static_cast<std::size_t>(n), {});
    for (const auto& e : edges_) {
        neighbors_[static_cast<std::size_t>(e.u)].push_back(e.v);
        neighbors_[static_cast<std::size_t>(e.v)].push_back(e.u);
    }
    for (auto& list : neighbors_) std::sort(list.begin(), list.end());
}

const std::vector<int>& AttributedGraph::labels() const {
    if (!labels_) throw ContractError("graph has no labels");
    return *labels_;
}

bool AttributedGraph::has_edge(Index a, Index b) const {
    if (a == b) return false;
    return std::binary_search(edges_.begin(), edges_.end(), canonical(a, b));
}

DenseMatrix AttributedGraph::adjacency() const {
    return PerturbedGraph{features_, edges_}.adjacency(num_nodes());
}

DenseMatrix PerturbedGraph::adjacency(Index num_nodes) const {
    DenseMatrix a = DenseMatrix::Zero(num_nodes, num_nodes);
    for (const auto& e : edges) {
        a(e.u, e.v) = 1.0;
        a(e.v, e.u) = 1.0;
    }
    return a;
}

AttributedGraph load_graph(const std::filesystem::path& features_path,
                           const std::filesystem::path& edges_path,
                           const std::optional<std::filesystem::path>& labels_path) {
    const std::string fname = features_path.string();
    std::vector<std::vector<double>> rows;
    {
        auto in = open_input(features_path);
        std::string line;
        std::size_t lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            if (skip_line(line)) continue;
            std::vector<double> row;
            for (auto field : split_csv(line)) {
                double v = 0.0;
                if (!parse_number(field, v)) {
                    throw ParseError(fname, lineno, "non-numeric feature '" + std::string(field) + "'");
                }
                if (!std::isfinite(v)) {
                    throw ParseError(fname, lineno, "non-finite feature");
                }
                row.push_back(v);
            }
            if (!rows.empty() && row.size() != rows.front().size()) {
                throw ParseError(fname, lineno,
                                 "ragged row: expected " + std::to_string(rows.front().size()) +
                                     " columns, got " + std::to_string(row.size()));
            }
            rows.push_back(std::move(row));
        }
    }
    const Index n = static_cast<Index>(rows.size());
    const Index d = rows.empty() ? 0 : static_cast<Index>(rows.front().size());
    DenseMatrix features(n, d);
    for (Index i = 0; i < n; ++i) {
        for (Index h = 0; h < d; ++h) features(i, h) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(h)];
    }

    std::vector<Edge> edges;
    {
        const std::string ename = edges_path.string();
        auto in = open_input(edges_path);
        std::string line;
        std::size_t lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            if (skip_line(line)) continue;
            const auto fields = split_csv(line);
            if (fields.size() != 2) {
                throw ParseError(ename, lineno, "expected 'src,dst'");
            }
            long long a = 0;
            long long b = 0;
            if (!parse_number(fields[0], a) || !parse_number(fields[1], b)) {
                throw ParseError(ename, lineno, "non-integer node index");
            }
            if (a < 0 || b < 0 || a >= n || b >= n) {
                throw ParseError(ename, lineno,
                                 "node index out of range [0, " + std::to_string(n) + ")");
            }
            if (a == b) {
                throw ParseError(ename, lineno, "self-loop");
            }
            edges.push_back(canonical(static_cast<Index>(a), static_cast<Index>(b)));
        }
    }

    std::optional<std::vector<int>> labels;
    if (labels_path) {
        const std::string lname = labels_path->string();
        auto in = open_input(*labels_path);
        std::vector<int> values;
        std::string line;
        std::size_t lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            if (skip_line(line)) continue;
            int v = 0;
            if (!parse_number(trim(line), v) || (v != 0 && v != 1)) {
                throw ParseError(lname, lineno, "label must be 0 or 1");
            }
            values.push_back(v);
        }
        if (static_cast<Index>(values.size()) != n) {
            throw ParseError(lname, lineno,
                             "expected " + std::to_string(n) + " labels, got " + std::to_string(values.size()));
        }
        labels = std::move(values);
    }

    return AttributedGraph(std::move(features), std::move(edges), std::move(labels));
}

void save_graph(const AttributedGraph& graph, const std::filesystem::path& features_path,
                const std::filesystem::path& edges_path,
                const std::optional<std::filesystem::path>& labels_path) {
    {
        auto out = open_output(features_path);
        const auto& x = graph.features();
        for (Index i = 0; i < x.rows(); ++i) {
            for (Index h = 0; h < x.cols(); ++h) {
                if (h) out << ',';
                out << format_double(x(i, h));
            }
            out << '\n';
        }
    }
    {
        auto out = open_output(edges_path);
        for (const auto& e : graph.edges()) out << e.u << ',' << e.v << '\n';
    }
    if (labels_path) {
        auto out = open_output(*labels_path);
        for (int v : graph.labels()) out << v << '\n';
    }
}

DenseMatrix normalized_adjacency(Index num_nodes, const std::vector<Edge>& edges) {
    DenseMatrix a = DenseMatrix::Identity(num_nodes, num_nodes);
    for (const auto& e : edges) {
        a(e.u, e.v) = 1.0;
        a(e.v, e.u) = 1.0;
    }
    const DenseVector inv_sqrt_deg = a.rowwise().sum().cwiseSqrt().cwiseInverse();
    return inv_sqrt_deg.asDiagonal() * a * inv_sqrt_deg.asDiagonal();
}

void PerturbationConfig::validate() const {
    if (!(noise_sigma >= 0.0) || !std::isfinite(noise_sigma)) {
        throw ContractError("noise sigma must be a finite non-negative number");
    }
    if (!(edge_dropout >= 0.0 && edge_dropout < 1.0)) {
        throw ContractError("edge dropout must lie in [0, 1)");
    }
}

DenseVector column_std(const DenseMatrix& features) {
    if (features.rows() == 0) return DenseVector::Zero(features.cols());
    const auto mean = features.colwise().mean();
    const DenseMatrix centered = features.rowwise() - mean;
    return (centered.colwise().squaredNorm() / static_cast<double>(features.rows())).cwiseSqrt().transpose();
}

PerturbedGraph perturb(const AttributedGraph& g, const PerturbationConfig& cfg, std::uint64_t stream) {
    cfg.validate();
    Rng rng(derive_seed(cfg.seed, stream));
    PerturbedGraph out{g.features(), {}};

    if (cfg.noise_sigma > 0.0) {
        DenseVector scale = DenseVector::Constant(g.feature_dim(), cfg.noise_sigma);
        if (cfg.relative_to_std) scale = cfg.noise_sigma * column_std(g.features());
        for (Index i = 0; i < out.features.rows(); ++i) {
            for (Index h = 0; h < out.features.cols(); ++h) {
                out.features(i, h) += scale(h) * rng.normal();
            }
        }
    }

    if (cfg.edge_dropout > 0.0) {
        out.edges.reserve(g.edges().size());
        for (const auto& e : g.edges()) {
            if (!rng.bernoulli(cfg.edge_dropout)) out.edges.push_back(e);
        }
    } else {
        out.edges = g.edges();
    }
    return out;
}

AttributedGraph corrupt(const AttributedGraph& g, const PerturbationConfig& cfg, std::uint64_t stream) {
    auto p = perturb(g, cfg, stream);
    std::optional<std::vector<int>> labels;
    if (g.has_labels()) labels = g.labels();
    return AttributedGraph(std::move(p.features), std::move(p.edges), std::move(labels));
}

} // namespace gel

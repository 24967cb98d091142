#include "gel/numeric/tape.hpp"

#include <cmath>
#include <string>

#include "gel/errors.hpp"
#include "gel/numeric/special.hpp"

namespace gel::ad {

namespace {

std::string shape(const DenseMatrix& m) {
    return "(" + std::to_string(m.rows()) + "x" + std::to_string(m.cols()) + ")";
}

void require_same_tape(const Var& a, const Var& b) {
    if (!a.valid() || !b.valid() || &a.tape() != &b.tape()) {
        throw ContractError("operands recorded on different tapes");
    }
}

void require_same_shape(const Var& a, const Var& b, const char* op) {
    require_same_tape(a, b);
    if (a.rows() != b.rows() || a.cols() != b.cols()) {
        throw DimensionError(std::string(op) + ": shape mismatch " + shape(a.value()) + " vs " +
                             shape(b.value()));
    }
}

Var unary(const Var& x, OpKind op, DenseMatrix value, double scalar = 0.0) {
    TapeNode node;
    node.op = op;
    node.parents = {static_cast<std::ptrdiff_t>(x.id()), -1};
    node.value = std::move(value);
    node.scalar = scalar;
    return x.tape().record(std::move(node));
}

Var binary(const Var& a, const Var& b, OpKind op, DenseMatrix value) {
    TapeNode node;
    node.op = op;
    node.parents = {static_cast<std::ptrdiff_t>(a.id()), static_cast<std::ptrdiff_t>(b.id())};
    node.value = std::move(value);
    return a.tape().record(std::move(node));
}

double stable_sigmoid(double x) {
    if (x >= 0.0) {
        return 1.0 / (1.0 + std::exp(-x));
    }
    const double e = std::exp(x);
    return e / (1.0 + e);
}

double sign_or_zero(double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); }

void accumulate(DenseMatrix& slot, const DenseMatrix& contribution) {
    if (slot.size() == 0) {
        slot = contribution;
    } else {
        slot += contribution;
    }
}

} // namespace

const DenseMatrix& Var::value() const { return tape_->value(*this); }

double Var::scalar() const {
    const auto& v = value();
    if (v.rows() != 1 || v.cols() != 1) {
        throw ContractError("scalar() on a non-1x1 node " + shape(v));
    }
    return v(0, 0);
}

const DenseMatrix& GradientSet::operator[](const Var& leaf) const { return at(leaf.id()); }

const DenseMatrix& GradientSet::at(std::size_t leaf_id) const {
    auto it = grads_.find(leaf_id);
    if (it == grads_.end()) {
        throw ContractError("no gradient recorded for node " + std::to_string(leaf_id));
    }
    return it->second;
}

Var Tape::record(TapeNode node) {
    nodes_.push_back(std::move(node));
    return Var(this, nodes_.size() - 1);
}

Var Tape::leaf(DenseMatrix value) {
    TapeNode node;
    node.op = OpKind::Leaf;
    node.value = std::move(value);
    return record(std::move(node));
}

Var Tape::constant(DenseMatrix value) {
    TapeNode node;
    node.op = OpKind::Constant;
    node.value = std::move(value);
    return record(std::move(node));
}

GradientSet Tape::backward(const Var& output) const {
    if (&output.tape() != this) {
        throw ContractError("backward: output belongs to another tape");
    }
    const DenseMatrix& out = value(output);
    if (out.rows() != 1 || out.cols() != 1) {
        throw ContractError("backward: output must be 1x1, got " + shape(out));
    }

    // Empty matrix == zero adjoint (node not reached yet).
    std::vector<DenseMatrix> adj(output.id() + 1);
    adj[output.id()] = DenseMatrix::Ones(1, 1);

    for (std::size_t k = output.id() + 1; k-- > 0;) {
        const TapeNode& n = nodes_[k];
        const DenseMatrix& g = adj[k];
        if (g.size() == 0 || n.op == OpKind::Leaf || n.op == OpKind::Constant) {
            continue;
        }
        const std::size_t pa = static_cast<std::size_t>(n.parents[0]);
        const DenseMatrix& x = nodes_[pa].value;
        const DenseMatrix& y = n.value;

        switch (n.op) {
        case OpKind::MatMul: {
            const std::size_t pb = static_cast<std::size_t>(n.parents[1]);
            const DenseMatrix& b = nodes_[pb].value;
            accumulate(adj[pa], g * b.transpose());
            accumulate(adj[pb], x.transpose() * g);
            break;
        }
        case OpKind::Add:
            accumulate(adj[pa], g);
            accumulate(adj[static_cast<std::size_t>(n.parents[1])], g);
            break;
        case OpKind::Sub:
            accumulate(adj[pa], g);
            accumulate(adj[static_cast<std::size_t>(n.parents[1])], -g);
            break;
        case OpKind::Hadamard: {
            const std::size_t pb = static_cast<std::size_t>(n.parents[1]);
            const DenseMatrix& b = nodes_[pb].value;
            accumulate(adj[pa], g.cwiseProduct(b));
            accumulate(adj[pb], g.cwiseProduct(x));
            break;
        }
        case OpKind::Divide: {
            const std::size_t pb = static_cast<std::size_t>(n.parents[1]);
            const DenseMatrix& b = nodes_[pb].value;
            accumulate(adj[pa], g.cwiseQuotient(b));
            accumulate(adj[pb], -g.cwiseProduct(y).cwiseQuotient(b));
            break;
        }
        case OpKind::AddScalar:
            accumulate(adj[pa], g);
            break;
        case OpKind::MulScalar:
            accumulate(adj[pa], n.scalar * g);
            break;
        case OpKind::Sigmoid:
            accumulate(adj[pa], g.cwiseProduct(y.unaryExpr([](double s) { return s * (1.0 - s); })));
            break;
        case OpKind::Tanh:
            accumulate(adj[pa], g.cwiseProduct(y.unaryExpr([](double t) { return 1.0 - t * t; })));
            break;
        case OpKind::Relu:
            accumulate(adj[pa], g.cwiseProduct(x.unaryExpr([](double v) { return v > 0.0 ? 1.0 : 0.0; })));
            break;
        case OpKind::Log:
            accumulate(adj[pa], g.cwiseQuotient(x));
            break;
        case OpKind::Exp:
            accumulate(adj[pa], g.cwiseProduct(y));
            break;
        case OpKind::Abs:
            accumulate(adj[pa], g.cwiseProduct(x.unaryExpr(&sign_or_zero)));
            break;
        case OpKind::Negate:
            accumulate(adj[pa], -g);
            break;
        case OpKind::Square:
            accumulate(adj[pa], 2.0 * g.cwiseProduct(x));
            break;
        case OpKind::LogGamma:
            accumulate(adj[pa], g.cwiseProduct(x.unaryExpr([](double v) { return special::digamma(v); })));
            break;
        case OpKind::Digamma:
            accumulate(adj[pa], g.cwiseProduct(x.unaryExpr([](double v) { return special::trigamma(v); })));
            break;
        case OpKind::Sum:
        case OpKind::Mean: {
            DenseMatrix grad(x.rows(), x.cols());
            double scale = 1.0;
            switch (n.axis) {
            case Axis::All:
                if (n.op == OpKind::Mean) scale = 1.0 / static_cast<double>(x.size());
                grad.setConstant(g(0, 0) * scale);
                break;
            case Axis::Cols:
                if (n.op == OpKind::Mean) scale = 1.0 / static_cast<double>(x.cols());
                grad = (g.col(0) * scale).replicate(1, x.cols());
                break;
            case Axis::Rows:
                if (n.op == OpKind::Mean) scale = 1.0 / static_cast<double>(x.rows());
                grad = (g.row(0) * scale).replicate(x.rows(), 1);
                break;
            }
            accumulate(adj[pa], grad);
            break;
        }
        case OpKind::ConcatCols: {
            const std::size_t pb = static_cast<std::size_t>(n.parents[1]);
            const Index left = x.cols();
            accumulate(adj[pa], g.leftCols(left));
            accumulate(adj[pb], g.rightCols(g.cols() - left));
            break;
        }
        case OpKind::SliceCols: {
            DenseMatrix grad = DenseMatrix::Zero(x.rows(), x.cols());
            grad.middleCols(n.offset, y.cols()) = g;
            accumulate(adj[pa], grad);
            break;
        }
        case OpKind::GatherRows: {
            DenseMatrix grad = DenseMatrix::Zero(x.rows(), x.cols());
            for (std::size_t r = 0; r < n.indices.size(); ++r) {
                grad.row(n.indices[r]) += g.row(static_cast<Index>(r));
            }
            accumulate(adj[pa], grad);
            break;
        }
        case OpKind::Leaf:
        case OpKind::Constant:
            break;
        }
    }

    GradientSet result;
    for (std::size_t k = 0; k < nodes_.size(); ++k) {
        if (nodes_[k].op != OpKind::Leaf) continue;
        const DenseMatrix& v = nodes_[k].value;
        if (k < adj.size() && adj[k].size() != 0) {
            result.grads_.emplace(k, std::move(adj[k]));
        } else {
            result.grads_.emplace(k, DenseMatrix::Zero(v.rows(), v.cols()));
        }
    }
    return result;
}

Var matmul(const Var& a, const Var& b) {
    require_same_tape(a, b);
    if (a.cols() != b.rows()) {
        throw DimensionError("matmul: " + shape(a.value()) + " x " + shape(b.value()));
    }
    DenseMatrix v = a.value() * b.value();
    return binary(a, b, OpKind::MatMul, std::move(v));
}

Var add(const Var& a, const Var& b) {
    require_same_shape(a, b, "add");
    DenseMatrix v = a.value() + b.value();
    return binary(a, b, OpKind::Add, std::move(v));
}

Var sub(const Var& a, const Var& b) {
    require_same_shape(a, b, "sub");
    DenseMatrix v = a.value() - b.value();
    return binary(a, b, OpKind::Sub, std::move(v));
}

Var hadamard(const Var& a, const Var& b) {
    require_same_shape(a, b, "hadamard");
    DenseMatrix v = a.value().cwiseProduct(b.value());
    return binary(a, b, OpKind::Hadamard, std::move(v));
}

Var divide(const Var& a, const Var& b) {
    require_same_shape(a, b, "divide");
    if ((b.value().array() == 0.0).any()) {
        throw DomainError("divide: zero divisor");
    }
    DenseMatrix v = a.value().cwiseQuotient(b.value());
    return binary(a, b, OpKind::Divide, std::move(v));
}

Var add_scalar(const Var& x, double s) {
    DenseMatrix v = x.value().array() + s;
    return unary(x, OpKind::AddScalar, std::move(v), s);
}

Var mul_scalar(const Var& x, double s) {
    DenseMatrix v = s * x.value();
    return unary(x, OpKind::MulScalar, std::move(v), s);
}

Var sigmoid(const Var& x) { return unary(x, OpKind::Sigmoid, x.value().unaryExpr(&stable_sigmoid)); }

Var tanh(const Var& x) {
    return unary(x, OpKind::Tanh, x.value().unaryExpr([](double v) { return std::tanh(v); }));
}

Var relu(const Var& x) { return unary(x, OpKind::Relu, x.value().cwiseMax(0.0)); }

Var log(const Var& x) {
    if (!(x.value().array() > 0.0).all()) {
        throw DomainError("log: non-positive entry");
    }
    return unary(x, OpKind::Log, x.value().unaryExpr([](double v) { return std::log(v); }));
}

Var exp(const Var& x) {
    return unary(x, OpKind::Exp, x.value().unaryExpr([](double v) { return std::exp(v); }));
}

Var abs(const Var& x) { return unary(x, OpKind::Abs, x.value().cwiseAbs()); }

Var negate(const Var& x) { return unary(x, OpKind::Negate, -x.value()); }

Var square(const Var& x) { return unary(x, OpKind::Square, x.value().cwiseAbs2()); }

Var lgamma(const Var& x) {
    return unary(x, OpKind::LogGamma, x.value().unaryExpr([](double v) { return special::log_gamma(v); }));
}

Var digamma(const Var& x) {
    return unary(x, OpKind::Digamma, x.value().unaryExpr([](double v) { return special::digamma(v); }));
}

namespace {

Var reduce(const Var& x, Axis axis, OpKind op) {
    const DenseMatrix& v = x.value();
    DenseMatrix r;
    switch (axis) {
    case Axis::All:
        r = DenseMatrix::Constant(1, 1, op == OpKind::Sum ? v.sum() : v.mean());
        break;
    case Axis::Cols:
        r = op == OpKind::Sum ? DenseMatrix(v.rowwise().sum()) : DenseMatrix(v.rowwise().mean());
        break;
    case Axis::Rows:
        r = op == OpKind::Sum ? DenseMatrix(v.colwise().sum()) : DenseMatrix(v.colwise().mean());
        break;
    }
    TapeNode node;
    node.op = op;
    node.parents = {static_cast<std::ptrdiff_t>(x.id()), -1};
    node.value = std::move(r);
    node.axis = axis;
    return x.tape().record(std::move(node));
}

} // namespace

Var sum(const Var& x, Axis axis) { return reduce(x, axis, OpKind::Sum); }

Var mean(const Var& x, Axis axis) { return reduce(x, axis, OpKind::Mean); }

Var concat_cols(const Var& a, const Var& b) {
    require_same_tape(a, b);
    if (a.rows() != b.rows()) {
        throw DimensionError("concat_cols: row mismatch " + shape(a.value()) + " vs " + shape(b.value()));
    }
    DenseMatrix v(a.rows(), a.cols() + b.cols());
    v << a.value(), b.value();
    return binary(a, b, OpKind::ConcatCols, std::move(v));
}

Var slice_cols(const Var& x, Index begin, Index count) {
    if (begin < 0 || count < 0 || begin + count > x.cols()) {
        throw DimensionError("slice_cols: range out of bounds for " + shape(x.value()));
    }
    TapeNode node;
    node.op = OpKind::SliceCols;
    node.parents = {static_cast<std::ptrdiff_t>(x.id()), -1};
    node.value = x.value().middleCols(begin, count);
    node.offset = begin;
    return x.tape().record(std::move(node));
}

Var gather_rows(const Var& x, std::span<const Index> rows) {
    const DenseMatrix& v = x.value();
    DenseMatrix r(static_cast<Index>(rows.size()), v.cols());
    for (std::size_t k = 0; k < rows.size(); ++k) {
        if (rows[k] < 0 || rows[k] >= v.rows()) {
            throw DimensionError("gather_rows: row index " + std::to_string(rows[k]) + " out of range");
        }
        r.row(static_cast<Index>(k)) = v.row(rows[k]);
    }
    TapeNode node;
    node.op = OpKind::GatherRows;
    node.parents = {static_cast<std::ptrdiff_t>(x.id()), -1};
    node.value = std::move(r);
    node.indices.assign(rows.begin(), rows.end());
    return x.tape().record(std::move(node));
}

} // namespace gel::ad

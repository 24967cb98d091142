#pragma once

#include <array>
#include <cstddef>
#include <map>
#include <span>
#include <vector>

#include "gel/numeric/dense.hpp"

namespace gel::ad {

enum class OpKind {
    Leaf,
    Constant,
    MatMul,
    Add,
    Sub,
    Hadamard,
    Divide,
    AddScalar,
    MulScalar,
    Sigmoid,
    Tanh,
    Relu,
    Log,
    Exp,
    Abs,
    Negate,
    Square,
    LogGamma,
    Digamma,
    Sum,
    Mean,
    ConcatCols,
    SliceCols,
    GatherRows,
};

/// Reduction axis. `Rows` collapses the rows (result 1 x cols), `Cols`
/// collapses the columns (result rows x 1), `All` yields 1 x 1.
enum class Axis { Rows, Cols, All };

class Tape;

/// Handle to a node recorded on a tape. Cheap to copy; valid as long as the tape lives.
class Var {
public:
    Var() = default;

    std::size_t id() const noexcept { return id_; }
    Tape& tape() const noexcept { return *tape_; }
    bool valid() const noexcept { return tape_ != nullptr; }

    const DenseMatrix& value() const;
    Index rows() const { return value().rows(); }
    Index cols() const { return value().cols(); }
    /// Value of a 1x1 node.
    double scalar() const;

private:
    friend class Tape;
    Var(Tape* tape, std::size_t id) : tape_(tape), id_(id) {}

    Tape* tape_ = nullptr;
    std::size_t id_ = 0;
};

/// Gradients of a scalar output with respect to every leaf of the tape.
class GradientSet {
public:
    const DenseMatrix& operator[](const Var& leaf) const;
    const DenseMatrix& at(std::size_t leaf_id) const;
    bool contains(const Var& leaf) const { return grads_.count(leaf.id()) != 0; }
    std::size_t size() const { return grads_.size(); }

    auto begin() const { return grads_.begin(); }
    auto end() const { return grads_.end(); }

private:
    friend class Tape;
    std::map<std::size_t, DenseMatrix> grads_;
};

struct TapeNode {
    OpKind op = OpKind::Leaf;
    std::array<std::ptrdiff_t, 2> parents{-1, -1};
    DenseMatrix value;
    double scalar = 0.0;
    Axis axis = Axis::All;
    Index offset = 0;
    std::vector<Index> indices;
};

/// Append-only record of a computation. Single-threaded; separate tapes are independent.
class Tape {
public:
    Tape() = default;
    Tape(const Tape&) = delete;
    Tape& operator=(const Tape&) = delete;

    /// Differentiable input.
    Var leaf(DenseMatrix value);
    /// Non-differentiable input.
    Var constant(DenseMatrix value);

    const DenseMatrix& value(const Var& v) const { return nodes_.at(v.id()).value; }
    const TapeNode& node(std::size_t id) const { return nodes_.at(id); }
    std::size_t size() const noexcept { return nodes_.size(); }

    /// Reverse-mode sweep from a 1x1 output. Does not modify the tape, so it
    /// can be called repeatedly with identical results.
    GradientSet backward(const Var& output) const;

    Var record(TapeNode node);

private:
    std::vector<TapeNode> nodes_;
};

Var matmul(const Var& a, const Var& b);
Var add(const Var& a, const Var& b);
Var sub(const Var& a, const Var& b);
Var hadamard(const Var& a, const Var& b);
Var divide(const Var& a, const Var& b);
Var add_scalar(const Var& x, double s);
Var mul_scalar(const Var& x, double s);
Var sigmoid(const Var& x);
Var tanh(const Var& x);
Var relu(const Var& x);
Var log(const Var& x);
Var exp(const Var& x);
Var abs(const Var& x);
Var negate(const Var& x);
Var square(const Var& x);
Var lgamma(const Var& x);
Var digamma(const Var& x);
Var sum(const Var& x, Axis axis = Axis::All);
Var mean(const Var& x, Axis axis = Axis::All);
Var concat_cols(const Var& a, const Var& b);
Var slice_cols(const Var& x, Index begin, Index count);
Var gather_rows(const Var& x, std::span<const Index> rows);

inline Var operator+(const Var& a, const Var& b) { return add(a, b); }
inline Var operator-(const Var& a, const Var& b) { return sub(a, b); }
inline Var operator-(const Var& x) { return negate(x); }
inline Var operator+(const Var& x, double s) { return add_scalar(x, s); }
inline Var operator+(double s, const Var& x) { return add_scalar(x, s); }
inline Var operator-(const Var& x, double s) { return add_scalar(x, -s); }
inline Var operator*(double s, const Var& x) { return mul_scalar(x, s); }
inline Var operator*(const Var& x, double s) { return mul_scalar(x, s); }

} // namespace gel::ad

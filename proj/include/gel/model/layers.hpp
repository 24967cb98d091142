#pragma once

#include <cstdint>
#include <vector>

#include "gel/numeric/dense.hpp"
#include "gel/numeric/tape.hpp"
#include "gel/random.hpp"

namespace gel {

/// Uniform(-bound, bound) matrix drawn row-major from `rng`.
DenseMatrix uniform_matrix(Index rows, Index cols, double bound, Rng& rng);

/// Affine layer y = x W + b; `weight` is in x out, `bias` is 1 x out.
struct DenseLayer {
    DenseMatrix weight;
    DenseMatrix bias;
};

enum class Activation { Identity, Tanh, Relu };

/// Stack of affine layers with one activation per layer (applied after the affine map).
struct Mlp {
    std::vector<DenseLayer> layers;
    std::vector<Activation> activations;

    Index input_dim() const { return layers.front().weight.rows(); }
    Index output_dim() const { return layers.back().weight.cols(); }
};

/// Fan-in scaled uniform init: bound sqrt(6 / fan_in) before relu layers,
/// sqrt(3 / fan_in) otherwise; biases zero.
Mlp make_mlp(const std::vector<Index>& dims, const std::vector<Activation>& activations, Rng& rng);

/// Tape handles for an Mlp's parameters.
struct MlpVars {
    std::vector<ad::Var> weights;
    std::vector<ad::Var> biases;
    std::vector<Activation> activations;
};

MlpVars bind(ad::Tape& tape, const Mlp& mlp);

ad::Var activate(const ad::Var& x, Activation act);

/// Applies the stack to the rows of `x`. Biases are broadcast by an outer
/// product with a ones column so every op stays a plain matrix op.
ad::Var forward(const MlpVars& mlp, const ad::Var& x);

} // namespace gel

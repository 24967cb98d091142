#include "gel/model/layers.hpp"

#include <cmath>

#include "gel/errors.hpp"

namespace gel {

DenseMatrix uniform_matrix(Index rows, Index cols, double bound, Rng& rng) {
    DenseMatrix m(rows, cols);
    for (Index r = 0; r < rows; ++r)
        for (Index c = 0; c < cols; ++c) m(r, c) = rng.uniform(-bound, bound);
    return m;
}

Mlp make_mlp(const std::vector<Index>& dims, const std::vector<Activation>& activations, Rng& rng) {
    if (dims.size() < 2 || activations.size() + 1 != dims.size()) {
        throw ContractError("make_mlp: need one activation per layer");
    }
    Mlp mlp;
    for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
        if (dims[l] < 1 || dims[l + 1] < 1) throw ContractError("make_mlp: dimensions must be >= 1");
        const double fan_in = static_cast<double>(dims[l]);
        const double bound = std::sqrt((activations[l] == Activation::Relu ? 6.0 : 3.0) / fan_in);
        mlp.layers.push_back({uniform_matrix(dims[l], dims[l + 1], bound, rng), DenseMatrix::Zero(1, dims[l + 1])});
    }
    mlp.activations = activations;
    return mlp;
}

MlpVars bind(ad::Tape& tape, const Mlp& mlp) {
    MlpVars vars;
    for (const auto& layer : mlp.layers) {
        vars.weights.push_back(tape.leaf(layer.weight));
        vars.biases.push_back(tape.leaf(layer.bias));
    }
    vars.activations = mlp.activations;
    return vars;
}

ad::Var activate(const ad::Var& x, Activation act) {
    switch (act) {
    case Activation::Tanh:
        return ad::tanh(x);
    case Activation::Relu:
        return ad::relu(x);
    case Activation::Identity:
        break;
    }
    return x;
}

ad::Var forward(const MlpVars& mlp, const ad::Var& x) {
    const ad::Var ones = x.tape().constant(DenseMatrix::Ones(x.rows(), 1));
    ad::Var h = x;
    for (std::size_t l = 0; l < mlp.weights.size(); ++l) {
        h = ad::matmul(h, mlp.weights[l]) + ad::matmul(ones, mlp.biases[l]);
        h = activate(h, mlp.activations[l]);
    }
    return h;
}

} // namespace gel

#include "gel/losses/losses.hpp"

#include <cmath>
#include <numbers>

#include "gel/errors.hpp"

namespace gel {

namespace {

using ad::Var;

void require_pair_shape(const BetaVars& e, const PairSet& pairs) {
    const auto m = static_cast<Index>(pairs.size());
    if (e.eps.rows() != m || e.eps.cols() != 1 || e.eps_bar.rows() != m || e.eps_bar.cols() != 1) {
        throw DimensionError("evidence does not match the pair set");
    }
    for (double f : pairs.flags) {
        if (f != 0.0 && f != 1.0) throw ContractError("adjacency flags must be 0 or 1");
    }
}

Var column(ad::Tape& tape, const std::vector<double>& values) {
    DenseMatrix m(static_cast<Index>(values.size()), 1);
    for (std::size_t k = 0; k < values.size(); ++k) m(static_cast<Index>(k), 0) = values[k];
    return tape.constant(std::move(m));
}

} // namespace

void LossWeights::validate() const {
    for (double w : {nll_feature, nll_topology, reg_feature, reg_topology}) {
        if (!(w >= 0.0) || !std::isfinite(w)) throw ContractError("loss weights must be finite and >= 0");
    }
    if (nll_feature + nll_topology + reg_feature + reg_topology == 0.0) {
        throw ContractError("at least one loss weight must be positive");
    }
}

Var nig_nll(const NigVars& p, const DenseMatrix& x) {
    if (x.rows() != p.gamma.rows() || x.cols() != p.gamma.cols()) {
        throw DimensionError("nig_nll: target shape differs from NIG parameters");
    }
    p.values().validate();
    ad::Tape& tape = p.gamma.tape();
    const Var target = tape.constant(x);

    const Var omega = 2.0 * ad::hadamard(p.beta, p.nu + 1.0);
    const Var residual_sq = ad::square(target - p.gamma);
    const Var half_log_pi_over_nu = -0.5 * ad::log(p.nu) + 0.5 * std::log(std::numbers::pi);
    const Var evidence_term = -ad::hadamard(p.alpha, ad::log(omega));
    const Var spread_term =
        ad::hadamard(p.alpha + 0.5, ad::log(ad::hadamard(residual_sq, p.nu) + omega));
    const Var gamma_ratio = ad::lgamma(p.alpha) - ad::lgamma(p.alpha + 0.5);
    return ad::sum(half_log_pi_over_nu + evidence_term + spread_term + gamma_ratio);
}

Var beta_nll(const BetaVars& e, const PairSet& pairs) {
    require_pair_shape(e, pairs);
    ad::Tape& tape = e.eps.tape();
    const Var flags = column(tape, pairs.flags);
    std::vector<double> complement(pairs.flags.size());
    for (std::size_t k = 0; k < complement.size(); ++k) complement[k] = 1.0 - pairs.flags[k];
    const Var not_flags = column(tape, complement);
    const Var weights = column(tape, pairs.weights);

    const Var log_s = ad::log(e.eps + e.eps_bar);
    const Var per_pair = log_s - ad::hadamard(flags, ad::log(e.eps)) - ad::hadamard(not_flags, ad::log(e.eps_bar));
    return ad::sum(ad::hadamard(weights, per_pair));
}

Var feature_evidence_reg(const NigVars& p, const DenseMatrix& x) {
    if (x.rows() != p.gamma.rows() || x.cols() != p.gamma.cols()) {
        throw DimensionError("feature_evidence_reg: target shape differs from NIG parameters");
    }
    const Var target = p.gamma.tape().constant(x);
    const Var evidence = 2.0 * p.nu + p.alpha;
    return ad::sum(ad::hadamard(ad::abs(target - p.gamma), evidence));
}

Var kl_beta_uniform(const Var& eps, const Var& eps_bar) {
    const Var s = eps + eps_bar;
    return ad::lgamma(s) - ad::lgamma(eps) - ad::lgamma(eps_bar) +
           ad::hadamard(eps - 1.0, ad::digamma(eps)) + ad::hadamard(eps_bar - 1.0, ad::digamma(eps_bar)) -
           ad::hadamard(s - 2.0, ad::digamma(s));
}

Var topology_evidence_reg(const BetaVars& e, const PairSet& pairs) {
    require_pair_shape(e, pairs);
    ad::Tape& tape = e.eps.tape();
    const Var flags = column(tape, pairs.flags);
    const Var weights = column(tape, pairs.weights);
    const Var p_hat = ad::divide(e.eps, e.eps + e.eps_bar);
    const Var error = ad::abs(flags - p_hat);
    return ad::sum(ad::hadamard(weights, ad::hadamard(error, kl_beta_uniform(e.eps, e.eps_bar))));
}

Var total_loss(const LossParts& parts, const LossWeights& w) {
    return w.nll_feature * parts.nll_feature + w.nll_topology * parts.nll_topology +
           w.reg_feature * parts.reg_feature + w.reg_topology * parts.reg_topology;
}

} // namespace gel

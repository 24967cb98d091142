#pragma once

#include "gel/model/evidence.hpp"
#include "gel/model/heads.hpp"
#include "gel/numeric/tape.hpp"

namespace gel {

/// Multi-task weights (lambda_1 .. lambda_4). At least one must be positive.
struct LossWeights {
    double nll_feature = 0.7;
    double nll_topology = 0.3;
    double reg_feature = 0.3;
    double reg_topology = 0.7;

    void validate() const;
};

struct LossParts {
    ad::Var nll_feature;
    ad::Var nll_topology;
    ad::Var reg_feature;
    ad::Var reg_topology;
};

/// Sum over (i, h) of the Student-t negative log marginal of x under the NIG.
/// Throws ContractError if the NIG invariants are violated or shapes differ.
ad::Var nig_nll(const NigVars& p, const DenseMatrix& x);

/// Sum over pairs of w * [A log(S/eps) + (1 - A) log(S/eps_bar)].
ad::Var beta_nll(const BetaVars& e, const PairSet& pairs);

/// Sum over (i, h) of |x - gamma| (2 nu + alpha).
ad::Var feature_evidence_reg(const NigVars& p, const DenseMatrix& x);

/// Entrywise KL(Beta(eps, eps_bar) || Beta(1, 1)); same shape as the inputs.
ad::Var kl_beta_uniform(const ad::Var& eps, const ad::Var& eps_bar);

/// Sum over pairs of w * |A - eps/S| * KL(Beta(eps, eps_bar) || Beta(1, 1)).
ad::Var topology_evidence_reg(const BetaVars& e, const PairSet& pairs);

ad::Var total_loss(const LossParts& parts, const LossWeights& w);

} // namespace gel

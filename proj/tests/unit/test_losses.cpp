#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "gel/errors.hpp"
#include "gel/losses/closed_form.hpp"
#include "gel/losses/losses.hpp"
#include "oracles.hpp"

namespace {

using gel::DenseMatrix;
using gel::Index;
namespace ad = gel::ad;

struct NigInput {
    DenseMatrix gamma, nu, alpha, beta;
};

gel::NigVars bind_nig(ad::Tape& t, const NigInput& in) {
    return {t.leaf(in.gamma), t.leaf(in.nu), t.leaf(in.alpha), t.leaf(in.beta)};
}

NigInput single(double gamma, double nu, double alpha, double beta) {
    return {DenseMatrix::Constant(1, 1, gamma), DenseMatrix::Constant(1, 1, nu), DenseMatrix::Constant(1, 1, alpha),
            DenseMatrix::Constant(1, 1, beta)};
}

double nig_loss(const NigInput& in, const DenseMatrix& x) {
    ad::Tape t;
    return gel::nig_nll(bind_nig(t, in), x).scalar();
}

gel::BetaVars bind_beta(ad::Tape& t, std::vector<double> eps, std::vector<double> eps_bar) {
    DenseMatrix a(static_cast<Index>(eps.size()), 1);
    DenseMatrix b(static_cast<Index>(eps.size()), 1);
    for (std::size_t k = 0; k < eps.size(); ++k) {
        a(static_cast<Index>(k), 0) = eps[k];
        b(static_cast<Index>(k), 0) = eps_bar[k];
    }
    return {t.leaf(a), t.leaf(b)};
}

gel::PairSet flags_of(std::vector<double> flags) {
    gel::PairSet p;
    for (std::size_t k = 0; k < flags.size(); ++k) p.push(static_cast<Index>(k), static_cast<Index>(k + 1), flags[k]);
    return p;
}

TEST(NigNll, UnitExampleMatchesStudentT) {
    const double expected = -(std::lgamma(2.5) - std::lgamma(2.0) - 0.5 * std::log(4.0 * std::numbers::pi));
    const double got = nig_loss(single(0.0, 1.0, 2.0, 1.0), DenseMatrix::Zero(1, 1));
    EXPECT_NEAR(got, expected, 1e-12);
    EXPECT_NEAR(got, 0.9808, 5e-5);
    EXPECT_NEAR(got, gel::oracle::nig_latent_nll(0.0, 0.0, 1.0, 2.0, 1.0), 1e-6);
}

TEST(NigNll, ClosedFormAgreesWithTape) {
    std::mt19937_64 gen(11);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int k = 0; k < 200; ++k) {
        const double x = -10 + 20 * u(gen);
        const double g = -5 + 10 * u(gen);
        const double nu = 0.1 + 9.9 * u(gen);
        const double a = 1.1 + 8.9 * u(gen);
        const double b = 0.1 + 9.9 * u(gen);
        const double tape = nig_loss(single(g, nu, a, b), DenseMatrix::Constant(1, 1, x));
        EXPECT_NEAR(tape, gel::closed_form::nig_nll(x, g, nu, a, b), 1e-12);
        EXPECT_NEAR(tape, gel::oracle::nig_student_t_nll(x, g, nu, a, b), 1e-9);
    }
}

TEST(NigNll, MonteCarloMarginal) {
    const double x = 0.7;
    const double gamma = 0.2;
    const double nu = 1.5;
    const double alpha = 3.0;
    const double beta = 2.0;
    std::mt19937_64 gen(5);
    std::gamma_distribution<double> precision(alpha, 1.0 / beta);
    std::normal_distribution<double> std_normal;
    const int draws = 1000000;
    double density = 0.0;
    for (int k = 0; k < draws; ++k) {
        const double var = 1.0 / precision(gen);
        const double mu = gamma + std::sqrt(var / nu) * std_normal(gen);
        density += std::exp(-(x - mu) * (x - mu) / (2 * var)) / std::sqrt(2 * std::numbers::pi * var);
    }
    const double mc = -std::log(density / draws);
    EXPECT_NEAR(nig_loss(single(gamma, nu, alpha, beta), DenseMatrix::Constant(1, 1, x)), mc, 5e-3);
}

TEST(NigNll, AdditiveOverEntries) {
    NigInput two{DenseMatrix(1, 2), DenseMatrix(1, 2), DenseMatrix(1, 2), DenseMatrix(1, 2)};
    two.gamma << 0.5, -1.0;
    two.nu << 2.0, 0.3;
    two.alpha << 1.5, 4.0;
    two.beta << 0.7, 2.5;
    DenseMatrix x(1, 2);
    x << 1.0, 3.0;
    const double joint = nig_loss(two, x);
    const double a = nig_loss(single(0.5, 2.0, 1.5, 0.7), DenseMatrix::Constant(1, 1, 1.0));
    const double b = nig_loss(single(-1.0, 0.3, 4.0, 2.5), DenseMatrix::Constant(1, 1, 3.0));
    EXPECT_NEAR(joint, a + b, 1e-13);
}

TEST(NigNll, MinimizedAtGammaEqualsX) {
    const double x = 1.3;
    const double best = nig_loss(single(x, 0.8, 2.2, 1.1), DenseMatrix::Constant(1, 1, x));
    for (double g = x - 3.0; g <= x + 3.0; g += 0.01) {
        if (std::abs(g - x) < 1e-9) continue;
        EXPECT_GT(nig_loss(single(g, 0.8, 2.2, 1.1), DenseMatrix::Constant(1, 1, x)), best);
    }
}

TEST(NigNll, InvariantAndShapeErrors) {
    EXPECT_THROW(nig_loss(single(0.0, 1.0, 1.0, 1.0), DenseMatrix::Zero(1, 1)), gel::ContractError);
    EXPECT_THROW(nig_loss(single(0.0, -1.0, 2.0, 1.0), DenseMatrix::Zero(1, 1)), gel::ContractError);
    EXPECT_THROW(nig_loss(single(0.0, 1.0, 2.0, 1.0), DenseMatrix::Zero(2, 1)), gel::DimensionError);
}

double beta_loss(std::vector<double> eps, std::vector<double> eps_bar, std::vector<double> flags) {
    ad::Tape t;
    return gel::beta_nll(bind_beta(t, eps, eps_bar), flags_of(flags)).scalar();
}

TEST(BetaNll, Examples) {
    EXPECT_NEAR(beta_loss({3}, {1}, {1}), 0.2876820724517809, 1e-15);
    EXPECT_NEAR(beta_loss({1}, {3}, {0}), std::log(4.0 / 3.0), 1e-15);
    EXPECT_NEAR(beta_loss({2.5}, {2.5}, {0}), std::log(2.0), 1e-15);
    EXPECT_NEAR(beta_loss({2.5}, {2.5}, {1}), std::log(2.0), 1e-15);
    EXPECT_NEAR(beta_loss({3, 1}, {1, 3}, {1, 0}), 2 * std::log(4.0 / 3.0), 1e-15);
}

TEST(BetaNll, MonotoneForObservedEdge) {
    for (double e = 1.0; e < 20.0; e += 0.5) {
        EXPECT_GT(beta_loss({e}, {2.0}, {1}), beta_loss({e + 0.5}, {2.0}, {1}));
        EXPECT_LT(beta_loss({2.0}, {e}, {1}), beta_loss({2.0}, {e + 0.5}, {1}));
        EXPECT_GT(beta_loss({2.0}, {e}, {0}), beta_loss({2.0}, {e + 0.5}, {0}));
    }
}

TEST(BetaNll, WeightsScalePairs) {
    ad::Tape t;
    gel::PairSet p;
    p.push(0, 1, 1.0, 3.0);
    EXPECT_NEAR(gel::beta_nll(bind_beta(t, {3}, {1}), p).scalar(), 3 * std::log(4.0 / 3.0), 1e-15);
}

TEST(BetaNll, RejectsBadFlagsAndShapes) {
    ad::Tape t;
    EXPECT_THROW(gel::beta_nll(bind_beta(t, {3}, {1}), flags_of({0.5})), gel::ContractError);
    EXPECT_THROW(gel::beta_nll(bind_beta(t, {3, 2}, {1, 1}), flags_of({1})), gel::DimensionError);
}

double reg_f(const NigInput& in, const DenseMatrix& x) {
    ad::Tape t;
    return gel::feature_evidence_reg(bind_nig(t, in), x).scalar();
}

TEST(FeatureReg, Examples) {
    EXPECT_EQ(reg_f(single(2.0, 1.0, 2.0, 1.0), DenseMatrix::Constant(1, 1, 2.0)), 0.0);
    EXPECT_DOUBLE_EQ(reg_f(single(0.0, 1.0, 2.0, 1.0), DenseMatrix::Constant(1, 1, 1.0)), 4.0);
    EXPECT_DOUBLE_EQ(reg_f(single(0.0, 1.0, 2.0, 1.0), DenseMatrix::Constant(1, 1, -1.0)), 4.0);
    for (double v = 0.1; v < 5.0; v += 0.1) {
        EXPECT_LT(reg_f(single(0.0, v, 2.0, 1.0), DenseMatrix::Constant(1, 1, 0.5)),
                  reg_f(single(0.0, v + 0.1, 2.0, 1.0), DenseMatrix::Constant(1, 1, 0.5)));
        EXPECT_LT(reg_f(single(0.0, 1.0, 1 + v, 1.0), DenseMatrix::Constant(1, 1, 0.5)),
                  reg_f(single(0.0, 1.0, 1.1 + v, 1.0), DenseMatrix::Constant(1, 1, 0.5)));
    }
}

TEST(KlBetaUniform, Examples) {
    EXPECT_NEAR(gel::closed_form::kl_beta_uniform(1.0, 1.0), 0.0, 1e-15);
    const auto rule = gel::oracle::gauss_legendre(2000);
    EXPECT_NEAR(gel::closed_form::kl_beta_uniform(2.0, 2.0),
                gel::oracle::kl_beta_uniform_quadrature(2.0, 2.0, rule), 1e-6);
    // E[log(6 p (1 - p))] = log 6 + 2 (psi(2) - psi(4)) = log 6 - 5/3
    EXPECT_NEAR(gel::closed_form::kl_beta_uniform(2.0, 2.0), std::log(6.0) - 5.0 / 3.0, 1e-13);
}

TEST(KlBetaUniform, NonNegativeOnRandomDraws) {
    std::mt19937_64 gen(21);
    std::uniform_real_distribution<double> u(1.0, 60.0);
    for (int k = 0; k < 1000; ++k) EXPECT_GE(gel::closed_form::kl_beta_uniform(u(gen), u(gen)), 0.0);
}

TEST(KlBetaUniform, TapeMatchesClosedForm) {
    ad::Tape t;
    auto e = bind_beta(t, {1.0, 2.0, 7.5}, {1.0, 2.0, 1.5});
    const DenseMatrix kl = gel::kl_beta_uniform(e.eps, e.eps_bar).value();
    EXPECT_NEAR(kl(0, 0), 0.0, 1e-15);
    EXPECT_NEAR(kl(1, 0), gel::closed_form::kl_beta_uniform(2.0, 2.0), 1e-15);
    EXPECT_NEAR(kl(2, 0), gel::closed_form::kl_beta_uniform(7.5, 1.5), 1e-15);
}

double reg_t(std::vector<double> eps, std::vector<double> eps_bar, std::vector<double> flags) {
    ad::Tape t;
    return gel::topology_evidence_reg(bind_beta(t, eps, eps_bar), flags_of(flags)).scalar();
}

TEST(TopologyReg, Examples) {
    EXPECT_NEAR(reg_t({1}, {1}, {1}), 0.0, 1e-15);
    EXPECT_NEAR(reg_t({1}, {1}, {0}), 0.0, 1e-15);
    EXPECT_EQ(reg_t({3}, {1}, {1}) > 0.0, true);
    const auto rule = gel::oracle::gauss_legendre(2000);
    EXPECT_NEAR(reg_t({4}, {1}, {1}), 0.2 * gel::oracle::kl_beta_uniform_quadrature(4.0, 1.0, rule), 1e-6);
}

TEST(TopologyReg, ZeroPrefactorWhenPredictionExact) {
    // eps / S equals the flag only at the boundary; approach it and watch the term vanish.
    EXPECT_LT(reg_t({1e8}, {1}, {1}), 1e-6);
    EXPECT_LT(reg_t({1}, {1e8}, {0}), 1e-6);
}

gel::LossParts unit_parts(ad::Tape& t, double v) {
    const auto c = [&](double s) { return t.leaf(DenseMatrix::Constant(1, 1, s)); };
    return {c(v), c(v), c(v), c(v)};
}

TEST(TotalLoss, Linearity) {
    ad::Tape t;
    const auto parts = unit_parts(t, 1.0);
    EXPECT_NEAR(gel::total_loss(parts, {}).scalar(), 2.0, 1e-15);
    EXPECT_NEAR(gel::total_loss(parts, {1.4, 0.6, 0.6, 1.4}).scalar(), 4.0, 1e-15);
    ad::Tape t2;
    gel::LossParts mixed{t2.leaf(DenseMatrix::Constant(1, 1, 3.5)), t2.leaf(DenseMatrix::Constant(1, 1, 9.0)),
                         t2.leaf(DenseMatrix::Constant(1, 1, 9.0)), t2.leaf(DenseMatrix::Constant(1, 1, 9.0))};
    EXPECT_EQ(gel::total_loss(mixed, {1.0, 0.0, 0.0, 0.0}).scalar(), 3.5);
}

TEST(TotalLoss, WeightValidation) {
    EXPECT_NO_THROW(gel::LossWeights{}.validate());
    EXPECT_THROW((gel::LossWeights{0, 0, 0, 0}.validate()), gel::ContractError);
    EXPECT_THROW((gel::LossWeights{-1, 1, 1, 1}.validate()), gel::ContractError);
    EXPECT_THROW((gel::LossWeights{std::nan(""), 1, 1, 1}.validate()), gel::ContractError);
}

TEST(Gradients, LossesMatchFiniteDifference) {
    std::mt19937_64 gen(8);
    const NigInput base{gel::oracle::random_matrix(3, 2, -1, 1, gen), gel::oracle::random_matrix(3, 2, 0.3, 3, gen),
                        gel::oracle::random_matrix(3, 2, 1.2, 4, gen), gel::oracle::random_matrix(3, 2, 0.3, 3, gen)};
    const DenseMatrix x = gel::oracle::random_matrix(3, 2, -2, 2, gen);
    for (int which = 0; which < 4; ++which) {
        auto eval = [&](const DenseMatrix& m) {
            NigInput in = base;
            (which == 0 ? in.gamma : which == 1 ? in.nu : which == 2 ? in.alpha : in.beta) = m;
            return nig_loss(in, x) + reg_f(in, x);
        };
        ad::Tape t;
        auto vars = bind_nig(t, base);
        const auto grads = t.backward(gel::nig_nll(vars, x) + gel::feature_evidence_reg(vars, x));
        const ad::Var& leaf = which == 0 ? vars.gamma : which == 1 ? vars.nu : which == 2 ? vars.alpha : vars.beta;
        const DenseMatrix& at = which == 0 ? base.gamma : which == 1 ? base.nu : which == 2 ? base.alpha : base.beta;
        EXPECT_LT(gel::oracle::relative_error(grads[leaf], gel::oracle::finite_difference(eval, at)), 1e-6) << which;
    }
}

} // namespace

#pragma once

#include <cmath>
#include <concepts>
#include <numbers>

#include "gel/numeric/special.hpp"

namespace gel::closed_form {

/// Per-entry evidential regression NLL with Omega = 2 beta (1 + nu).
template <std::floating_point Scalar>
Scalar nig_nll(Scalar x, Scalar gamma, Scalar nu, Scalar alpha, Scalar beta) {
    const Scalar omega = 2 * beta * (1 + nu);
    const Scalar r = x - gamma;
    return Scalar(0.5) * std::log(std::numbers::pi_v<Scalar> / nu) - alpha * std::log(omega) +
           (alpha + Scalar(0.5)) * std::log(r * r * nu + omega) + special::log_gamma(alpha) -
           special::log_gamma(alpha + Scalar(0.5));
}

/// A log(S/eps) + (1 - A) log(S/eps_bar).
template <std::floating_point Scalar>
Scalar beta_nll(Scalar flag, Scalar eps, Scalar eps_bar) {
    const Scalar s = eps + eps_bar;
    return flag * std::log(s / eps) + (1 - flag) * std::log(s / eps_bar);
}

/// KL(Beta(a, b) || Beta(1, 1)).
template <std::floating_point Scalar>
Scalar kl_beta_uniform(Scalar a, Scalar b) {
    using special::digamma;
    using special::log_gamma;
    const Scalar s = a + b;
    return log_gamma(s) - log_gamma(a) - log_gamma(b) + (a - 1) * digamma(a) + (b - 1) * digamma(b) -
           (s - 2) * digamma(s);
}

} // namespace gel::closed_form

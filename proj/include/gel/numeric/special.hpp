#pragma once

#include <array>
#include <cmath>
#include <concepts>
#include <numbers>

#include "gel/errors.hpp"

namespace gel::special {

namespace detail {

// Lanczos approximation with g = 607/128 and 15 terms (P. Godfrey's
// coefficient set, as published in Apache Commons Math `Gamma.LANCZOS`).
// Relative error is below 1e-15 for x >= 0.5.
inline constexpr double kLanczosG = 607.0 / 128.0;
inline constexpr std::array<double, 15> kLanczos = {
    0.99999999999999709182,     57.156235665862923517,     -59.597960355475491248,
    14.136097974741747174,      -0.49191381609762019978,   .33994649984811888699e-4,
    .46523628927048575665e-4,   -.98374475304879564677e-4, .15808870322491248884e-3,
    -.21026444172410488319e-3,  .21743961811521264320e-3,  -.16431810653676389022e-3,
    .84418223983852743293e-4,   -.26190838401581408670e-4, .36899182659531622704e-5,
};

template <std::floating_point Scalar>
Scalar lanczos_sum(Scalar x) {
    Scalar sum = 0;
    for (int i = static_cast<int>(kLanczos.size()) - 1; i > 0; --i) {
        sum += static_cast<Scalar>(kLanczos[i]) / (x + static_cast<Scalar>(i));
    }
    return sum + static_cast<Scalar>(kLanczos[0]);
}

// Below this the recurrences shift the argument up before the asymptotic series.
inline constexpr double kAsymptoticThreshold = 10.0;

} // namespace detail

/// Natural log of the Gamma function for x > 0.
template <std::floating_point Scalar>
Scalar log_gamma(Scalar x) {
    if (!(x > 0)) {
        throw DomainError("log_gamma requires a strictly positive argument");
    }
    if (x < Scalar(0.5)) {
        return log_gamma(x + 1) - std::log(x);
    }
    const Scalar tmp = x + static_cast<Scalar>(detail::kLanczosG) + Scalar(0.5);
    const Scalar half_log_2pi = Scalar(0.5) * std::log(2 * std::numbers::pi_v<Scalar>);
    return (x + Scalar(0.5)) * std::log(tmp) - tmp + half_log_2pi +
           std::log(detail::lanczos_sum(x) / x);
}

/// Derivative of log_gamma. Recurrence psi(x) = psi(x+1) - 1/x brings the
/// argument above 6, then the Bernoulli asymptotic series to x^-14.
template <std::floating_point Scalar>
Scalar digamma(Scalar x) {
    if (!(x > 0)) {
        throw DomainError("digamma requires a strictly positive argument");
    }
    Scalar shift = 0;
    while (x < static_cast<Scalar>(detail::kAsymptoticThreshold)) {
        shift -= 1 / x;
        x += 1;
    }
    const Scalar inv = 1 / x;
    const Scalar inv2 = inv * inv;
    // B_2k / (2k) for k = 1..7
    const Scalar series =
        inv2 * (Scalar(1) / 12 -
                inv2 * (Scalar(1) / 120 -
                        inv2 * (Scalar(1) / 252 -
                                inv2 * (Scalar(1) / 240 -
                                        inv2 * (Scalar(1) / 132 -
                                                inv2 * (Scalar(691) / 32760 -
                                                        inv2 * (Scalar(1) / 12)))))));
    return shift + std::log(x) - Scalar(0.5) * inv - series;
}

/// Second derivative of log_gamma; backs the gradient of `digamma` on the tape.
template <std::floating_point Scalar>
Scalar trigamma(Scalar x) {
    if (!(x > 0)) {
        throw DomainError("trigamma requires a strictly positive argument");
    }
    Scalar shift = 0;
    while (x < static_cast<Scalar>(detail::kAsymptoticThreshold)) {
        shift += 1 / (x * x);
        x += 1;
    }
    const Scalar inv = 1 / x;
    const Scalar inv2 = inv * inv;
    const Scalar series =
        inv * (1 + inv * (Scalar(0.5) +
                          inv * (Scalar(1) / 6 -
                                 inv2 * (Scalar(1) / 30 -
                                         inv2 * (Scalar(1) / 42 -
                                                 inv2 * (Scalar(1) / 30 -
                                                         inv2 * (Scalar(5) / 66 -
                                                                 inv2 * (Scalar(691) / 2730 -
                                                                         inv2 * (Scalar(7) / 6)))))))));
    return shift + series;
}

} // namespace gel::special

#pragma once

#include <cmath>
#include <stdexcept>

#include "sdppp/special_functions.hpp"

namespace sdppp::rem {

// Closed-form analytics of the Poisson REM partition function Z(beta),
// beta > 1. Everything here is an oracle for the Monte-Carlo side.

// E[e^{-t Z(beta)}] = exp(-Gamma((beta-1)/beta) t^{1/beta})
inline double laplace_Z(double beta, double t) {
    if (!(beta > 1.0)) throw std::domain_error("laplace_Z: beta must be > 1");
    if (t < 0.0) throw std::domain_error("laplace_Z: t must be >= 0");
    if (t == 0.0) return 1.0;
    const double g = std::exp(log_gamma((beta - 1.0) / beta).value);
    return std::exp(-g * std::pow(t, 1.0 / beta));
}

// E[Z(beta)^{-alpha}] = Gamma(alpha beta + 1) / (Gamma(alpha+1) Gamma((beta-1)/beta)^{alpha beta})
inline double neg_moment(double beta, double alpha) {
    if (!(beta > 1.0)) throw std::domain_error("neg_moment: beta must be > 1");
    if (!(alpha > -1.0 / beta)) throw std::domain_error("neg_moment: need alpha > -1/beta");
    const double u = (beta - 1.0) / beta;
    const double lg = log_gamma(alpha * beta + 1.0).value - log_gamma(alpha + 1.0).value -
                      alpha * beta * log_gamma(u).value;
    return std::exp(lg);
}

inline double mean_log_Z(double beta) {
    if (!(beta > 1.0)) throw std::domain_error("mean_log_Z: beta must be > 1");
    return kEulerGamma * (beta - 1.0) + beta * log_gamma(1.0 - 1.0 / beta).value;
}

inline double var_log_Z(double beta) {
    if (!(beta > 1.0)) throw std::domain_error("var_log_Z: beta must be > 1");
    return kPi * kPi / 6.0 * (beta * beta - 1.0);
}

inline double mean_ratio(double beta) {  // E[Z'/Z]
    if (!(beta > 1.0)) throw std::domain_error("mean_ratio: beta must be > 1");
    const double u = (beta - 1.0) / beta;
    return log_gamma(u).value + digamma(u).value / beta + kEulerGamma;
}

inline double var_ratio(double beta) {  // Var(Z'/Z)
    if (!(beta > 1.0)) throw std::domain_error("var_ratio: beta must be > 1");
    const double u = (beta - 1.0) / beta;
    return kPi * kPi / 6.0 + (beta - 1.0) / (beta * beta * beta) * trigamma(u).value;
}

inline double cov_logZ_ratio(double beta) {  // Cov(log Z, Z'/Z) = (1/2) d/dbeta Var(log Z)
    if (!(beta > 1.0)) throw std::domain_error("cov_logZ_ratio: beta must be > 1");
    return kPi * kPi / 6.0 * beta;
}

// Temperature susceptibility kappa(beta), explicit form.
inline double kappa(double beta) {
    if (!(beta > 1.0)) throw std::domain_error("kappa: beta must be > 1");
    const double u = (beta - 1.0) / beta;
    const double b2 = beta * beta;
    const double psi1 = trigamma(u).value;
    return 0.5 * (1.0 / (b2 - 1.0) +
                  6.0 / (kPi * kPi * b2 * beta * (beta + 1.0)) * psi1 -
                  b2 / ((b2 - 1.0) * (b2 - 1.0)));
}

// Same quantity assembled from the variance representation
// kappa = (Var(Z'/Z)/Var(log Z) - (Cov/Var)^2) / 2; identity bridge for tests.
inline double kappa_variance_form(double beta) {
    const double vl = var_log_Z(beta);
    const double vr = var_ratio(beta);
    const double cv = cov_logZ_ratio(beta);
    return 0.5 * (vr / vl - (cv / vl) * (cv / vl));
}

// kappa(beta) ~ kappa_near_critical_constant / (beta-1)^2 as beta -> 1
inline constexpr double kappa_near_critical_constant() {
    return 3.0 / (2.0 * kPi * kPi) - 0.125;
}

// kappa(beta) ~ kappa_low_temperature_constant / beta^5 as beta -> inf
inline double kappa_low_temperature_constant() {
    const double zeta3 = 1.20205690315959428539973816151;
    return 6.0 * zeta3 / (kPi * kPi) - 0.5;
}

enum class MomentVariant { plain, over_beta, log_weighted };

// Exact small-moment expectations used to test the near-critical expansion
// rates: (a1) E[Z^{-alpha}], (a2) E[Z^{-alpha/beta}],
// (a5) E[Z^{-1/beta} log Z^{1/beta}] via the analytic alpha-derivative.
inline double near_critical_moment(double beta, double alpha, MomentVariant variant) {
    switch (variant) {
        case MomentVariant::plain:
            return neg_moment(beta, alpha);
        case MomentVariant::over_beta:
            return neg_moment(beta, alpha / beta);
        case MomentVariant::log_weighted: {
            // E[Z^{-a} log Z] = -neg_moment * d/da log neg_moment, at a = 1/beta
            const double u = (beta - 1.0) / beta;
            const double a = 1.0 / beta;
            const double dlog = beta * digamma(a * beta + 1.0).value -
                                digamma(a + 1.0).value - beta * log_gamma(u).value;
            return -neg_moment(beta, a) * dlog / beta;
        }
    }
    throw std::logic_error("near_critical_moment: unreachable");
}

}  // namespace sdppp::rem

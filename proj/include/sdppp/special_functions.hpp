#pragma once

#include <cmath>
#include <stdexcept>

namespace sdppp {

inline constexpr double kEulerGamma = 0.57721566490153286060651209008240243;
inline constexpr double kPi = 3.14159265358979323846264338327950288;

// value + an estimate of the method's truncation error (final-rounding ulp of
// the result is not included; it dominates only for trigamma at x ~ 1e-3
// where the value itself is ~1e6).
struct SpecialFnResult {
    double value = 0.0;
    double abs_err_estimate = 0.0;
};

namespace detail {

// Stirling-series tail coefficients B_{2n}/(2n(2n-1)) for log Gamma.
inline constexpr double kLgammaCoef[] = {
    1.0 / 12.0,      -1.0 / 360.0,     1.0 / 1260.0,   -1.0 / 1680.0,
    1.0 / 1188.0,    -691.0 / 360360.0, 1.0 / 156.0,   -3617.0 / 122400.0,
};

// Bernoulli numbers B_2, B_4, ...
inline constexpr double kBernoulli[] = {
    1.0 / 6.0,   -1.0 / 30.0,   1.0 / 42.0,   -1.0 / 30.0,
    5.0 / 66.0,  -691.0 / 2730.0, 7.0 / 6.0,  -3617.0 / 510.0,
};

inline constexpr double kShiftTo = 10.0;

}  // namespace detail

inline SpecialFnResult log_gamma(double x) {
    if (!(x > 0.0)) throw std::domain_error("log_gamma: x must be > 0");
    // shift up with log Gamma(x+1) = log Gamma(x) + log x
    double shift = 0.0;
    double z = x;
    while (z < detail::kShiftTo) {
        shift -= std::log(z);
        z += 1.0;
    }
    const double lz = std::log(z);
    double series = 0.0;
    double zpow = z;
    const double z2 = z * z;
    for (double c : detail::kLgammaCoef) {
        series += c / zpow;
        zpow *= z2;
    }
    const double val = (z - 0.5) * lz - z + 0.5 * std::log(2.0 * kPi) + series + shift;
    // first omitted term bounds the asymptotic tail
    const double trunc = std::abs(43867.0 / 244188.0 / zpow);
    return {val, trunc + 1e-15 * std::abs(val)};
}

inline SpecialFnResult digamma(double x) {
    if (!(x > 0.0)) throw std::domain_error("digamma: x must be > 0");
    double shift = 0.0;
    double z = x;
    while (z < detail::kShiftTo) {
        shift -= 1.0 / z;
        z += 1.0;
    }
    double series = std::log(z) - 0.5 / z;
    const double z2 = z * z;
    double zpow = z2;
    for (int n = 0; n < 8; ++n) {
        series -= detail::kBernoulli[n] / (2.0 * (n + 1.0) * zpow);
        zpow *= z2;
    }
    const double trunc = std::abs(detail::kBernoulli[7] / (16.0 * zpow));
    return {series + shift, trunc + 1e-15 * (std::abs(series) + std::abs(shift))};
}

inline SpecialFnResult trigamma(double x) {
    if (!(x > 0.0)) throw std::domain_error("trigamma: x must be > 0");
    double shift = 0.0;
    double z = x;
    while (z < detail::kShiftTo) {
        shift += 1.0 / (z * z);
        z += 1.0;
    }
    const double z2 = z * z;
    double series = 1.0 / z + 0.5 / z2;
    double zpow = z * z2;
    for (int n = 0; n < 8; ++n) {
        series += detail::kBernoulli[n] / zpow;
        zpow *= z2;
    }
    const double trunc = std::abs(detail::kBernoulli[7] / zpow);
    return {series + shift, trunc + 1e-15 * (std::abs(series) + std::abs(shift))};
}

// Regularized lower incomplete gamma P(a, x); series for x < a+1, Lentz
// continued fraction otherwise.
inline double gamma_p(double a, double x) {
    if (!(a > 0.0) || x < 0.0) throw std::domain_error("gamma_p: need a > 0, x >= 0");
    if (x == 0.0) return 0.0;
    const double lga = log_gamma(a).value;
    const double lpre = a * std::log(x) - x - lga;
    if (x < a + 1.0) {
        double term = 1.0 / a;
        double sum = term;
        double ap = a;
        for (int i = 0; i < 500; ++i) {
            ap += 1.0;
            term *= x / ap;
            sum += term;
            if (std::abs(term) < std::abs(sum) * 1e-16) break;
        }
        return std::exp(lpre) * sum;
    }
    // continued fraction for Q(a,x)
    const double tiny = 1e-300;
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i < 500; ++i) {
        const double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double delta = d * c;
        h *= delta;
        if (std::abs(delta - 1.0) < 1e-16) break;
    }
    return 1.0 - std::exp(lpre) * h;
}

inline double gamma_q(double a, double x) { return 1.0 - gamma_p(a, x); }

// int_lo^hi u^{q-1} e^{-s u} du, s > 0  (workhorse for decoration layers)
inline double gamma_tail_integral(double q, double s, double lo, double hi) {
    if (!(s > 0.0) || !(q > 0.0)) throw std::domain_error("gamma_tail_integral: need q, s > 0");
    if (hi <= lo) return 0.0;
    const double scale = std::exp(log_gamma(q).value - q * std::log(s));
    return scale * (gamma_p(q, s * hi) - gamma_p(q, s * lo));
}

}  // namespace sdppp

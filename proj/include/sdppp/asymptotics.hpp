#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "sdppp/quadrature.hpp"
#include "sdppp/special_functions.hpp"

namespace sdppp::asymptotics {

// Machinery for I_k(g, eps) = int_0^inf x^k exp(x^g - eps x) dx, g in (0,1).
// The peak sits at x0 = (g/eps)^{1/(1-g)} with Gaussian width
// sigma^2 = x0^{2-g}/(g(1-g)); exp(h(x0)) overflows doubles long before the
// parameter ranges of interest end, so everything is carried in log space.

struct ExpansionResult {
    double log_leading = 0.0;      // log of the Gaussian leading factor
    double correction_coeff = 0.0; // c_k
    double log_predicted = 0.0;    // log(leading * (1 + c_k eps^{g/(1-g)}))
    int k = 0;
    double gamma_exponent = 0.0;
    double epsilon = 0.0;
    double x0 = 0.0;
    double sigma2 = 0.0;
};

inline double peak_location(double g, double eps) {
    return std::pow(g / eps, 1.0 / (1.0 - g));
}

inline double peak_sigma2(double g, double eps) {
    return std::pow(g, 1.0 / (1.0 - g)) / (1.0 - g) *
           std::pow(eps, -(2.0 - g) / (1.0 - g));
}

// c_k assembled from the quartic Taylor expansion of h at the peak and the
// Gaussian moments, including the cubic-squared cross term:
//   c_k = [k(k-1)/2 + k(2-g)/2 + (2-g)(1-2g)/24] * g^{-1/(1-g)} / (1-g).
// The printed anchor c_2 + c_0 - 2 c_1 = g^{-1/(1-g)}/(1-g) holds exactly.
inline double correction_coefficient(int k, double g) {
    const double kk = static_cast<double>(k);
    const double core = 0.5 * kk * (kk - 1.0) + 0.5 * kk * (2.0 - g) +
                        (2.0 - g) * (1.0 - 2.0 * g) / 24.0;
    return core * std::pow(g, -1.0 / (1.0 - g)) / (1.0 - g);
}

inline ExpansionResult laplace_expansion(int k, double g, double eps) {
    if (k < 0 || k > 2) throw std::domain_error("laplace_expansion: k must be 0, 1 or 2");
    if (!(g > 0.0) || !(g < 1.0)) throw std::domain_error("laplace_expansion: gamma in (0,1)");
    if (!(eps > 0.0)) throw std::domain_error("laplace_expansion: epsilon > 0");
    const double x0 = peak_location(g, eps);
    if (x0 < 10.0) throw std::domain_error("laplace_expansion: outside the expansion regime (x0 < 10)");
    ExpansionResult r;
    r.k = k;
    r.gamma_exponent = g;
    r.epsilon = eps;
    r.x0 = x0;
    r.sigma2 = peak_sigma2(g, eps);
    const double om = 1.0 - g;
    r.log_leading = 0.5 * std::log(2.0 * kPi / om) + std::log(g) / (2.0 * om) -
                    (2.0 - g) / (2.0 * om) * std::log(eps) +
                    om * std::pow(g / eps, g / om) +
                    static_cast<double>(k) / om * (std::log(g) - std::log(eps));
    r.correction_coeff = correction_coefficient(k, g);
    r.log_predicted =
        r.log_leading + std::log1p(r.correction_coeff * std::pow(eps, g / om));
    return r;
}

namespace detail {

// h(x0 + sigma y) - h(x0) without cancellation; u = sigma y / x0
inline double peak_shift_exponent(double x0g, double g, double u) {
    return x0g * (std::expm1(g * std::log1p(u)) - g * u);
}

template <class F>
double integrate_peak(const F& f_of_y, double y_min) {
    std::vector<double> knots;
    for (double y : {y_min, -10.0, -3.0, -1.0, 0.0, 1.0, 3.0, 10.0, 40.0})
        if (y >= y_min && (knots.empty() || y > knots.back())) knots.push_back(y);
    auto body = integrate_knots(f_of_y, knots, 1e-13);
    auto tail = integrate_semi_infinite(f_of_y, knots.back(), 1e-13);
    return body.value + tail.value;
}

}  // namespace detail

// log I_k by direct quadrature in peak coordinates; the oracle the expansion
// is tested against.
inline double log_integral_xk(int k, double g, double eps) {
    if (!(g > 0.0) || !(g < 1.0) || !(eps > 0.0))
        throw std::domain_error("log_integral_xk: need g in (0,1), eps > 0");
    const double x0 = peak_location(g, eps);
    const double sigma = std::sqrt(peak_sigma2(g, eps));
    const double x0g = std::pow(x0, g);
    const double ratio = sigma / x0;
    auto f = [&](double y) {
        const double u = ratio * y;
        if (u <= -1.0) return 0.0;
        const double ex = detail::peak_shift_exponent(x0g, g, u) +
                          static_cast<double>(k) * std::log1p(u);
        return std::exp(ex);
    };
    const double j = detail::integrate_peak(f, -1.0 / ratio * (1.0 - 1e-14));
    return (1.0 - g) * x0g + static_cast<double>(k) * std::log(x0) + std::log(sigma) +
           std::log(j);
}

// Spec'd general-purpose improper integral with a relative tolerance target.
template <class F>
IntegralValue integrate_improper(const F& f, double tol) {
    const std::vector<double> knots{0.0, 1.0, 8.0, 64.0};
    auto body = integrate_knots(f, knots, 1e-9);
    auto tail = integrate_semi_infinite(f, 64.0, 1e-9);
    IntegralValue rough{body.value + tail.value, body.abs_err + tail.abs_err};
    const double target = tol * std::max(std::abs(rough.value), 1e-300);
    if (rough.abs_err <= target) return rough;
    body = integrate_knots(f, knots, 0.5 * target);
    tail = integrate_semi_infinite(f, 64.0, 0.5 * target);
    IntegralValue fine{body.value + tail.value, body.abs_err + tail.abs_err};
    if (fine.abs_err > tol * std::max(std::abs(fine.value), 1e-300))
        throw std::runtime_error("integrate_improper: tolerance not reached");
    return fine;
}

// ---------------------------------------------------------------------------
// Log-moment integrals:
//   ratio_k = int log^k(1 + e^{(2b/(2-b)) x^g - eps b x}) e^{x^g - eps x} dx / I_0
// with prediction ((2b/(2-b) - b g) (g/eps)^{g/(1-g)})^k.
// ---------------------------------------------------------------------------

inline double log_moment_prediction(int k, double g, double eps, double beta) {
    if (!(beta > 1.0) || !(beta < 2.0))
        throw std::domain_error("log_moment_prediction: beta in (1,2)");
    const double amp = 2.0 * beta / (2.0 - beta) - beta * g;
    return std::pow(amp * std::pow(g / eps, g / (1.0 - g)), k);
}

inline double log_moment_quadrature_ratio(int k, double g, double eps, double beta) {
    if (k < 0 || k > 2) throw std::domain_error("log_moment_quadrature_ratio: k in {0,1,2}");
    const double x0 = peak_location(g, eps);
    if (x0 < 10.0) throw std::domain_error("log_moment_quadrature_ratio: x0 < 10");
    const double sigma = std::sqrt(peak_sigma2(g, eps));
    const double x0g = std::pow(x0, g);
    const double ratio = sigma / x0;
    const double A = 2.0 * beta / (2.0 - beta);
    auto weight = [&](double y) {
        const double u = ratio * y;
        if (u <= -1.0) return 0.0;
        return std::exp(detail::peak_shift_exponent(x0g, g, u));
    };
    auto logterm = [&](double y) {
        const double u = ratio * y;
        const double x = x0 * (1.0 + u);
        const double t = A * std::pow(x, g) - eps * beta * x;
        return t > 0.0 ? t + std::log1p(std::exp(-t)) : std::log1p(std::exp(t));
    };
    const double ymin = -1.0 / ratio * (1.0 - 1e-14);
    const double den = detail::integrate_peak(weight, ymin);
    auto num_f = [&](double y) {
        const double w = weight(y);
        if (w == 0.0) return 0.0;
        // scale log^k by x0^{-gk} to keep the integrand O(1)
        const double l = logterm(y) / x0g;
        return w * std::pow(l, k);
    };
    const double num = detail::integrate_peak(num_f, ymin);
    const double raw_ratio = num / den * std::pow(x0g, k);
    return raw_ratio / log_moment_prediction(k, g, eps, beta);
}

}  // namespace sdppp::asymptotics

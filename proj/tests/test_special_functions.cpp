#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "sdppp/quadrature.hpp"
#include "sdppp/rng.hpp"
#include "sdppp/special_functions.hpp"

using namespace sdppp;

namespace {

// Basel-type series oracle with Euler-Maclaurin tail: sum_{n>=0} 1/(n+x)^2
double trigamma_series(double x) {
    const int N = 200000;
    double s = 0.0;
    for (int n = N - 1; n >= 0; --n) s += 1.0 / ((n + x) * (n + x));
    const double z = N + x;
    return s + 1.0 / z + 0.5 / (z * z) + 1.0 / (6.0 * z * z * z);
}

// gamma = lim H_N - log N, Euler-Maclaurin corrected
double euler_gamma_series() {
    const int N = 1000000;
    double h = 0.0;
    for (int n = N; n >= 1; --n) h += 1.0 / n;
    return h - std::log(static_cast<double>(N)) - 0.5 / N + 1.0 / (12.0 * static_cast<double>(N) * N);
}

}  // namespace

TEST_CASE("log_gamma at pinned points", "[special_functions]") {
    CHECK(std::abs(log_gamma(1.0).value) < 1e-12);
    CHECK(log_gamma(0.5).value == Catch::Approx(0.5 * std::log(kPi)).epsilon(1e-12));
    CHECK(log_gamma(5.0).value == Catch::Approx(std::log(24.0)).epsilon(1e-12));
    CHECK_THROWS_AS(log_gamma(0.0), std::domain_error);
    CHECK_THROWS_AS(log_gamma(-1.5), std::domain_error);
}

TEST_CASE("digamma and trigamma against series oracles", "[special_functions]") {
    CHECK(digamma(1.0).value == Catch::Approx(-euler_gamma_series()).margin(1e-11));
    CHECK(trigamma(1.0).value == Catch::Approx(trigamma_series(1.0)).margin(1e-11));
    CHECK(trigamma(1.0).value == Catch::Approx(kPi * kPi / 6.0).margin(1e-12));
    CHECK(trigamma(0.5).value == Catch::Approx(kPi * kPi / 2.0).margin(1e-10));
    CHECK(trigamma(0.5).value == Catch::Approx(trigamma_series(0.5)).margin(1e-10));
    CHECK_THROWS_AS(digamma(-0.1), std::domain_error);
    CHECK_THROWS_AS(trigamma(0.0), std::domain_error);
}

TEST_CASE("error estimates are honest on the working domain", "[special_functions]") {
    for (double x : {1e-3, 0.01, 0.3, 1.0, 7.7, 25.0, 49.9}) {
        CHECK(trigamma(x).abs_err_estimate <= 1e-10);
        CHECK(digamma(x).abs_err_estimate <= 1e-10);
        CHECK(log_gamma(x).abs_err_estimate <= 1e-10 * std::max(1.0, std::abs(log_gamma(x).value)));
    }
}

TEST_CASE("recurrence exactness over random arguments", "[special_functions]") {
    Rng rng(99);
    for (int i = 0; i < 10000; ++i) {
        const double x = std::exp(std::log(1e-3) + rng.u01() * std::log(50.0 / 1e-3));
        const auto d0 = digamma(x);
        const auto d1 = digamma(x + 1.0);
        const double dtol = 2.0 * (d0.abs_err_estimate + d1.abs_err_estimate) +
                            8e-16 * (std::abs(d0.value) + std::abs(d1.value));
        REQUIRE(std::abs(d1.value - d0.value - 1.0 / x) <= dtol + 1e-12 / x);
        const auto t0 = trigamma(x);
        const auto t1 = trigamma(x + 1.0);
        const double ttol = 2.0 * (t0.abs_err_estimate + t1.abs_err_estimate) +
                            8e-16 * (std::abs(t0.value) + std::abs(t1.value));
        REQUIRE(std::abs(t1.value - t0.value + 1.0 / (x * x)) <= ttol + 1e-12 / (x * x));
    }
}

TEST_CASE("regularized incomplete gamma", "[special_functions]") {
    CHECK(gamma_p(1.0, 2.0) == Catch::Approx(1.0 - std::exp(-2.0)).epsilon(1e-12));
    CHECK(gamma_p(0.5, 1.0) == Catch::Approx(std::erf(1.0)).epsilon(1e-12));
    CHECK(gamma_p(3.0, 0.0) == 0.0);
    CHECK(gamma_q(2.0, 30.0) == Catch::Approx(31.0 * std::exp(-30.0)).epsilon(1e-9));
    // gamma_tail_integral vs direct quadrature
    for (double q : {0.7, 2.0, 4.5}) {
        for (double s : {0.3, 1.0}) {
            auto f = [&](double u) { return std::pow(u, q - 1.0) * std::exp(-s * u); };
            const double direct = integrate_adaptive(f, 0.5, 6.0, 1e-12).value;
            CHECK(gamma_tail_integral(q, s, 0.5, 6.0) == Catch::Approx(direct).epsilon(1e-9));
        }
    }
}

#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "sdppp/point_process.hpp"
#include "sdppp/rem_exact.hpp"
#include "sdppp/rng.hpp"
#include "sdppp/stats.hpp"

using namespace sdppp;

TEST_CASE("Laplace transform closed form", "[rem_exact]") {
    CHECK(rem::laplace_Z(1.7, 0.0) == 1.0);
    CHECK(rem::laplace_Z(2.0, 1.0) == Catch::Approx(std::exp(-std::sqrt(kPi))).epsilon(1e-12));
    CHECK(rem::laplace_Z(2.0, 4.0) ==
          Catch::Approx(std::exp(-2.0 * std::sqrt(kPi))).epsilon(1e-12));
    CHECK_THROWS_AS(rem::laplace_Z(0.9, 1.0), std::domain_error);
}

TEST_CASE("negative moments", "[rem_exact]") {
    CHECK(rem::neg_moment(1.4, 0.0) == Catch::Approx(1.0).epsilon(1e-14));
    CHECK(rem::neg_moment(2.0, 1.0) == Catch::Approx(2.0 / kPi).epsilon(1e-10));
    CHECK_THROWS_AS(rem::neg_moment(2.0, -0.6), std::domain_error);

    // Monte-Carlo oracle for E[1/Z(2)]
    OnlineStats inv;
    for (int seed = 0; seed < 20000; ++seed) {
        const auto p = sample_ppp(400, derive_seed(101, seed));
        inv.add(1.0 / partition_compensated(p, 2.0));
    }
    CHECK(std::abs(inv.mean - 2.0 / kPi) < 3.0 * inv.stderror());
}

TEST_CASE("mean and variance of log Z", "[rem_exact]") {
    CHECK(rem::mean_log_Z(2.0) ==
          Catch::Approx(kEulerGamma + std::log(kPi)).epsilon(1e-13));
    CHECK(rem::var_log_Z(2.0) == Catch::Approx(kPi * kPi / 2.0).epsilon(1e-14));
    CHECK(rem::var_log_Z(1.0 + 1e-6) < 1e-5);
}

TEST_CASE("ratio moments and covariance", "[rem_exact]") {
    CHECK(rem::var_ratio(2.0) ==
          Catch::Approx(kPi * kPi / 6.0 + kPi * kPi / 16.0).epsilon(1e-12));
    CHECK(rem::cov_logZ_ratio(2.0) == Catch::Approx(kPi * kPi / 3.0).epsilon(1e-14));

    // MC covariance of (log Z, Z'/Z) at beta = 2 within 5 percent
    OnlineStats a, b, ab;
    for (int seed = 0; seed < 100000; ++seed) {
        const auto p = sample_ppp(400, derive_seed(103, seed));
        const auto [z, zp] = partition_pair_compensated(p, 2.0);
        const double lz = std::log(z);
        const double r = zp / z;
        a.add(lz);
        b.add(r);
        ab.add(lz * r);
    }
    const double cov = ab.mean - a.mean * b.mean;
    CHECK(std::abs(cov / rem::cov_logZ_ratio(2.0) - 1.0) < 0.05);
    // and the exact mean of Z'/Z while the samples are here
    CHECK(std::abs(b.mean - rem::mean_ratio(2.0)) < 4.0 * b.stderror());
}

TEST_CASE("susceptibility closed form and asymptotics", "[rem_exact]") {
    CHECK(rem::kappa(2.0) == Catch::Approx(1.0 / 144.0).epsilon(1e-10));
    CHECK(rem::kappa(1.001) * 1e-6 ==
          Catch::Approx(rem::kappa_near_critical_constant()).epsilon(0.01));
    CHECK(rem::kappa(200.0) * std::pow(200.0, 5) ==
          Catch::Approx(rem::kappa_low_temperature_constant()).epsilon(0.02));
}

TEST_CASE("identity bridge between the two kappa forms", "[rem_exact]") {
    Rng rng(999);
    for (int i = 0; i < 20; ++i) {
        const double beta = 1.05 + 3.95 * rng.u01();
        const double k1 = rem::kappa(beta);
        const double k2 = rem::kappa_variance_form(beta);
        REQUIRE(std::abs(k1 - k2) <= 1e-10 * std::abs(k1));
    }
}

TEST_CASE("derivative consistency of the closed forms", "[rem_exact]") {
    const double h = 1e-5;
    for (double beta : {1.2, 1.7, 2.5, 4.0}) {
        const double dvar = (rem::var_log_Z(beta + h) - rem::var_log_Z(beta - h)) / (2.0 * h);
        REQUIRE(std::abs(dvar - 2.0 * rem::cov_logZ_ratio(beta)) <=
                1e-6 * std::abs(dvar));
        // -d/dalpha E[Z^-alpha] at 0 equals E[log Z]
        const double dm = -(rem::neg_moment(beta, h) - rem::neg_moment(beta, -h)) / (2.0 * h);
        REQUIRE(std::abs(dm - rem::mean_log_Z(beta)) <=
                1e-6 * std::max(1.0, std::abs(dm)));
    }
}

TEST_CASE("near-critical moment expansion rates", "[rem_exact]") {
    const double beta = 1.01;
    const double a1 = rem::near_critical_moment(beta, 1.0, rem::MomentVariant::plain);
    CHECK(std::abs(a1 / (beta - 1.0) - 1.0) < 0.05);
    const double a2 = rem::near_critical_moment(beta, 1.0, rem::MomentVariant::over_beta);
    CHECK(std::abs(a2 / (beta - 1.0) - 1.0) < 0.02);
    const double a5 = rem::near_critical_moment(beta, 0.0, rem::MomentVariant::log_weighted);
    const double main = (beta - 1.0) * std::log(1.0 / (beta - 1.0));
    CHECK(a5 / main > 0.75);
    CHECK(a5 / main < 1.25);

    // the analytic a5 derivative against a finite difference of Lemma 2.3
    const double eps = 1e-6;
    const double b2 = 1.3;
    const double fd = -(rem::neg_moment(b2, 1.0 / b2 + eps) -
                        rem::neg_moment(b2, 1.0 / b2 - eps)) /
                      (2.0 * eps) / b2;
    CHECK(rem::near_critical_moment(b2, 0.0, rem::MomentVariant::log_weighted) ==
          Catch::Approx(fd).epsilon(1e-6));
}

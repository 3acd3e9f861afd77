#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

#include "sdppp/point_process.hpp"
#include "sdppp/rem_exact.hpp"
#include "sdppp/rng.hpp"
#include "sdppp/stats.hpp"

using namespace sdppp;

namespace {

// one-sample KS against a cdf
double ks_one_sample_p(std::vector<double> xs, double (*cdf)(double)) {
    std::sort(xs.begin(), xs.end());
    const double n = static_cast<double>(xs.size());
    double d = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double f = cdf(xs[i]);
        d = std::max(d, std::abs(f - static_cast<double>(i) / n));
        d = std::max(d, std::abs(static_cast<double>(i + 1) / n - f));
    }
    const double en = std::sqrt(n);
    const double lambda = (en + 0.12 + 0.11 / en) * d;
    double p = 0.0, sign = 1.0;
    for (int k = 1; k <= 100; ++k) {
        p += 2.0 * sign * std::exp(-2.0 * k * k * lambda * lambda);
        sign = -sign;
    }
    return std::min(1.0, std::max(0.0, p));
}

double exp1_cdf(double x) { return x > 0.0 ? -std::expm1(-x) : 0.0; }

}  // namespace

TEST_CASE("sampling is reproducible and exponential-spaced", "[point_process]") {
    const auto p1 = sample_ppp(64, 2024);
    const auto p2 = sample_ppp(64, 2024);
    REQUIRE(p1.eta == p2.eta);  // bitwise determinism contract
    for (std::size_t i = 1; i < p1.eta.size(); ++i) REQUIRE(p1.eta[i] > p1.eta[i - 1]);

    // eta_1 has mean 1; spacing eta_2 - eta_1 ~ Exp(1), uncorrelated with eta_1
    OnlineStats m1;
    OnlineStats prod, s1, s2;
    std::vector<double> spacings;
    for (int seed = 0; seed < 100000; ++seed) {
        const auto p = sample_ppp(2, derive_seed(5, seed));
        m1.add(p.eta[0]);
        const double gap = p.eta[1] - p.eta[0];
        prod.add(p.eta[0] * gap);
        s1.add(p.eta[0]);
        s2.add(gap);
        if (seed < 20000) spacings.push_back(gap);
    }
    CHECK(std::abs(m1.mean - 1.0) < 3.0 * m1.stderror());
    const double corr = (prod.mean - s1.mean * s2.mean) / (s1.stddev() * s2.stddev());
    CHECK(std::abs(corr) < 3.0 / std::sqrt(100000.0));
    CHECK(ks_one_sample_p(spacings, exp1_cdf) > 0.005);
}

TEST_CASE("partition function on explicit atoms", "[point_process]") {
    const auto p = GumbelPPP::from_atoms({1.0, 2.0});
    const auto v = partition_function(p, 2.0);
    CHECK(v.value == Catch::Approx(1.25).epsilon(1e-15));
    CHECK(v.tail_bound == Catch::Approx(0.5).epsilon(1e-15));  // 2^{-1}/(2-1)
    const auto single = partition_function(GumbelPPP::from_atoms({1.0}), 3.7);
    CHECK(single.value == Catch::Approx(1.0).epsilon(1e-15));
    CHECK_THROWS_AS(partition_function(p, 1.0), std::domain_error);
    CHECK_THROWS_AS(partition_function(GumbelPPP::from_atoms({1e-300}), 3.0),
                    std::range_error);
}

TEST_CASE("ratio statistics on explicit atoms", "[point_process]") {
    // xi = [0] -> Z = 1, Z'/Z = 0, log Z = 0
    const auto r1 = ratio_statistics(GumbelPPP::from_atoms({1.0}), 2.0);
    CHECK(r1.z == Catch::Approx(1.0).epsilon(1e-15));
    CHECK(std::abs(r1.zprime_over_z) < 1e-15);
    CHECK(std::abs(r1.log_z) < 1e-15);
    // xi = [0, -log 2], beta = 2 -> Z = 1.25, Z'/Z = -log(2)/5
    const auto r2 = ratio_statistics(GumbelPPP::from_atoms({1.0, 2.0}), 2.0);
    CHECK(r2.z == Catch::Approx(1.25).epsilon(1e-15));
    CHECK(r2.zprime_over_z == Catch::Approx(-std::log(2.0) / 5.0).epsilon(1e-14));
}

TEST_CASE("monotonicity in beta when eta_1 >= 1", "[point_process]") {
    int found = 0;
    for (int seed = 0; found < 200 && seed < 5000; ++seed) {
        const auto p = sample_ppp(200, derive_seed(17, seed));
        if (p.eta.front() < 1.0) continue;
        ++found;
        const double a = partition_function(p, 1.3).value;
        const double b = partition_function(p, 2.1).value;
        const double c = partition_function(p, 3.4).value;
        REQUIRE(b <= a);
        REQUIRE(c <= b);
    }
    REQUIRE(found == 200);
}

TEST_CASE("tail compensation is unbiased", "[point_process]") {
    // compensated value at N=100 should match the compensated value of the
    // same stream extended to N=4000, up to zero-mean noise
    OnlineStats diff;
    for (int seed = 0; seed < 400; ++seed) {
        const auto full = sample_ppp(4000, derive_seed(23, seed));
        GumbelPPP head;
        head.eta.assign(full.eta.begin(), full.eta.begin() + 100);
        diff.add(partition_compensated(head, 1.5) - partition_compensated(full, 1.5));
    }
    CHECK(std::abs(diff.mean) < 3.0 * diff.stderror());
}

TEST_CASE("Laplace transform of Z(2) against the closed form", "[point_process]") {
    // choose n so that tail_bound is negligible, compensate the remainder
    OnlineStats lap;
    for (int seed = 0; seed < 20000; ++seed) {
        const auto p = sample_ppp(500, derive_seed(29, seed));
        lap.add(std::exp(-partition_compensated(p, 2.0)));
    }
    const double target = rem::laplace_Z(2.0, 1.0);  // exp(-sqrt(pi)) ~ 0.16942
    CHECK(target == Catch::Approx(std::exp(-std::sqrt(kPi))).epsilon(1e-12));
    CHECK(std::abs(lap.mean - target) < 3.0 * lap.stderror());
}

TEST_CASE("Var(log Z(2)) matches pi^2/2 within 5 percent", "[point_process]") {
    OnlineStats logz;
    for (int seed = 0; seed < 100000; ++seed) {
        const auto p = sample_ppp(400, derive_seed(31, seed));
        logz.add(std::log(partition_compensated(p, 2.0)));
    }
    CHECK(std::abs(logz.variance() / rem::var_log_Z(2.0) - 1.0) < 0.05);
}

TEST_CASE("Palm formula brute force on the unit interval", "[point_process]") {
    // PPP(1) on [0,1]; f(x, P) = x^2 / (1 + |P|).
    // E[sum f(X, P \ X)] = int_0^1 x^2 dx E[1/(1+N)] = (1 - 1/e)/3.
    Rng rng(4242);
    OnlineStats lhs;
    std::vector<double> pos;
    for (int rep = 0; rep < 1000000; ++rep) {
        const auto n = rng.poisson(1.0);
        pos.clear();
        for (std::uint64_t i = 0; i < n; ++i) pos.push_back(rng.u01());
        double s = 0.0;
        for (double x : pos) s += x * x / (1.0 + static_cast<double>(pos.size() - 1));
        lhs.add(s);
    }
    const double rhs = (1.0 - std::exp(-1.0)) / 3.0;
    CHECK(std::abs(lhs.mean - rhs) < 3.0 * lhs.stderror());
}

TEST_CASE("1-stable fluctuations sharpen as beta decreases", "[point_process]") {
    // CF distance of Z(beta) - 1/(beta-1) to the limit law decreases in beta-1
    auto cf_distance = [](double beta, std::uint64_t master) {
        const std::size_t nat = atoms_for_beta(beta);
        const std::vector<double> ts{0.5, 1.0, -1.0};
        std::vector<std::complex<double>> acc(ts.size());
        const int n = 20000;
        for (int seed = 0; seed < n; ++seed) {
            Rng rng(derive_seed(master, seed));
            KahanSum z;
            double eta = 0.0;
            for (std::size_t i = 0; i < nat; ++i) {
                eta += rng.exponential();
                z.add(std::pow(eta, -beta));
            }
            const double w = z.value() + tail_mean_mass(eta, beta) - 1.0 / (beta - 1.0);
            for (std::size_t k = 0; k < ts.size(); ++k)
                acc[k] += std::complex<double>(std::cos(ts[k] * w), std::sin(ts[k] * w));
        }
        double worst = 0.0;
        for (std::size_t k = 0; k < ts.size(); ++k) {
            const double t = ts[k];
            const std::complex<double> emp = acc[k] / static_cast<double>(n);
            const double mod = std::exp(-kPi / 2.0 * std::abs(t));
            const double ph = t * (1.0 - kEulerGamma) - t * std::log(std::abs(t));
            const std::complex<double> tgt(mod * std::cos(ph), mod * std::sin(ph));
            worst = std::max(worst, std::abs(emp - tgt));
        }
        return worst;
    };
    const double d105 = cf_distance(1.05, 37);
    const double d102 = cf_distance(1.02, 38);
    CHECK(d102 < d105);
    CHECK(d102 < 0.05);
}

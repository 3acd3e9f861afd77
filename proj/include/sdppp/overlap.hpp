#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "sdppp/decorations.hpp"
#include "sdppp/point_process.hpp"
#include "sdppp/quadrature.hpp"
#include "sdppp/rng.hpp"
#include "sdppp/stats.hpp"

namespace sdppp::overlap {

enum class Method { direct, palm_integral };

struct OverlapEstimate {
    double mean = 0.0;
    double stderr_ = 0.0;
    std::uint64_t n_samples = 0;
    Method method = Method::direct;
    double beta = 0.0, beta_prime = 0.0;
    std::uint64_t seed = 0;
    bool degenerate = false;
};

// C(beta') = int_0^inf dx/(1+x^{beta'}), the r = 0 value of I.
inline double I_upper_bound(double beta_prime) {
    return kPi / (beta_prime * std::sin(kPi / beta_prime));
}

// I(r) = int_0^inf dx / ((1+(rx)^beta)(1+x^{beta'})), adaptive quadrature to
// abs_err <= 1e-8 * max(value, 1e-30).
inline IntegralValue I_r(double r, double beta, double beta_prime) {
    if (!(r >= 0.0)) throw std::domain_error("I_r: r must be >= 0");
    if (!(beta > 1.0) || !(beta_prime > 1.0)) throw std::domain_error("I_r: betas must be > 1");
    auto f = [=](double x) {
        const double rx = r * x;
        return 1.0 / ((1.0 + std::pow(rx, beta)) * (1.0 + std::pow(x, beta_prime)));
    };
    std::vector<double> knots{0.0};
    if (r > 0.0) {
        const double inv = 1.0 / r;
        knots.push_back(std::min(inv, 1.0));
        if (std::abs(inv - 1.0) > 1e-12) knots.push_back(std::max(inv, 1.0));
        knots.push_back(4.0 * std::max(inv, 1.0));
    } else {
        knots.push_back(1.0);
        knots.push_back(4.0);
    }
    const double split = knots.back();
    auto finite = integrate_knots(f, knots, 1e-12);
    auto tail = integrate_semi_infinite(f, split, 1e-12);
    IntegralValue rough{finite.value + tail.value, finite.abs_err + tail.abs_err};
    const double target = 1e-8 * std::max(rough.value, 1e-30);
    if (rough.abs_err <= target) return rough;
    finite = integrate_knots(f, knots, 0.5 * target);
    tail = integrate_semi_infinite(f, split, 0.5 * target);
    return {finite.value + tail.value, finite.abs_err + tail.abs_err};
}

// Per-sample REM overlap Q = Z(beta+beta')/(Z(beta) Z(beta')) on one atom set.
inline double q_rem(const GumbelPPP& ppp, double beta, double beta_prime) {
    if (!(beta > 1.0) || !(beta_prime > 1.0)) throw std::domain_error("q_rem: betas must be > 1");
    detail::check_range(ppp, std::max(beta, beta_prime));
    KahanSum zb, zp, zbp;
    for (double e : ppp.eta) {
        const double le = std::log(e);
        const double wb = std::exp(-beta * le);
        const double wp = std::exp(-beta_prime * le);
        zb.add(wb);
        zp.add(wp);
        zbp.add(wb * wp);
    }
    return zbp.value() / (zb.value() * zp.value());
}

// Per-sample decorated overlap Q_d on an assembled process.
inline double q_decorated(const DecoratedProcess& proc, double beta, double beta_prime) {
    if (!(beta > 1.0) || !(beta_prime > 1.0))
        throw std::domain_error("q_decorated: betas must be > 1");
    detail::check_range(proc.ppp, std::max(beta, beta_prime));
    if (proc.decorations.empty()) return q_rem(proc.ppp, beta, beta_prime);
    KahanSum zb, zp, zbp;
    for (std::size_t i = 0; i < proc.ppp.eta.size(); ++i) {
        const double le = std::log(proc.ppp.eta[i]);
        const double wb = std::exp(-beta * le);
        const double wp = std::exp(-beta_prime * le);
        const double sb = proc.decorations[i].S(beta);
        const double sp = proc.decorations[i].S(beta_prime);
        zb.add(wb * sb);
        zp.add(wp * sp);
        zbp.add(wb * wp * sb * sp);
    }
    return zbp.value() / (zb.value() * zp.value());
}

// ---------------------------------------------------------------------------
// Monte-Carlo estimators. The denominators of Q are tail-compensated (exact
// conditional mean of the omitted PPP mass given eta_N); the numerator's
// omitted mass decays like eta_N^{1-beta-beta'} and is ignored.
// ---------------------------------------------------------------------------

struct ScanRow {
    OverlapEstimate estimate;
    std::size_t n_atoms = 0;
};

// One direct Monte-Carlo overlap mean at fixed (beta, beta') for any model.
inline OverlapEstimate direct_overlap(const DecorationModel& model, double beta,
                                      double beta_prime, std::uint64_t n_samples,
                                      std::uint64_t seed, std::size_t n_atoms = 0) {
    const bool decorated = model.kind != DecorationKind::point_mass;
    DecorationSampler sampler(model);
    const std::size_t nat = n_atoms ? n_atoms : atoms_for_beta(std::min(beta, beta_prime));
    const double mean_sb = decorated ? sampler.mean_S(beta) : 1.0;
    const double mean_sp = decorated ? sampler.mean_S(beta_prime) : 1.0;
    OnlineStats acc;
    DecorationRealization scratch;
    for (std::uint64_t rep = 0; rep < n_samples; ++rep) {
        Rng rng(derive_seed(seed, 0x6f766572ULL, rep));
        KahanSum zb, zp, zbp;
        double eta = 0.0;
        for (std::size_t i = 0; i < nat; ++i) {
            eta += rng.exponential();
            const double le = std::log(eta);
            const double wb = std::exp(-beta * le);
            const double wp = std::exp(-beta_prime * le);
            double sb = 1.0, sp = 1.0;
            if (decorated) {
                sampler.sample_into(scratch, rng);
                const auto eb = scratch.eval(beta);
                const auto ep = scratch.eval(beta_prime);
                sb = eb.s;
                sp = ep.s;
            }
            zb.add(wb * sb);
            zp.add(wp * sp);
            zbp.add(wb * wp * sb * sp);
        }
        const double zbc = zb.value() + mean_sb * tail_mean_mass(eta, beta);
        const double zpc = zp.value() + mean_sp * tail_mean_mass(eta, beta_prime);
        acc.add(zbp.value() / (zbc * zpc));
    }
    OverlapEstimate out;
    out.mean = acc.mean;
    out.stderr_ = acc.stderror();
    out.n_samples = n_samples;
    out.method = Method::direct;
    out.beta = beta;
    out.beta_prime = beta_prime;
    out.seed = seed;
    return out;
}

// Palm-representation estimator: E[Q_d] = E[(S_{b'}/Z_d(b'))^{1/b'} I(R)] with
// R = (Z_d(b)/S_b)^{1/b} (S_{b'}/Z_d(b'))^{1/b'}, the decoration pair drawn
// independently of the decorated process pair.
inline OverlapEstimate palm_overlap(const DecorationModel& model, double beta,
                                    double beta_prime, std::uint64_t n_samples,
                                    std::uint64_t seed, std::size_t n_atoms = 0) {
    const bool decorated = model.kind != DecorationKind::point_mass;
    DecorationSampler sampler(model);
    const std::size_t nat = n_atoms ? n_atoms : atoms_for_beta(std::min(beta, beta_prime));
    const double mean_sb = decorated ? sampler.mean_S(beta) : 1.0;
    const double mean_sp = decorated ? sampler.mean_S(beta_prime) : 1.0;
    OnlineStats acc;
    DecorationRealization scratch;
    for (std::uint64_t rep = 0; rep < n_samples; ++rep) {
        Rng rng(derive_seed(seed, 0x70616c6dULL, rep));
        KahanSum zb, zp;
        double eta = 0.0;
        for (std::size_t i = 0; i < nat; ++i) {
            eta += rng.exponential();
            const double le = std::log(eta);
            double sb = 1.0, sp = 1.0;
            if (decorated) {
                sampler.sample_into(scratch, rng);
                sb = scratch.S(beta);
                sp = scratch.S(beta_prime);
            }
            zb.add(std::exp(-beta * le) * sb);
            zp.add(std::exp(-beta_prime * le) * sp);
        }
        const double zbc = zb.value() + mean_sb * tail_mean_mass(eta, beta);
        const double zpc = zp.value() + mean_sp * tail_mean_mass(eta, beta_prime);
        double s_b = 1.0, s_p = 1.0;
        if (decorated) {
            sampler.sample_into(scratch, rng);
            s_b = scratch.S(beta);
            s_p = scratch.S(beta_prime);
        }
        const double front = std::pow(s_p / zpc, 1.0 / beta_prime);
        const double r = std::pow(zbc / s_b, 1.0 / beta) * front;
        acc.add(front * I_r(r, beta, beta_prime).value);
    }
    OverlapEstimate out;
    out.mean = acc.mean;
    out.stderr_ = acc.stderror();
    out.n_samples = n_samples;
    out.method = Method::palm_integral;
    out.beta = beta;
    out.beta_prime = beta_prime;
    out.seed = seed;
    out.degenerate = acc.stderror() > 0.5 * std::abs(acc.mean);
    return out;
}

// ---------------------------------------------------------------------------
// Near-critical scan and the two-coefficient fit
// mean(beta) ~ c1 (beta-1) log(1/(beta-1)) + c2 (beta-1)
// ---------------------------------------------------------------------------

struct ScanResult {
    std::vector<OverlapEstimate> rows;
    FitResult fit;
};

inline std::vector<double> default_scan_grid() {
    return {1.02, 1.03, 1.05, 1.08, 1.12, 1.2, 1.3};
}

inline ScanResult near_critical_scan(const DecorationModel& model, double beta_prime,
                                     const std::vector<double>& beta_grid,
                                     std::uint64_t n_samples, std::uint64_t seed) {
    if (beta_grid.size() < 3)
        throw std::invalid_argument("near_critical_scan: need >= 3 grid points");
    ScanResult out;
    std::vector<double> x1, x2, y, se;
    for (std::size_t cell = 0; cell < beta_grid.size(); ++cell) {
        const double beta = beta_grid[cell];
        if (!(beta > 1.0)) throw std::domain_error("near_critical_scan: grid must be > 1");
        auto est = direct_overlap(model, beta, beta_prime, n_samples,
                                  derive_seed(seed, 0x7363616eULL, cell));
        out.rows.push_back(est);
        x1.push_back((beta - 1.0) * std::log(1.0 / (beta - 1.0)));
        x2.push_back(beta - 1.0);
        y.push_back(est.mean);
        se.push_back(est.stderr_);
    }
    out.fit = weighted_fit2(x1, x2, y, se);
    return out;
}

}  // namespace sdppp::overlap

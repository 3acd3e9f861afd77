#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "sdppp/decorations.hpp"
#include "sdppp/point_process.hpp"
#include "sdppp/rem_exact.hpp"
#include "sdppp/rng.hpp"
#include "sdppp/stats.hpp"

namespace sdppp::susceptibility {

enum class Method { variance_form, finite_h_fit, decomposition };

inline const char* method_name(Method m) {
    switch (m) {
        case Method::variance_form: return "variance_form";
        case Method::finite_h_fit: return "finite_h_fit";
        case Method::decomposition: return "decomposition";
    }
    return "?";
}

struct SusceptibilityEstimate {
    double kappa = 0.0;
    double stderr_ = 0.0;
    Method method = Method::variance_form;
    double beta = 0.0;
    std::uint64_t n_samples = 0;
    std::uint64_t seed = 0;
    // components, method-dependent
    double var_ratio = 0.0, var_logZ = 0.0, cov = 0.0;  // variance_form
    double kappa_rem = 0.0, tilt_variance = 0.0;        // decomposition
    bool warning = false;
};

namespace detail {

// delete-one-batch jackknife stderr for a statistic assembled from batch sums
template <class Assemble>
double jackknife_se(std::size_t n_batches, const Assemble& value_without) {
    std::vector<double> leave(n_batches);
    for (std::size_t b = 0; b < n_batches; ++b) leave[b] = value_without(b);
    double m = 0.0;
    for (double v : leave) m += v;
    m /= static_cast<double>(n_batches);
    double ss = 0.0;
    for (double v : leave) ss += (v - m) * (v - m);
    const double nb = static_cast<double>(n_batches);
    return std::sqrt((nb - 1.0) / nb * ss);
}

struct MomentSums {
    double n = 0, s1 = 0, s2 = 0, s11 = 0, s22 = 0, s12 = 0;
    void add(double a, double b) {
        n += 1; s1 += a; s2 += b; s11 += a * a; s22 += b * b; s12 += a * b;
    }
    void merge(const MomentSums& o) {
        n += o.n; s1 += o.s1; s2 += o.s2; s11 += o.s11; s22 += o.s22; s12 += o.s12;
    }
    double var1() const { return s11 / n - (s1 / n) * (s1 / n); }
    double var2() const { return s22 / n - (s2 / n) * (s2 / n); }
    double cov12() const { return s12 / n - (s1 / n) * (s2 / n); }
};

inline double kappa_from_moments(const MomentSums& m) {
    const double vl = m.var1();
    const double vr = m.var2();
    const double cv = m.cov12();
    return 0.5 * (vr / vl - (cv / vl) * (cv / vl));
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Corollary-style variance form: Monte-Carlo second moments of
// (log Z_d, Z_d'/Z_d) on common samples.
// ---------------------------------------------------------------------------
inline SusceptibilityEstimate kappa_variance_form(const DecorationModel& model, double beta,
                                                  std::uint64_t n_samples, std::uint64_t seed,
                                                  std::size_t n_atoms = 0) {
    const bool decorated = model.kind != DecorationKind::point_mass;
    DecorationSampler sampler(model);
    const std::size_t nat = n_atoms ? n_atoms : atoms_for_beta(beta);
    const double mS = decorated ? sampler.mean_S(beta) : 1.0;
    const double mSp = decorated ? sampler.mean_Sprime(beta) : 0.0;
    const std::size_t n_batches = 64;
    std::vector<detail::MomentSums> batch(n_batches);
    DecorationRealization scratch;
    for (std::uint64_t rep = 0; rep < n_samples; ++rep) {
        Rng rng(derive_seed(seed, 0x76617266ULL, rep));
        KahanSum z, zp;
        double eta = 0.0;
        for (std::size_t i = 0; i < nat; ++i) {
            eta += rng.exponential();
            const double le = std::log(eta);
            const double w = std::exp(-beta * le);
            double s = 1.0, spr = 0.0;
            if (decorated) {
                sampler.sample_into(scratch, rng);
                const auto ev = scratch.eval(beta);
                s = ev.s;
                spr = ev.sprime;
            }
            z.add(w * s);
            zp.add(w * (-le * s + spr));
        }
        const double zc = z.value() + mS * tail_mean_mass(eta, beta);
        const double zpc = zp.value() + mS * tail_mean_logweighted(eta, beta) +
                           mSp * tail_mean_mass(eta, beta);
        batch[rep % n_batches].add(std::log(zc), zpc / zc);
    }
    detail::MomentSums all;
    for (const auto& b : batch) all.merge(b);
    SusceptibilityEstimate out;
    out.method = Method::variance_form;
    out.beta = beta;
    out.n_samples = n_samples;
    out.seed = seed;
    out.kappa = detail::kappa_from_moments(all);
    out.var_logZ = all.var1();
    out.var_ratio = all.var2();
    out.cov = all.cov12();
    out.stderr_ = detail::jackknife_se(n_batches, [&](std::size_t skip) {
        detail::MomentSums m;
        for (std::size_t b = 0; b < n_batches; ++b)
            if (b != skip) m.merge(batch[b]);
        return detail::kappa_from_moments(m);
    });
    out.warning = out.var_logZ < 10.0 * out.stderr_;  // variance degeneracy near beta = 1
    return out;
}

// ---------------------------------------------------------------------------
// Finite-h fit of C_d(beta, beta+h) = 1 - kappa h^2 (+ c3 h^3 nuisance), with
// common random numbers: same atoms and same decoration realizations at every
// temperature.
// ---------------------------------------------------------------------------
inline SusceptibilityEstimate kappa_finite_h(const DecorationModel& model, double beta,
                                             const std::vector<double>& h_grid,
                                             std::uint64_t n_samples, std::uint64_t seed,
                                             std::size_t n_atoms = 0) {
    if (h_grid.size() < 3) throw std::invalid_argument("kappa_finite_h: need >= 3 h values");
    for (double h : h_grid)
        if (!(h > 0.0) || h > 0.2) throw std::domain_error("kappa_finite_h: h must be in (0, 0.2]");
    const bool decorated = model.kind != DecorationKind::point_mass;
    DecorationSampler sampler(model);
    const std::size_t nat = n_atoms ? n_atoms : atoms_for_beta(beta);
    const std::size_t nh = h_grid.size();
    std::vector<double> temps{beta};
    for (double h : h_grid) temps.push_back(beta + h);
    std::vector<double> mS(temps.size()), mSp(temps.size());
    for (std::size_t j = 0; j < temps.size(); ++j) {
        mS[j] = decorated ? sampler.mean_S(temps[j]) : 1.0;
        mSp[j] = decorated ? sampler.mean_Sprime(temps[j]) : 0.0;
    }
    const std::size_t n_batches = 64;
    std::vector<std::vector<detail::MomentSums>> batch(nh,
        std::vector<detail::MomentSums>(n_batches));
    std::vector<KahanSum> z(temps.size());
    DecorationRealization scratch;
    for (std::uint64_t rep = 0; rep < n_samples; ++rep) {
        Rng rng(derive_seed(seed, 0x66696e68ULL, rep));
        for (auto& s : z) s = KahanSum{};
        double eta = 0.0;
        for (std::size_t i = 0; i < nat; ++i) {
            eta += rng.exponential();
            const double le = std::log(eta);
            if (decorated) sampler.sample_into(scratch, rng);
            for (std::size_t j = 0; j < temps.size(); ++j) {
                const double w = std::exp(-temps[j] * le);
                double s = 1.0;
                if (decorated) s = scratch.S(temps[j]);
                z[j].add(w * s);
            }
        }
        double logz0 = 0.0;
        for (std::size_t j = 0; j < temps.size(); ++j) {
            const double zc = z[j].value() + mS[j] * tail_mean_mass(eta, temps[j]);
            const double lz = std::log(zc);
            if (j == 0)
                logz0 = lz;
            else
                batch[j - 1][rep % n_batches].add(logz0, lz);
        }
    }
    // per-h correlation, then weighted fit of y = kappa h^2 + c3 h^3
    auto corr_of = [](const detail::MomentSums& m) {
        return m.cov12() / std::sqrt(m.var1() * m.var2());
    };
    std::vector<double> y(nh), yse(nh);
    std::vector<detail::MomentSums> pooled(nh);
    for (std::size_t k = 0; k < nh; ++k) {
        for (const auto& b : batch[k]) pooled[k].merge(b);
        y[k] = 1.0 - corr_of(pooled[k]);
        yse[k] = detail::jackknife_se(n_batches, [&](std::size_t skip) {
            detail::MomentSums m;
            for (std::size_t b = 0; b < n_batches; ++b)
                if (b != skip) m.merge(batch[k][b]);
            return 1.0 - corr_of(m);
        });
        yse[k] = std::max(yse[k], 1e-14);
    }
    std::vector<double> x2(nh), x3(nh);
    for (std::size_t k = 0; k < nh; ++k) {
        x2[k] = h_grid[k] * h_grid[k];
        x3[k] = x2[k] * h_grid[k];
    }
    const FitResult fit = weighted_fit2(x2, x3, y, yse);
    // pure h^2 fit for the contamination check
    double num = 0.0, den = 0.0;
    for (std::size_t k = 0; k < nh; ++k) {
        const double w = 1.0 / (yse[k] * yse[k]);
        num += w * y[k] * x2[k];
        den += w * x2[k] * x2[k];
    }
    const double kappa_pure = num / den;
    SusceptibilityEstimate out;
    out.method = Method::finite_h_fit;
    out.beta = beta;
    out.n_samples = n_samples;
    out.seed = seed;
    out.kappa = fit.c1;
    out.stderr_ = fit.c1_se;
    out.warning = std::abs(kappa_pure - fit.c1) > std::max(0.1 * std::abs(fit.c1),
                                                           3.0 * fit.c1_se);
    return out;
}

// ---------------------------------------------------------------------------
// Decomposition: kappa_d = kappa_REM(beta) (exact) +
//   3/(pi^2 beta (beta+1)) Var_beta((1/beta) log S - S'/S),
// the tilt variance estimated by self-normalized importance sampling. For the
// delta families an explicit proposal on X covers the tilted bulk, which sits
// far in the tail of the plain model law near beta = 1.
// ---------------------------------------------------------------------------

namespace detail {

struct DeltaProposal {
    double x0 = 0.0, sigma = 1.0;
    bool active = false;
};

inline DeltaProposal build_delta_proposal(const DecorationSampler& sampler, double beta) {
    DeltaProposal prop;
    const auto& model = sampler.model();
    if (model.kind != DecorationKind::power_tail_delta &&
        model.kind != DecorationKind::stretched_exp_delta)
        return prop;
    auto score = [&](double x) {
        const double t = sampler.delta_log_f(x) - beta * x;
        const double ls = t > 0 ? t + std::log1p(std::exp(-t)) : std::log1p(std::exp(t));
        return 2.0 * std::log(x) + ls / beta + std::log(sampler.delta_density(x));
    };
    double best_x = 1.0, best = score(1.0);
    for (int i = 0; i <= 400; ++i) {
        const double x = std::exp(-7.0 + 23.0 * i / 400.0);
        const double s = score(x);
        if (s > best) { best = s; best_x = x; }
    }
    double lo = best_x / 1.2, hi = best_x * 1.2;
    for (int it = 0; it < 80; ++it) {
        const double m1 = lo + (hi - lo) * 0.382;
        const double m2 = lo + (hi - lo) * 0.618;
        if (score(m1) < score(m2)) lo = m1; else hi = m2;
    }
    prop.x0 = 0.5 * (lo + hi);
    const double h = std::max(1e-4 * prop.x0, 1e-6);
    const double d2 = (score(prop.x0 + h) - 2.0 * score(prop.x0) + score(prop.x0 - h)) / (h * h);
    prop.sigma = d2 < 0.0 ? 1.5 / std::sqrt(-d2) : prop.x0;
    prop.sigma = std::min(std::max(prop.sigma, 1e-3 * prop.x0 + 1e-3), 10.0 * prop.x0 + 10.0);
    prop.active = true;
    return prop;
}

}  // namespace detail

inline SusceptibilityEstimate kappa_decomposition(const DecorationModel& model, double beta,
                                                  std::uint64_t n_samples, std::uint64_t seed) {
    DecorationSampler sampler(model);
    const auto prop = detail::build_delta_proposal(sampler, beta);
    const std::size_t n_batches = 64;
    struct Sums { double w = 0, w2 = 0, wv = 0, wvv = 0; };
    std::vector<Sums> batch(n_batches);
    Rng rng(derive_seed(seed, 0x6b646563ULL));
    DecorationRealization scratch;
    const double gauss_norm = -0.5 * std::log(2.0 * kPi * prop.sigma * prop.sigma);
    const double trunc_mass =
        prop.active ? 0.5 * std::erfc(-prop.x0 / (prop.sigma * std::sqrt(2.0))) : 1.0;
    for (std::uint64_t rep = 0; rep < n_samples; ++rep) {
        double log_w;
        double v;
        if (prop.active) {
            double x;
            if (rng.u01() < 0.5) {
                x = sampler.sample_delta_x(rng);
            } else {
                do { x = prop.x0 + prop.sigma * rng.normal(); } while (x <= 0.0);
            }
            const double p = sampler.delta_density(x);
            const double zn = (x - prop.x0) / prop.sigma;
            const double qn = std::exp(gauss_norm - 0.5 * zn * zn) / trunc_mass;
            const double q = 0.5 * p + 0.5 * qn;
            scratch.atoms.clear();
            scratch.atoms.push_back({0.0, 0.0});
            const double lf = sampler.delta_log_f(x);
            double lm = lf;
            if (lf < 36.0) lm = std::log(std::ceil(std::exp(lf)));
            scratch.atoms.push_back({-x, std::max(lm, 0.0)});
            log_w = scratch.logS(beta) / beta + std::log(p) - std::log(q);
        } else {
            sampler.sample_into(scratch, rng);
            log_w = scratch.logS(beta) / beta;
        }
        const double s = scratch.S(beta);
        v = scratch.logS(beta) / beta - scratch.Sprime(beta) / s;
        const double w = std::exp(log_w);
        auto& b = batch[rep % n_batches];
        b.w += w;
        b.w2 += w * w;
        b.wv += w * v;
        b.wvv += w * v * v;
    }
    auto var_from = [&](std::size_t skip) {
        double w = 0, wv = 0, wvv = 0;
        for (std::size_t b = 0; b < n_batches; ++b) {
            if (b == skip) continue;
            w += batch[b].w;
            wv += batch[b].wv;
            wvv += batch[b].wvv;
        }
        const double m = wv / w;
        return wvv / w - m * m;
    };
    double w_all = 0, w2_all = 0;
    for (const auto& b : batch) { w_all += b.w; w2_all += b.w2; }
    const double tilt_var = var_from(n_batches);  // skip index out of range = keep all
    const double coef = 3.0 / (kPi * kPi * beta * (beta + 1.0));
    SusceptibilityEstimate out;
    out.method = Method::decomposition;
    out.beta = beta;
    out.n_samples = n_samples;
    out.seed = seed;
    out.kappa_rem = rem::kappa(beta);
    out.tilt_variance = tilt_var;
    out.kappa = out.kappa_rem + coef * tilt_var;
    out.stderr_ = coef * detail::jackknife_se(n_batches, var_from);
    out.warning = (w_all * w_all / w2_all) < 0.01 * static_cast<double>(n_samples);
    return out;
}

// ---------------------------------------------------------------------------
// Scaling experiment: log-log slope of kappa_d - kappa vs (beta - 1).
// ---------------------------------------------------------------------------

struct ScalingRow {
    double beta = 0.0;
    double excess = 0.0;   // kappa_d - kappa
    double stderr_ = 0.0;
    double scaled = 0.0;   // (kappa_d - kappa) (beta-1)^2
};

struct ScalingResult {
    std::vector<ScalingRow> rows;
    double slope = 0.0, slope_se = 0.0;
    bool warning = false;
};

inline ScalingResult scaling_experiment(const DecorationModel& model,
                                        const std::vector<double>& beta_grid,
                                        std::uint64_t n_samples, std::uint64_t seed) {
    if (model.kind != DecorationKind::power_tail_delta &&
        model.kind != DecorationKind::stretched_exp_delta)
        throw std::invalid_argument("scaling_experiment: delta families only");
    ScalingResult out;
    std::vector<double> lx, ly;
    for (std::size_t cell = 0; cell < beta_grid.size(); ++cell) {
        const double beta = beta_grid[cell];
        auto est = kappa_decomposition(model, beta, n_samples, derive_seed(seed, 0x73636c67ULL, cell));
        ScalingRow row;
        row.beta = beta;
        row.excess = est.kappa - est.kappa_rem;
        row.stderr_ = est.stderr_;
        row.scaled = row.excess * (beta - 1.0) * (beta - 1.0);
        out.warning = out.warning || est.warning;
        out.rows.push_back(row);
        lx.push_back(std::log(beta - 1.0));
        ly.push_back(std::log(row.excess));
    }
    double intercept;
    linear_fit(lx, ly, out.slope, intercept, out.slope_se);
    return out;
}

}  // namespace sdppp::susceptibility

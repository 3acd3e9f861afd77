#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "sdppp/point_process.hpp"
#include "sdppp/quadrature.hpp"
#include "sdppp/rng.hpp"
#include "sdppp/special_functions.hpp"
#include "sdppp/stats.hpp"

namespace sdppp {

// ---------------------------------------------------------------------------
// Decoration models
// ---------------------------------------------------------------------------
// All decorations live on (-inf, 0] and carry an atom at 0. Supported kinds:
//   point_mass          delta_0 only (the REM)
//   pareto_poisson(a,b) delta_0 plus, conditionally on a Pareto(a) depth X,
//                       a Poisson process with intensity u^{b-1} e^u du on
//                       depth u in [0, X]  (atoms at position -u)
//   power_tail_delta(b) delta_0 + f(X) delta_{-X}, X ~ 3(1+x)^{-4} dx,
//                       f(x) = ceil((1+x)^b e^x)
//   stretched_exp_delta(g) same with X ~ e^{-x^g}/Z dx, f(x) = ceil(e^{x+2x^g})
//   fixed_delta(x0, m)  deterministic delta_0 + m delta_{-x0} (diagnostics)

enum class DecorationKind {
    point_mass,
    pareto_poisson,
    power_tail_delta,
    stretched_exp_delta,
    fixed_delta,
};

struct DecorationModel {
    DecorationKind kind = DecorationKind::point_mass;
    double a = 0.0, b = 0.0;       // pareto_poisson
    double b_exp = 0.0;            // power_tail_delta
    double gamma_exp = 0.0;        // stretched_exp_delta
    double x0 = 0.0, mult = 1.0;   // fixed_delta

    static DecorationModel point_mass() { return {}; }

    static DecorationModel pareto_poisson(double a, double b) {
        if (!(a > 0.0) || !(b > 0.0))
            throw std::invalid_argument("pareto_poisson: need a > 0 and b > 0");
        DecorationModel m;
        m.kind = DecorationKind::pareto_poisson;
        m.a = a;
        m.b = b;
        return m;
    }

    static DecorationModel power_tail_delta(double b) {
        DecorationModel m;
        m.kind = DecorationKind::power_tail_delta;
        m.b_exp = b;
        return m;
    }

    static DecorationModel stretched_exp_delta(double g) {
        if (!(g > 0.0) || !(g < 1.0))
            throw std::invalid_argument("stretched_exp_delta: need gamma in (0,1)");
        DecorationModel m;
        m.kind = DecorationKind::stretched_exp_delta;
        m.gamma_exp = g;
        return m;
    }

    static DecorationModel fixed_delta(double depth, double multiplicity) {
        if (!(depth >= 0.0) || !(multiplicity >= 1.0))
            throw std::invalid_argument("fixed_delta: need depth >= 0, multiplicity >= 1");
        DecorationModel m;
        m.kind = DecorationKind::fixed_delta;
        m.x0 = depth;
        m.mult = multiplicity;
        return m;
    }

    std::string name() const {
        switch (kind) {
            case DecorationKind::point_mass: return "PointMass";
            case DecorationKind::pareto_poisson:
                return "ParetoPoisson(a=" + std::to_string(a) + ",b=" + std::to_string(b) + ")";
            case DecorationKind::power_tail_delta:
                return "PowerTailDelta(b=" + std::to_string(b_exp) + ")";
            case DecorationKind::stretched_exp_delta:
                return "StretchedExpDelta(gamma=" + std::to_string(gamma_exp) + ")";
            case DecorationKind::fixed_delta:
                return "FixedDelta(x=" + std::to_string(x0) + ",f=" + std::to_string(mult) + ")";
        }
        return "?";
    }
};

// ---------------------------------------------------------------------------
// Realizations
// ---------------------------------------------------------------------------
// A realization is a finite multiset of atoms (position <= 0, multiplicity
// stored in log form so the delta families' astronomically large f(X) fit).
// Deep ParetoPoisson layers arrive pre-binned: exact Poisson counts per depth
// bin placed at the bin's intensity centroid, so a realization is always a
// bona fide atom measure and S >= 1, S' <= 0, S'' >= 0 hold structurally.

struct DecorationRealization {
    struct Atom {
        double position;  // <= 0
        double log_mult;  // log multiplicity, >= 0
    };
    std::vector<Atom> atoms;

    double log_term(const Atom& a, double beta) const { return a.log_mult + beta * a.position; }

    double S(double beta) const {
        KahanSum s;
        for (const auto& a : atoms) s.add(std::exp(log_term(a, beta)));
        return s.value();
    }

    double Sprime(double beta) const {
        KahanSum s;
        for (const auto& a : atoms) s.add(a.position * std::exp(log_term(a, beta)));
        return s.value();
    }

    double Ssecond(double beta) const {
        KahanSum s;
        for (const auto& a : atoms) s.add(a.position * a.position * std::exp(log_term(a, beta)));
        return s.value();
    }

    double logS(double beta) const {
        double mx = -1e300;
        for (const auto& a : atoms) mx = std::max(mx, log_term(a, beta));
        KahanSum s;
        for (const auto& a : atoms) s.add(std::exp(log_term(a, beta) - mx));
        return mx + std::log(s.value());
    }

    // joint evaluation used by the hot loops
    struct Eval {
        double s, sprime;
    };
    Eval eval(double beta) const {
        KahanSum s, sp;
        for (const auto& a : atoms) {
            const double w = std::exp(log_term(a, beta));
            s.add(w);
            sp.add(a.position * w);
        }
        return {s.value(), sp.value()};
    }
};

namespace detail {

// log of int_0^u t^{b-1} e^t dt. Power series below u = 20 (all terms
// positive), asymptotic alternating series above.
inline double log_grow_integral(double b, double u) {
    if (!(u > 0.0)) return -1e300;
    if (u <= 20.0) {
        double term = std::pow(u, b) / b;
        double sum = term;
        for (int k = 1; k < 120; ++k) {
            term *= u * (b + k - 1.0) / (static_cast<double>(k) * (b + k));
            sum += term;
            if (term < sum * 1e-17) break;
        }
        return std::log(sum);
    }
    double corr = 1.0, term = 1.0;
    for (int j = 1; j <= 10; ++j) {
        term *= -(b - static_cast<double>(j)) / u;
        corr += term;
    }
    return u + (b - 1.0) * std::log(u) + std::log(corr);
}

// log(e^A - e^B) for A > B
inline double log_diff_exp(double la, double lb) {
    return la + std::log1p(-std::exp(lb - la));
}

}  // namespace detail

// Immutable sampling engine; construct once per model, share across threads.
class DecorationSampler {
  public:
    explicit DecorationSampler(const DecorationModel& model) : model_(model) {}

    const DecorationModel& model() const { return model_; }

    DecorationRealization sample(Rng& rng) const {
        DecorationRealization real;
        sample_into(real, rng);
        return real;
    }

    // hot-loop variant; reuses the atom vector's capacity
    void sample_into(DecorationRealization& real, Rng& rng) const {
        real.atoms.clear();
        real.atoms.push_back({0.0, 0.0});
        switch (model_.kind) {
            case DecorationKind::point_mass:
                break;
            case DecorationKind::fixed_delta:
                if (model_.x0 > 0.0)
                    real.atoms.push_back({-model_.x0, std::log(model_.mult)});
                break;
            case DecorationKind::power_tail_delta: {
                const double x = std::pow(rng.u01_pos(), -1.0 / 3.0) - 1.0;
                add_delta_atom(real, x, model_.b_exp * std::log1p(x) + x);
                break;
            }
            case DecorationKind::stretched_exp_delta: {
                const double g = model_.gamma_exp;
                const double x = std::pow(rng.gamma(1.0 / g), 1.0 / g);
                add_delta_atom(real, x, x + 2.0 * std::pow(x, g));
                break;
            }
            case DecorationKind::pareto_poisson:
                sample_pareto(real, rng);
                break;
        }
    }

    // depth of the random support bound X_a (diagnostics/tests)
    double sample_depth(Rng& rng) const {
        if (model_.kind != DecorationKind::pareto_poisson)
            throw std::logic_error("sample_depth: pareto_poisson only");
        return std::pow(rng.u01_pos(), -1.0 / model_.a);
    }

    // E[S_beta] and E[S'_beta]; exact up to incomplete-gamma evaluation,
    // needed by the tail-compensated decorated sums.
    double mean_S(double beta) const {
        switch (model_.kind) {
            case DecorationKind::point_mass: return 1.0;
            case DecorationKind::fixed_delta:
                return 1.0 + model_.mult * std::exp(-beta * model_.x0);
            case DecorationKind::pareto_poisson:
                return 1.0 + pareto_weighted_moment(0, beta);
            default:
                return 1.0 + delta_weighted_moment(0, beta);
        }
    }

    double mean_Sprime(double beta) const {
        switch (model_.kind) {
            case DecorationKind::point_mass: return 0.0;
            case DecorationKind::fixed_delta:
                return -model_.x0 * model_.mult * std::exp(-beta * model_.x0);
            case DecorationKind::pareto_poisson:
                return -pareto_weighted_moment(1, beta);
            default:
                return -delta_weighted_moment(1, beta);
        }
    }

    // density of X for the delta families (importance-sampling support)
    double delta_density(double x) const {
        if (x <= 0.0) return 0.0;
        switch (model_.kind) {
            case DecorationKind::power_tail_delta:
                return 3.0 * std::pow(1.0 + x, -4.0);
            case DecorationKind::stretched_exp_delta: {
                const double g = model_.gamma_exp;
                const double norm = std::exp(log_gamma(1.0 + 1.0 / g).value);
                return std::exp(-std::pow(x, g)) / norm;
            }
            default:
                throw std::logic_error("delta_density: delta families only");
        }
    }

    double sample_delta_x(Rng& rng) const {
        switch (model_.kind) {
            case DecorationKind::power_tail_delta:
                return std::pow(rng.u01_pos(), -1.0 / 3.0) - 1.0;
            case DecorationKind::stretched_exp_delta: {
                const double g = model_.gamma_exp;
                return std::pow(rng.gamma(1.0 / g), 1.0 / g);
            }
            default:
                throw std::logic_error("sample_delta_x: delta families only");
        }
    }

    // log f(x) for the delta families (before the ceiling)
    double delta_log_f(double x) const {
        switch (model_.kind) {
            case DecorationKind::power_tail_delta:
                return model_.b_exp * std::log1p(x) + x;
            case DecorationKind::stretched_exp_delta:
                return x + 2.0 * std::pow(x, model_.gamma_exp);
            default:
                throw std::logic_error("delta_log_f: delta families only");
        }
    }

    static DecorationRealization delta_realization(double depth, double log_f) {
        DecorationRealization real;
        real.atoms.push_back({0.0, 0.0});
        add_delta_atom(real, depth, log_f);
        return real;
    }

  private:
    static void add_delta_atom(DecorationRealization& real, double x, double log_f) {
        // keep the ceiling while e^{log_f} is exactly representable; above
        // ~e^36 the ceiling is below one ulp anyway
        double lm = log_f;
        if (log_f < 36.0) lm = std::log(std::ceil(std::exp(log_f)));
        real.atoms.push_back({-x, std::max(lm, 0.0)});
    }

    // E[x^k f(X) e^{-beta X}] for the delta families; the ceiling's fractional
    // part is folded in as its mean 1/2, far inside the Monte-Carlo noise of
    // everything this feeds.
    double delta_weighted_moment(int k, double beta) const {
        auto integrand = [&](double x) {
            const double lf = delta_log_f(x);
            const double w = std::exp(lf - beta * x) + 0.5 * std::exp(-beta * x);
            return std::pow(x, k) * w * delta_density(x);
        };
        const double rough = integrate_semi_infinite(integrand, 0.0, 1e-3).value;
        return integrate_semi_infinite(integrand, 0.0, std::max(1e-12, 1e-9 * std::abs(rough))).value;
    }

    // int_0^inf u^{k + b - 1} e^{-(beta-1) u} P(X_a >= u) du
    double pareto_weighted_moment(int k, double beta) const {
        const double s = beta - 1.0;
        const double q1 = model_.b + static_cast<double>(k);
        double v = gamma_tail_integral(q1, s, 0.0, 1.0);
        const double q2 = q1 - model_.a;
        if (q2 > 0.0) {
            v += gamma_tail_integral(q2, s, 1.0, 1e6 / s);
        } else {
            // integrable tail with non-positive power; direct panels
            double acc = 0.0, lo = 1.0;
            while (lo * s < 50.0) {
                const double hi = lo * 2.0;
                const int m = 64;
                const double h = (hi - lo) / m;
                for (int i = 0; i < m; ++i) {
                    const double u = lo + (i + 0.5) * h;
                    acc += std::pow(u, q2 - 1.0) * std::exp(-s * u) * h;
                }
                lo = hi;
            }
            v += acc;
        }
        return v;
    }

    void sample_pareto(DecorationRealization& real, Rng& rng) const {
        const double X = std::pow(rng.u01_pos(), -1.0 / model_.a);
        const double cut = std::min(X, kExactDepth);
        sample_exact_region(real, rng, cut);
        if (X > kExactDepth) sample_binned_layer(real, rng, X);
    }

    // exact atoms on depth [0, cut]: Poisson count, positions by rejection
    void sample_exact_region(DecorationRealization& real, Rng& rng, double cut) const {
        if (!(cut > 0.0)) return;
        const double b = model_.b;
        const double lambda = std::exp(detail::log_grow_integral(b, cut));
        const std::uint64_t n = rng.poisson(lambda);
        const double emc = std::expm1(cut);
        for (std::uint64_t i = 0; i < n; ++i) {
            double u;
            if (b >= 1.0) {
                // proposal density e^u / (e^cut - 1), accept w.p. (u/cut)^{b-1}
                while (true) {
                    u = std::log1p(rng.u01() * emc);
                    if (b == 1.0 || rng.u01() < std::pow(u / cut, b - 1.0)) break;
                }
            } else {
                // proposal density b u^{b-1} / cut^b, accept w.p. e^{u - cut}
                while (true) {
                    u = cut * std::pow(rng.u01_pos(), 1.0 / b);
                    if (std::log(rng.u01_pos()) < u - cut) break;
                }
            }
            real.atoms.push_back({-u, 0.0});
        }
    }

    // depth bins (kExactDepth, X]: per-bin Poisson count at the intensity
    // centroid; Gaussian count perturbation once the count is astronomical
    void sample_binned_layer(DecorationRealization& real, Rng& rng, double X) const {
        const double b = model_.b;
        double lo = kExactDepth;
        double llo = detail::log_grow_integral(b, lo);
        double tlo = detail::log_grow_integral(b + 1.0, lo);
        double width = kBinWidth0;
        while (lo < X) {
            const double hi = std::min(X, lo + width);
            const double lhi = detail::log_grow_integral(b, hi);
            const double thi = detail::log_grow_integral(b + 1.0, hi);
            const double lmass = detail::log_diff_exp(lhi, llo);
            const double lfirst = detail::log_diff_exp(thi, tlo);
            const double centroid = std::exp(lfirst - lmass);
            double log_mult;
            bool keep = true;
            if (lmass < kGaussianCountLog) {
                const std::uint64_t n = rng.poisson(std::exp(lmass));
                keep = n > 0;
                log_mult = keep ? std::log(static_cast<double>(n)) : 0.0;
            } else {
                double rel = std::exp(-0.5 * lmass);
                log_mult = lmass + (rel > 1e-9 ? std::log1p(std::max(rng.normal() * rel, -0.999)) : 0.0);
            }
            if (keep) real.atoms.push_back({-centroid, log_mult});
            lo = hi;
            llo = lhi;
            tlo = thi;
            if (lo >= kExactDepth + 2.0) width = std::min(width * 1.3, 0.25 + 0.02 * lo);
        }
    }

    static constexpr double kExactDepth = 2.0;
    static constexpr double kBinWidth0 = 0.125;
    static constexpr double kGaussianCountLog = 18.4;  // ~ log(1e8)

    DecorationModel model_;
};

inline DecorationRealization sample_decoration(const DecorationModel& model, std::uint64_t seed) {
    DecorationSampler sampler(model);
    Rng rng(seed);
    return sampler.sample(rng);
}

// ---------------------------------------------------------------------------
// Decorated processes
// ---------------------------------------------------------------------------

struct DecoratedProcess {
    GumbelPPP ppp;
    std::vector<DecorationRealization> decorations;  // one per atom, i.i.d.
};

inline DecoratedProcess assemble(GumbelPPP ppp, const DecorationModel& model,
                                 std::uint64_t seed) {
    DecoratedProcess proc;
    proc.decorations.reserve(ppp.eta.size());
    DecorationSampler sampler(model);
    for (std::size_t i = 0; i < ppp.eta.size(); ++i) {
        Rng rng(derive_seed(seed, 0x6465636fULL, i));
        proc.decorations.push_back(sampler.sample(rng));
    }
    proc.ppp = std::move(ppp);
    return proc;
}

struct DecoratedPartition {
    double z = 0.0;       // Z_d(beta)
    double zprime = 0.0;  // Z_d'(beta)
};

inline DecoratedPartition z_decorated(const DecoratedProcess& proc, double beta) {
    detail::check_range(proc.ppp, beta);
    KahanSum z, zp;
    for (std::size_t i = 0; i < proc.ppp.eta.size(); ++i) {
        const double le = std::log(proc.ppp.eta[i]);
        const double w = std::exp(-beta * le);
        const auto ev = proc.decorations[i].eval(beta);
        z.add(w * ev.s);
        zp.add(w * (-le * ev.s + ev.sprime));
    }
    return {z.value(), zp.value()};
}

// Tail-compensated variant: adds the exact conditional mean of the omitted
// atoms' contribution, E[S] and E[S'] supplied by the sampler.
inline DecoratedPartition z_decorated_compensated(const DecoratedProcess& proc, double beta,
                                                  double mean_S, double mean_Sprime) {
    DecoratedPartition out = z_decorated(proc, beta);
    const double last = proc.ppp.eta.back();
    out.z += mean_S * tail_mean_mass(last, beta);
    out.zprime += mean_S * tail_mean_logweighted(last, beta) +
                  mean_Sprime * tail_mean_mass(last, beta);
    return out;
}

// ---------------------------------------------------------------------------
// Tilted measure P_beta via self-normalized importance sampling
// ---------------------------------------------------------------------------

struct TiltedEstimate {
    EstimateWithError estimate;
    double effective_sample_size = 0.0;
    bool degenerate = false;  // ESS below 1% of n
};

template <class F>
TiltedEstimate tilted_expectation(const DecorationModel& model, double beta, F&& functional,
                                  std::uint64_t n_samples, std::uint64_t seed) {
    if (n_samples < 100) throw std::invalid_argument("tilted_expectation: n_samples >= 100");
    DecorationSampler sampler(model);
    Rng rng(derive_seed(seed, 0x74696c74ULL));
    KahanSum sw, swf, sww, swdev;
    std::vector<double> w(n_samples), fv(n_samples);
    for (std::uint64_t i = 0; i < n_samples; ++i) {
        const DecorationRealization d = sampler.sample(rng);
        w[i] = std::exp(d.logS(beta) / beta);
        fv[i] = functional(d);
        sw.add(w[i]);
        swf.add(w[i] * fv[i]);
        sww.add(w[i] * w[i]);
    }
    const double wsum = sw.value();
    const double mean = swf.value() / wsum;
    for (std::uint64_t i = 0; i < n_samples; ++i) {
        const double dev = w[i] * (fv[i] - mean);
        swdev.add(dev * dev);
    }
    TiltedEstimate out;
    out.estimate.mean = mean;
    out.estimate.stderr_ = std::sqrt(swdev.value()) / wsum;
    out.estimate.n_samples = n_samples;
    out.estimate.seed = seed;
    out.effective_sample_size = wsum * wsum / sww.value();
    out.degenerate = out.effective_sample_size < 0.01 * static_cast<double>(n_samples);
    return out;
}

}  // namespace sdppp

#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <utility>
#include <vector>

#include "sdppp/rng.hpp"
#include "sdppp/stats.hpp"

namespace sdppp {

// Atoms eta_k of the homogeneous unit-rate PPP on R+, truncated at N; the
// extremal atoms of the limiting process are xi_k = -log(eta_k).
struct GumbelPPP {
    std::vector<double> eta;  // strictly increasing, > 0
    std::uint64_t seed = 0;

    static GumbelPPP from_atoms(std::vector<double> atoms) {
        GumbelPPP p;
        p.eta = std::move(atoms);
        for (std::size_t i = 0; i < p.eta.size(); ++i) {
            if (!(p.eta[i] > 0.0) || (i > 0 && !(p.eta[i] > p.eta[i - 1])))
                throw std::invalid_argument("GumbelPPP: atoms must be positive and increasing");
        }
        return p;
    }
};

struct PartitionValue {
    double value = 0.0;       // truncated sum of eta_k^{-beta}
    double tail_bound = 0.0;  // expected mass beyond eta_N: eta_N^{1-beta}/(beta-1)
    double beta = 0.0;
};

inline GumbelPPP sample_ppp(std::size_t n_atoms, std::uint64_t seed) {
    if (n_atoms < 1) throw std::invalid_argument("sample_ppp: n_atoms must be >= 1");
    GumbelPPP p;
    p.seed = seed;
    p.eta.resize(n_atoms);
    Rng rng(seed);
    double acc = 0.0;
    for (auto& e : p.eta) {
        acc += rng.exponential();
        e = acc;
    }
    return p;
}

namespace detail {
inline void check_range(const GumbelPPP& ppp, double beta) {
    if (ppp.eta.empty()) throw std::invalid_argument("partition_function: empty process");
    if (!(beta > 1.0)) throw std::domain_error("partition_function: beta must be > 1");
    if (-beta * std::log(ppp.eta.front()) > 700.0)
        throw std::range_error("partition_function: eta_1^{-beta} exceeds floating range");
}
}  // namespace detail

inline PartitionValue partition_function(const GumbelPPP& ppp, double beta) {
    detail::check_range(ppp, beta);
    KahanSum s;
    for (double e : ppp.eta) s.add(std::pow(e, -beta));
    PartitionValue out;
    out.value = s.value();
    out.beta = beta;
    out.tail_bound = std::pow(ppp.eta.back(), 1.0 - beta) / (beta - 1.0);
    return out;
}

struct RatioStatistics {
    double z = 0.0;
    double zprime_over_z = 0.0;
    double log_z = 0.0;
};

// Z and Z' = sum xi e^{beta xi} in one pass over the atoms.
inline RatioStatistics ratio_statistics(const GumbelPPP& ppp, double beta) {
    detail::check_range(ppp, beta);
    KahanSum z, zp;
    for (double e : ppp.eta) {
        const double le = std::log(e);
        const double w = std::exp(-beta * le);
        z.add(w);
        zp.add(-le * w);
    }
    RatioStatistics out;
    out.z = z.value();
    out.zprime_over_z = zp.value() / out.z;
    out.log_z = std::log(out.z);
    return out;
}

// --- tail compensation -------------------------------------------------
// Conditionally on eta_N, the atoms beyond eta_N form a fresh unit-rate PPP,
// so the omitted mass has exact conditional mean eta_N^{1-beta}/(beta-1) and
// conditional std eta_N^{1/2-beta}/sqrt(2 beta - 1). Estimators near beta = 1
// add the mean back ("compensated" values); the residual is zero-mean noise
// that vanishes polynomially in N instead of the bias's (beta-1) log N rate.

inline double tail_mean_mass(double eta_last, double beta) {
    return std::pow(eta_last, 1.0 - beta) / (beta - 1.0);
}

inline double tail_std_mass(double eta_last, double beta) {
    return std::sqrt(std::pow(eta_last, 1.0 - 2.0 * beta) / (2.0 * beta - 1.0));
}

// E[ sum_{k>N} (-log x) x^{-beta} | eta_N ]
inline double tail_mean_logweighted(double eta_last, double beta) {
    const double bm1 = beta - 1.0;
    return -std::pow(eta_last, -bm1) * (bm1 * std::log(eta_last) + 1.0) / (bm1 * bm1);
}

inline double partition_compensated(const GumbelPPP& ppp, double beta) {
    const PartitionValue p = partition_function(ppp, beta);
    return p.value + p.tail_bound;
}

// (Z*, Z'*) with both sums tail-compensated, for the small-(beta-1) regime.
inline std::pair<double, double> partition_pair_compensated(const GumbelPPP& ppp, double beta) {
    detail::check_range(ppp, beta);
    KahanSum z, zp;
    for (double e : ppp.eta) {
        const double le = std::log(e);
        const double w = std::exp(-beta * le);
        z.add(w);
        zp.add(-le * w);
    }
    const double last = ppp.eta.back();
    return {z.value() + tail_mean_mass(last, beta),
            zp.value() + tail_mean_logweighted(last, beta)};
}

// Number of atoms that keeps the residual (compensated) truncation noise
// far below every tolerance used in the experiments.
inline std::size_t atoms_for_beta(double beta, std::size_t floor_atoms = 400,
                                  std::size_t cap = 40000) {
    const double want = 12.0 / (beta - 1.0);
    const double n = std::max(static_cast<double>(floor_atoms), want);
    return static_cast<std::size_t>(std::min(n, static_cast<double>(cap)));
}

}  // namespace sdppp

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "sdppp/rng.hpp"
#include "sdppp/stats.hpp"

namespace sdppp::bbm {

// Event-driven binary branching Brownian motion, branching rate 1/2, unit
// diffusion; no time discretization. Genealogy kept as parent pointers with
// branch times, MRCA by two-pointer ascent.

struct BBMForest {
    struct Node {
        int parent = -1;
        double t_birth = 0.0;
        double t_end = 0.0;   // branch time, or the horizon for leaves
        double x_end = 0.0;   // position at t_end
        bool leaf = false;
    };
    std::vector<Node> nodes;
    std::vector<int> leaves;
    double horizon = 0.0;
    std::uint64_t seed = 0;
    bool capped = false;  // population cap hit; partial forest, not usable

    std::size_t population() const { return leaves.size(); }
};

inline BBMForest simulate(double t, std::size_t max_population, std::uint64_t seed) {
    if (!(t >= 0.0)) throw std::domain_error("bbm::simulate: t must be >= 0");
    BBMForest forest;
    forest.horizon = t;
    forest.seed = seed;
    Rng rng(seed);
    struct Job { int parent; double t0; double x0; };
    std::vector<Job> stack;
    stack.push_back({-1, 0.0, 0.0});
    while (!stack.empty()) {
        const Job job = stack.back();
        stack.pop_back();
        if (forest.nodes.size() >= max_population) {
            forest.capped = true;
            break;
        }
        const double tau = rng.exponential(2.0);  // rate 1/2
        BBMForest::Node node;
        node.parent = job.parent;
        node.t_birth = job.t0;
        const int idx = static_cast<int>(forest.nodes.size());
        if (job.t0 + tau >= t) {
            node.t_end = t;
            node.x_end = job.x0 + rng.normal() * std::sqrt(t - job.t0);
            node.leaf = true;
            forest.nodes.push_back(node);
            forest.leaves.push_back(idx);
        } else {
            node.t_end = job.t0 + tau;
            node.x_end = job.x0 + rng.normal() * std::sqrt(tau);
            node.leaf = false;
            forest.nodes.push_back(node);
            stack.push_back({idx, node.t_end, node.x_end});
            stack.push_back({idx, node.t_end, node.x_end});
        }
    }
    return forest;
}

struct FreeEnergySample {
    double f = 0.0;
    double t = 0.0;
    double beta = 0.0;
};

inline double log_partition(const BBMForest& forest, double beta) {
    if (forest.capped)
        throw std::invalid_argument("bbm: capped forest must not feed statistics");
    double mx = -1e300;
    for (int i : forest.leaves) mx = std::max(mx, forest.nodes[i].x_end);
    KahanSum s;
    for (int i : forest.leaves) s.add(std::exp(beta * (forest.nodes[i].x_end - mx)));
    return beta * mx + std::log(s.value());
}

inline FreeEnergySample free_energy(const BBMForest& forest, double beta) {
    if (!(forest.horizon > 0.0)) throw std::domain_error("free_energy: need t > 0");
    return {log_partition(forest, beta) / forest.horizon, forest.horizon, beta};
}

// normalized MRCA time of two leaves: the branch time of their deepest common
// ancestral particle over the horizon; q = 1 when the leaves coincide.
inline double overlap_q(const BBMForest& forest, int leaf_a, int leaf_b) {
    int a = leaf_a, b = leaf_b;
    while (a != b) {
        if (forest.nodes[a].t_birth >= forest.nodes[b].t_birth)
            a = forest.nodes[a].parent;
        else
            b = forest.nodes[b].parent;
        if (a < 0 || b < 0) throw std::logic_error("overlap_q: broken genealogy");
    }
    return forest.nodes[a].t_end / forest.horizon;
}

struct Histogram {
    std::vector<double> edges;  // size bins+1
    std::vector<double> mass;   // size bins, sums to 1
    double mass_between(double lo, double hi) const {
        double m = 0.0;
        for (std::size_t k = 0; k < mass.size(); ++k) {
            const double c = 0.5 * (edges[k] + edges[k + 1]);
            if (c > lo && c < hi) m += mass[k];
        }
        return m;
    }
};

// Gibbs sampler over leaves at inverse temperature beta: inverse-CDF draws.
class GibbsSampler {
  public:
    GibbsSampler(const BBMForest& forest, double beta) {
        if (forest.capped)
            throw std::invalid_argument("bbm: capped forest must not feed statistics");
        double mx = -1e300;
        for (int i : forest.leaves) mx = std::max(mx, forest.nodes[i].x_end);
        cdf_.reserve(forest.leaves.size());
        double acc = 0.0;
        for (int i : forest.leaves) {
            acc += std::exp(beta * (forest.nodes[i].x_end - mx));
            cdf_.push_back(acc);
        }
        total_ = acc;
    }
    int draw(const BBMForest& forest, Rng& rng) const {
        const double u = rng.u01() * total_;
        const auto it = std::lower_bound(cdf_.begin(), cdf_.end(), u);
        const std::size_t k = std::min<std::size_t>(it - cdf_.begin(), cdf_.size() - 1);
        return forest.leaves[k];
    }

  private:
    std::vector<double> cdf_;
    double total_ = 0.0;
};

inline Histogram empirical_overlap(const BBMForest& forest, double beta, double beta_prime,
                                   std::uint64_t n_pairs, std::uint64_t seed,
                                   std::size_t bins = 50) {
    GibbsSampler ga(forest, beta);
    GibbsSampler gb(forest, beta_prime);
    Rng rng(derive_seed(seed, 0x6f6c6170ULL));
    Histogram h;
    h.edges.resize(bins + 1);
    h.mass.assign(bins, 0.0);
    for (std::size_t k = 0; k <= bins; ++k)
        h.edges[k] = static_cast<double>(k) / static_cast<double>(bins);
    for (std::uint64_t p = 0; p < n_pairs; ++p) {
        const int x = ga.draw(forest, rng);
        const int y = gb.draw(forest, rng);
        const double q = overlap_q(forest, x, y);
        auto k = static_cast<std::size_t>(q * static_cast<double>(bins));
        if (k >= bins) k = bins - 1;
        h.mass[k] += 1.0;
    }
    for (auto& m : h.mass) m /= static_cast<double>(n_pairs);
    return h;
}

inline double recentered_max(const BBMForest& forest) {
    if (forest.capped)
        throw std::invalid_argument("bbm: capped forest must not feed statistics");
    if (!(forest.horizon > 0.0)) throw std::domain_error("recentered_max: need t > 0");
    double mx = -1e300;
    for (int i : forest.leaves) mx = std::max(mx, forest.nodes[i].x_end);
    const double t = forest.horizon;
    return mx - (t - 1.5 * std::log(t));
}

// REM comparator: floor(e^{t/2}) i.i.d. Gaussians of variance t, recentered
// with the (1/2) log t correction; the log-correction contrast diagnostic.
inline double rem_recentered_max(double t, std::uint64_t seed) {
    if (!(t > 0.0)) throw std::domain_error("rem_recentered_max: need t > 0");
    const auto n = static_cast<std::uint64_t>(std::floor(std::exp(t / 2.0)));
    Rng rng(seed);
    double mx = -1e300;
    const double sd = std::sqrt(t);
    for (std::uint64_t i = 0; i < n; ++i) mx = std::max(mx, rng.normal() * sd);
    return mx - (t - 0.5 * std::log(t));
}

}  // namespace sdppp::bbm

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace sdppp {

// Neumaier compensated accumulator. Reductions elsewhere promise order
// insensitivity up to this accumulator's tolerance.
struct KahanSum {
    double sum = 0.0;
    double comp = 0.0;
    void add(double x) {
        const double t = sum + x;
        if (std::abs(sum) >= std::abs(x))
            comp += (sum - t) + x;
        else
            comp += (x - t) + sum;
        sum = t;
    }
    double value() const { return sum + comp; }
};

struct OnlineStats {
    std::uint64_t n = 0;
    double mean = 0.0;
    double m2 = 0.0;
    void add(double x) {
        ++n;
        const double d = x - mean;
        mean += d / static_cast<double>(n);
        m2 += d * (x - mean);
    }
    double variance() const { return n > 1 ? m2 / static_cast<double>(n - 1) : 0.0; }
    double stddev() const { return std::sqrt(variance()); }
    double stderror() const { return n > 0 ? std::sqrt(variance() / static_cast<double>(n)) : 0.0; }
};

// Monte-Carlo scalar with its provenance, the shape every estimator returns.
struct EstimateWithError {
    double mean = 0.0;
    double stderr_ = 0.0;
    std::uint64_t n_samples = 0;
    std::uint64_t seed = 0;
};

struct FitResult {
    double c1 = 0.0, c1_se = 0.0;
    double c2 = 0.0, c2_se = 0.0;
    bool conditioning_warning = false;
};

// Weighted least squares for y ~ c1*x1 + c2*x2 (no intercept).
inline FitResult weighted_fit2(const std::vector<double>& x1, const std::vector<double>& x2,
                               const std::vector<double>& y, const std::vector<double>& se) {
    const std::size_t n = y.size();
    if (x1.size() != n || x2.size() != n || se.size() != n || n < 2)
        throw std::invalid_argument("weighted_fit2: inconsistent or insufficient data");
    double a11 = 0, a12 = 0, a22 = 0, b1 = 0, b2 = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double w = 1.0 / (se[i] * se[i]);
        a11 += w * x1[i] * x1[i];
        a12 += w * x1[i] * x2[i];
        a22 += w * x2[i] * x2[i];
        b1 += w * x1[i] * y[i];
        b2 += w * x2[i] * y[i];
    }
    const double det = a11 * a22 - a12 * a12;
    FitResult r;
    r.conditioning_warning = !(det > 1e-12 * a11 * a22);
    if (det == 0.0) throw std::runtime_error("weighted_fit2: singular design");
    r.c1 = (a22 * b1 - a12 * b2) / det;
    r.c2 = (a11 * b2 - a12 * b1) / det;
    r.c1_se = std::sqrt(a22 / det);
    r.c2_se = std::sqrt(a11 / det);
    return r;
}

// Unweighted slope/intercept fit, used by log-log exponent scans.
inline void linear_fit(const std::vector<double>& x, const std::vector<double>& y,
                       double& slope, double& intercept, double& slope_se) {
    const std::size_t n = x.size();
    if (n < 2 || y.size() != n) throw std::invalid_argument("linear_fit: need >= 2 points");
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        sx += x[i]; sy += y[i]; sxx += x[i] * x[i]; sxy += x[i] * y[i];
    }
    const double nn = static_cast<double>(n);
    const double det = nn * sxx - sx * sx;
    slope = (nn * sxy - sx * sy) / det;
    intercept = (sy - slope * sx) / nn;
    double ss = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double r = y[i] - slope * x[i] - intercept;
        ss += r * r;
    }
    slope_se = n > 2 ? std::sqrt(ss / static_cast<double>(n - 2) * nn / det) : 0.0;
}

// Two-sample Kolmogorov-Smirnov statistic and asymptotic p-value.
struct KsResult {
    double d = 0.0;
    double p_value = 0.0;
};

inline KsResult ks_two_sample(std::vector<double> a, std::vector<double> b) {
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    const double na = static_cast<double>(a.size());
    const double nb = static_cast<double>(b.size());
    std::size_t i = 0, j = 0;
    double d = 0.0;
    while (i < a.size() && j < b.size()) {
        const double x = std::min(a[i], b[j]);
        while (i < a.size() && a[i] <= x) ++i;
        while (j < b.size() && b[j] <= x) ++j;
        d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
    }
    const double en = std::sqrt(na * nb / (na + nb));
    const double lambda = (en + 0.12 + 0.11 / en) * d;
    double p = 0.0;
    double sign = 1.0;
    for (int k = 1; k <= 100; ++k) {
        const double term = std::exp(-2.0 * k * k * lambda * lambda);
        p += 2.0 * sign * term;
        sign = -sign;
        if (term < 1e-12) break;
    }
    return {d, std::min(1.0, std::max(0.0, p))};
}

// One-sided Welch test that mean(a) > mean(b); returns p-value via the normal
// approximation (sample sizes here are always >= 10^4).
inline double welch_one_sided_p(const OnlineStats& a, const OnlineStats& b) {
    const double se = std::sqrt(a.variance() / static_cast<double>(a.n) +
                                b.variance() / static_cast<double>(b.n));
    const double t = (a.mean - b.mean) / se;
    return 0.5 * std::erfc(t / std::sqrt(2.0));
}

inline double quantile_sorted(const std::vector<double>& sorted, double q) {
    if (sorted.empty()) throw std::invalid_argument("quantile of empty sample");
    const double pos = q * static_cast<double>(sorted.size() - 1);
    const std::size_t lo = static_cast<std::size_t>(pos);
    if (lo + 1 >= sorted.size()) return sorted.back();
    const double frac = pos - static_cast<double>(lo);
    return sorted[lo] * (1.0 - frac) + sorted[lo + 1] * frac;
}

inline double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    return quantile_sorted(v, 0.5);
}

}  // namespace sdppp

#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <stdexcept>
#include <vector>

namespace sdppp {

struct IntegralValue {
    double value = 0.0;
    double abs_err = 0.0;
};

namespace detail {

// Gauss 7 / Kronrod 15 nodes and weights on [-1,1].
inline constexpr double kKronrodNodes[8] = {
    0.000000000000000, 0.207784955007898, 0.405845151377397, 0.586087235467691,
    0.741531185599394, 0.864864423359769, 0.949107912342759, 0.991455371120813,
};
inline constexpr double kKronrodWeights[8] = {
    0.209482141084728, 0.204432940075298, 0.190350578064785, 0.169004726639267,
    0.140653259715525, 0.104790010322250, 0.063092092629979, 0.022935322010529,
};
inline constexpr double kGaussWeights[4] = {
    0.417959183673469, 0.381830050505119, 0.279705391489277, 0.129484966168870,
};

template <class F>
IntegralValue gk15(const F& f, double a, double b) {
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    const double f0 = f(c);
    double kron = kKronrodWeights[0] * f0;
    double gauss = kGaussWeights[0] * f0;
    for (int i = 1; i < 8; ++i) {
        const double dx = h * kKronrodNodes[i];
        const double fs = f(c + dx) + f(c - dx);
        kron += kKronrodWeights[i] * fs;
        if (i % 2 == 0) gauss += kGaussWeights[i / 2] * fs;
    }
    kron *= h;
    gauss *= h;
    // |K15 - G7| is a conservative, scale-invariant error proxy for K15
    const double err = std::abs(kron - gauss) + 1e-16 * std::abs(kron);
    return {kron, err};
}

}  // namespace detail

// Adaptive interval-splitting integration of f over [a,b].
template <class F>
IntegralValue integrate_adaptive(const F& f, double a, double b, double abs_tol,
                                 std::size_t max_panels = 4000) {
    struct Panel { double a, b, value, err; };
    std::vector<Panel> heap;
    auto first = detail::gk15(f, a, b);
    heap.push_back({a, b, first.value, first.abs_err});
    double total = first.value, total_err = first.abs_err;
    while (total_err > abs_tol && heap.size() < max_panels) {
        std::size_t worst = 0;
        for (std::size_t i = 1; i < heap.size(); ++i)
            if (heap[i].err > heap[worst].err) worst = i;
        const Panel p = heap[worst];
        if (p.b - p.a < 1e-300) break;
        const double m = 0.5 * (p.a + p.b);
        const auto l = detail::gk15(f, p.a, m);
        const auto r = detail::gk15(f, m, p.b);
        total += l.value + r.value - p.value;
        total_err += l.abs_err + r.abs_err - p.err;
        heap[worst] = {p.a, m, l.value, l.abs_err};
        heap.push_back({m, p.b, r.value, r.abs_err});
    }
    if (total_err > abs_tol && heap.size() >= max_panels)
        throw std::runtime_error("integrate_adaptive: did not converge within panel budget");
    return {total, std::max(total_err, 0.0)};
}

// Integrate over a knot partition; each panel adapts separately.
template <class F>
IntegralValue integrate_knots(const F& f, const std::vector<double>& knots, double abs_tol) {
    if (knots.size() < 2) throw std::invalid_argument("integrate_knots: need >= 2 knots");
    IntegralValue out;
    const double per = abs_tol / static_cast<double>(knots.size() - 1);
    for (std::size_t i = 0; i + 1 < knots.size(); ++i) {
        auto p = integrate_adaptive(f, knots[i], knots[i + 1], per);
        out.value += p.value;
        out.abs_err += p.abs_err;
    }
    return out;
}

// Integrate f over [a, inf) through the rational map x = a + t/(1-t).
template <class F>
IntegralValue integrate_semi_infinite(const F& f, double a, double abs_tol) {
    auto g = [&](double t) {
        const double om = 1.0 - t;
        const double x = a + t / om;
        return f(x) / (om * om);
    };
    return integrate_adaptive(g, 0.0, 1.0 - 1e-12, abs_tol);
}

}  // namespace sdppp

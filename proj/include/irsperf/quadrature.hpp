#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <vector>

#include "irsperf/errors.hpp"

namespace irsperf {

struct QuadResult {
    double value = 0.0;
    double error = 0.0;     // estimated absolute error
    int evaluations = 0;
    bool converged = false;
};

namespace detail {

// Gauss-Kronrod 7-15 nodes/weights on [-1,1].
// node, Gauss-7 weight (0 for Kronrod-only nodes), Kronrod-15 weight.
inline constexpr double kGk15[8][3] = {
    {0.000000000000000000, 0.417959183673469388, 0.209482141084727828},
    {0.405845151377397167, 0.381830050505118945, 0.190350578064785410},
    {0.741531185599394440, 0.279705391489276668, 0.140653259715525919},
    {0.949107912342758525, 0.129484966168869693, 0.063092092629978554},
    {0.207784955007898468, 0.0,                  0.204432940075298892},
    {0.586087235467691130, 0.0,                  0.169004726639267903},
    {0.864864423359769073, 0.0,                  0.104790010322250184},
    {0.991455371120812639, 0.0,                  0.022935322010529225},
};

template <class F>
inline void gk15(const F& f, double a, double b, double& value, double& err) {
    const double mid = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    const double f0 = f(mid);
    double g7 = kGk15[0][1] * f0;
    double k15 = kGk15[0][2] * f0;
    for (int i = 1; i < 8; ++i) {
        const double dx = half * kGk15[i][0];
        const double fi = f(mid + dx) + f(mid - dx);
        g7 += kGk15[i][1] * fi;
        k15 += kGk15[i][2] * fi;
    }
    g7 *= half;
    k15 *= half;
    value = k15;
    // standard QUADPACK-style error heuristic
    err = std::abs(k15 - g7);
    err = 200.0 * err * std::sqrt(200.0 * err > 1.0 ? 1.0 : 200.0 * err);
}

} // namespace detail

// Adaptive Gauss-Kronrod integration on a finite interval.
// Splits the worst interval first until |error| <= max(abs_tol, rel_tol*|I|).
// The interval starts pre-subdivided so that narrow interior features cannot
// alias the initial error estimate to zero.
template <class F>
QuadResult integrate(const F& f, double a, double b,
                     double abs_tol = 1e-10, double rel_tol = 1e-10,
                     int max_intervals = 4000, int initial_panels = 8) {
    QuadResult res;
    if (a == b) {
        res.converged = true;
        return res;
    }
    struct Seg { double a, b, value, error; };
    std::vector<Seg> segs;
    segs.reserve(64);
    double total = 0.0, total_err = 0.0;
    if (initial_panels < 1) initial_panels = 1;
    for (int i = 0; i < initial_panels; ++i) {
        const double lo = a + (b - a) * i / initial_panels;
        const double hi = a + (b - a) * (i + 1) / initial_panels;
        double v, e;
        detail::gk15(f, lo, hi, v, e);
        res.evaluations += 15;
        segs.push_back({lo, hi, v, e});
        total += v;
        total_err += e;
    }
    while (static_cast<int>(segs.size()) < max_intervals) {
        if (total_err <= abs_tol || total_err <= rel_tol * std::abs(total)) break;
        // bisect the segment with the largest error
        std::size_t worst = 0;
        for (std::size_t i = 1; i < segs.size(); ++i)
            if (segs[i].error > segs[worst].error) worst = i;
        const Seg s = segs[worst];
        if (!(s.b - s.a > std::numeric_limits<double>::epsilon() *
              (std::abs(s.a) + std::abs(s.b)) + 1e-300)) break;
        const double mid = 0.5 * (s.a + s.b);
        Seg left{s.a, mid, 0, 0}, right{mid, s.b, 0, 0};
        detail::gk15(f, left.a, left.b, left.value, left.error);
        detail::gk15(f, right.a, right.b, right.value, right.error);
        res.evaluations += 30;
        total += left.value + right.value - s.value;
        total_err += left.error + right.error - s.error;
        segs[worst] = left;
        segs.push_back(right);
    }
    // recompute totals to avoid drift from incremental updates
    total = 0.0;
    total_err = 0.0;
    for (const Seg& s : segs) {
        total += s.value;
        total_err += s.error;
    }
    res.value = total;
    res.error = total_err;
    res.converged = total_err <= abs_tol || total_err <= rel_tol * std::abs(total);
    return res;
}

// Integration over [a, +inf) via x = a + t/(1-t), t in [0,1).
template <class F>
QuadResult integrate_to_inf(const F& f, double a,
                            double abs_tol = 1e-10, double rel_tol = 1e-10,
                            int max_intervals = 4000) {
    auto g = [&f, a](double t) {
        const double om = 1.0 - t;
        const double x = a + t / om;
        const double jac = 1.0 / (om * om);
        const double fx = f(x);
        return fx == 0.0 ? 0.0 : fx * jac;
    };
    return integrate(g, 0.0, 1.0, abs_tol, rel_tol, max_intervals);
}

// Convenience wrapper that throws accuracy_error when the tolerance was not met.
template <class F>
double integrate_checked(const F& f, double a, double b,
                         double abs_tol = 1e-10, double rel_tol = 1e-10,
                         int max_intervals = 4000) {
    const QuadResult r = integrate(f, a, b, abs_tol, rel_tol, max_intervals);
    if (!r.converged)
        throw accuracy_error("adaptive quadrature did not converge", r.value, r.error);
    return r.value;
}

} // namespace irsperf

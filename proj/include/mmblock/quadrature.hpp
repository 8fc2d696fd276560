#pragma once

// Globally adaptive Simpson quadrature with an explicit accuracy contract: the
// result either meets the requested relative tolerance or NumericError is
// thrown carrying the accuracy that was reached.

#include <cmath>
#include <algorithm>
#include <queue>
#include <tuple>
#include <utility>
#include <limits>
#include <string>
#include <vector>

#include "errors.hpp"

namespace mmblock {

struct QuadratureResult {
    double value = 0.0;
    double error_estimate = 0.0;
    int evaluations = 0;
};

struct QuadratureOptions {
    double rel_tol = 1e-8;
    double abs_tol = 1e-300;
    int initial_panels = 16;
    int max_depth = 48;             ///< bisections of any one panel
    int max_evaluations = 2000000;  ///< integrand calls before giving up
};

namespace detail {

struct SimpsonPanel {
    double a, b, fa, fm, fb;
    double flm, frm;  // quarter points, already evaluated
    double value;     // Richardson-corrected two-half Simpson estimate
    double error;
    int depth;

    bool operator<(const SimpsonPanel& o) const { return error < o.error; }
};

template<class F>
SimpsonPanel make_panel(const F& f, int& evals, double a, double b, double fa, double fm, double fb, int depth)
{
    const double m = 0.5 * (a + b);
    const double flm = f(0.5 * (a + m));
    const double frm = f(0.5 * (m + b));
    evals += 2;
    const double h = b - a;
    const double whole = h / 6.0 * (fa + 4.0 * fm + fb);
    const double halves = h / 12.0 * (fa + 4.0 * flm + 2.0 * fm + 4.0 * frm + fb);
    const double delta = halves - whole;
    return {a, b, fa, fm, fb, flm, frm, halves + delta / 15.0, std::abs(delta) / 15.0, depth};
}

}  // namespace detail

/// Integral of f over [a, b] by globally adaptive Simpson: the panel with
/// the largest error estimate is bisected until the summed estimate meets
/// max(rel_tol |I|, abs_tol).
template<class F>
QuadratureResult integrate_adaptive(const F& f, double a, double b, const QuadratureOptions& opt = {})
{
    QuadratureResult out;
    if (!(b > a)) return out;

    int evals = 0;
    const int panels = std::max(1, opt.initial_panels);
    const double width = (b - a) / panels;
    std::priority_queue<detail::SimpsonPanel> open;
    double fa = f(a);
    ++evals;
    for (int i = 0; i < panels; ++i) {
        const double pa = a + i * width;
        const double pb = (i + 1 == panels) ? b : a + (i + 1) * width;
        const double fm = f(0.5 * (pa + pb));
        const double fb = f(pb);
        evals += 2;
        open.push(detail::make_panel(f, evals, pa, pb, fa, fm, fb, 0));
        fa = fb;
    }

    // Panels that cannot be split further are parked with their error.
    double parked_value = 0.0, parked_error = 0.0;
    bool exhausted = false;
    const auto totals = [&] {
        double v = parked_value, e = parked_error;
        auto copy = open;
        for (; !copy.empty(); copy.pop()) {
            v += copy.top().value;
            e += copy.top().error;
        }
        return std::pair{v, e};
    };

    auto [value, error] = totals();
    while (error > std::max(opt.rel_tol * std::abs(value), opt.abs_tol) && !open.empty()) {
        if (evals >= opt.max_evaluations) {
            exhausted = true;
            break;
        }
        const auto p = open.top();
        open.pop();
        const double m = 0.5 * (p.a + p.b);
        const bool resolvable =
            (p.b - p.a) > 4.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(m));
        if (p.depth >= opt.max_depth || !resolvable) {
            parked_value += p.value;
            parked_error += p.error;
            exhausted = true;
            std::tie(value, error) = totals();
            continue;
        }
        const auto l = detail::make_panel(f, evals, p.a, m, p.fa, p.flm, p.fm, p.depth + 1);
        const auto r = detail::make_panel(f, evals, m, p.b, p.fm, p.frm, p.fb, p.depth + 1);
        value += l.value + r.value - p.value;
        error += l.error + r.error - p.error;
        open.push(l);
        open.push(r);
        // Running sums drift; refresh them now and then.
        if (evals % 4096 < 4) std::tie(value, error) = totals();
    }
    std::tie(value, error) = totals();

    out.value = value;
    out.error_estimate = error;
    out.evaluations = evals;
    if (!std::isfinite(value)) throw NumericError("adaptive quadrature produced a non-finite value");
    if (exhausted && error > std::max(opt.rel_tol * std::abs(value), opt.abs_tol)) {
        throw NumericError("adaptive quadrature did not converge: achieved error " + std::to_string(error) +
                               " on [" + std::to_string(a) + ", " + std::to_string(b) + "]",
                           error);
    }
    return out;
}

template<class F>
double integrate(const F& f, double a, double b, double rel_tol = 1e-8)
{
    QuadratureOptions opt;
    opt.rel_tol = rel_tol;
    return integrate_adaptive(f, a, b, opt).value;
}

}  // namespace mmblock

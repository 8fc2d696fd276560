#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "errors.hpp"

namespace mmblock {

/// A density sampled on a uniform grid. Between nodes the density is the
/// linear interpolant, so the cdf is the running trapezoid sum and is
/// piecewise quadratic; all integrals below are exact for that interpolant.
class TabulatedDistribution {
  public:
    TabulatedDistribution() = default;

    /// Tabulate from density samples. With `normalize`, values are rescaled
    /// so the trapezoid mass is exactly one; raw_mass() keeps the original.
    static TabulatedDistribution from_pdf(double x0, double step, std::vector<double> pdf,
                                          bool normalize = false)
    {
        if (!(step > 0.0) || pdf.size() < 2)
            throw DomainError("TabulatedDistribution: need step > 0 and at least 2 nodes");
        TabulatedDistribution t;
        t.x0_ = x0;
        t.step_ = step;
        t.pdf_ = std::move(pdf);
        t.cdf_ = cumulative_trapezoid(t.pdf_, step);
        t.raw_mass_ = t.cdf_.back();
        if (normalize && t.raw_mass_ > 0.0) {
            const double k = 1.0 / t.raw_mass_;
            for (double& v : t.pdf_) v *= k;
            for (double& v : t.cdf_) v *= k;
            t.cdf_.back() = 1.0;
        }
        t.finish();
        return t;
    }

    /// Tabulate from cdf samples; the density is a central difference.
    static TabulatedDistribution from_cdf(double x0, double step, std::vector<double> cdf)
    {
        if (!(step > 0.0) || cdf.size() < 2)
            throw DomainError("TabulatedDistribution: need step > 0 and at least 2 nodes");
        TabulatedDistribution t;
        t.x0_ = x0;
        t.step_ = step;
        const std::size_t n = cdf.size();
        t.pdf_.resize(n);
        for (std::size_t i = 0; i < n; ++i) {
            const std::size_t lo = i == 0 ? 0 : i - 1;
            const std::size_t hi = i + 1 == n ? n - 1 : i + 1;
            t.pdf_[i] = (cdf[hi] - cdf[lo]) / (static_cast<double>(hi - lo) * step);
        }
        t.cdf_ = std::move(cdf);
        t.raw_mass_ = t.cdf_.back();
        t.mean_ = t.x0_;
        for (std::size_t i = 0; i + 1 < n; ++i)
            t.mean_ += 0.5 * step * ((1.0 - t.cdf_[i]) + (1.0 - t.cdf_[i + 1]));
        t.build_survival();
        t.from_cdf_ = true;
        return t;
    }

    std::size_t size() const { return pdf_.size(); }
    double x0() const { return x0_; }
    double step() const { return step_; }
    double x_max() const { return x0_ + step_ * static_cast<double>(size() - 1); }
    double abscissa(std::size_t i) const { return x0_ + step_ * static_cast<double>(i); }

    std::span<const double> pdf_values() const { return pdf_; }
    std::span<const double> cdf_values() const { return cdf_; }
    std::vector<double> grid() const
    {
        std::vector<double> g(size());
        for (std::size_t i = 0; i < g.size(); ++i) g[i] = abscissa(i);
        return g;
    }

    /// Mass after any normalization (cdf at the last node).
    double mass() const { return cdf_.empty() ? 0.0 : cdf_.back(); }
    /// Trapezoid mass of the density as originally supplied.
    double raw_mass() const { return raw_mass_; }
    double mean() const { return mean_; }

    /// Linear interpolation of the density; zero off the grid.
    double pdf_at(double x) const
    {
        if (x < x0_ || x > x_max()) return 0.0;
        auto [i, t] = locate(x);
        return pdf_[i] + (pdf_[i + 1] - pdf_[i]) * t / step_;
    }

    /// Exact cdf of the interpolated density; zero below, mass() above.
    double cdf_at(double x) const
    {
        if (x <= x0_) return 0.0;
        if (x >= x_max()) return mass();
        auto [i, t] = locate(x);
        if (from_cdf_) return cdf_[i] + (cdf_[i + 1] - cdf_[i]) * t / step_;
        return cdf_[i] + pdf_[i] * t + (pdf_[i + 1] - pdf_[i]) * t * t / (2.0 * step_);
    }

    /// Integral of (1 - F) over [0, x] for a distribution supported on
    /// [x0, inf) with x0 >= 0. Equals the mean as x -> inf when mass() == 1.
    double survival_integral(double x) const
    {
        if (x <= 0.0) return 0.0;
        if (x <= x0_) return x;
        if (x >= x_max()) return survival_.back() + (x - x_max()) * (1.0 - mass());
        auto [i, t] = locate(x);
        return survival_[i] + t - cell_cdf_integral(i, t);
    }

    /// Smallest grid-interpolated x with cdf_at(x) >= p.
    double quantile(double p) const
    {
        if (p <= 0.0) return x0_;
        if (p >= mass()) return x_max();
        auto it = std::lower_bound(cdf_.begin(), cdf_.end(), p);
        const std::size_t j = static_cast<std::size_t>(it - cdf_.begin());
        if (j == 0) return x0_;
        // Bisection inside the cell on the exact cdf.
        double lo = abscissa(j - 1), hi = abscissa(j);
        for (int k = 0; k < 60; ++k) {
            const double mid = 0.5 * (lo + hi);
            (cdf_at(mid) < p ? lo : hi) = mid;
        }
        return 0.5 * (lo + hi);
    }

    /// Checks the invariants of a proper (normalized) tabulated density.
    bool is_normalized(double tol = 1e-6) const
    {
        if (std::abs(mass() - 1.0) > tol) return false;
        for (std::size_t i = 0; i + 1 < cdf_.size(); ++i)
            if (cdf_[i + 1] < cdf_[i] - 1e-15) return false;
        return std::all_of(pdf_.begin(), pdf_.end(), [](double v) { return v >= 0.0; });
    }

    /// Plain trapezoid integral of x * pdf over the grid.
    double trapezoid_first_moment() const
    {
        double s = 0.0;
        for (std::size_t i = 0; i + 1 < size(); ++i)
            s += 0.5 * step_ * (abscissa(i) * pdf_[i] + abscissa(i + 1) * pdf_[i + 1]);
        return s;
    }

  private:
    static std::vector<double> cumulative_trapezoid(const std::vector<double>& f, double h)
    {
        std::vector<double> c(f.size(), 0.0);
        for (std::size_t i = 1; i < f.size(); ++i) c[i] = c[i - 1] + 0.5 * h * (f[i - 1] + f[i]);
        return c;
    }

    std::pair<std::size_t, double> locate(double x) const
    {
        const double u = (x - x0_) / step_;
        std::size_t i = static_cast<std::size_t>(u);
        if (i + 1 >= size()) i = size() - 2;
        return {i, x - abscissa(i)};
    }

    // Integral of the cdf over [x_i, x_i + t].
    double cell_cdf_integral(std::size_t i, double t) const
    {
        if (from_cdf_) return cdf_[i] * t + (cdf_[i + 1] - cdf_[i]) * t * t / (2.0 * step_);
        return cdf_[i] * t + pdf_[i] * t * t / 2.0 + (pdf_[i + 1] - pdf_[i]) * t * t * t / (6.0 * step_);
    }

    void build_survival()
    {
        survival_.assign(size(), 0.0);
        survival_[0] = std::max(x0_, 0.0);
        for (std::size_t i = 0; i + 1 < size(); ++i)
            survival_[i + 1] = survival_[i] + step_ - cell_cdf_integral(i, step_);
    }

    void finish()
    {
        // Exact first moment of the piecewise-linear density.
        double m = 0.0;
        for (std::size_t i = 0; i + 1 < size(); ++i) {
            const double a = abscissa(i), b = abscissa(i + 1);
            m += step_ / 6.0 * (a * (2.0 * pdf_[i] + pdf_[i + 1]) + b * (pdf_[i] + 2.0 * pdf_[i + 1]));
        }
        mean_ = m;
        build_survival();
    }

    double x0_ = 0.0;
    double step_ = 1.0;
    std::vector<double> pdf_;
    std::vector<double> cdf_;
    std::vector<double> survival_;
    double raw_mass_ = 0.0;
    double mean_ = 0.0;
    bool from_cdf_ = false;
};

}  // namespace mmblock

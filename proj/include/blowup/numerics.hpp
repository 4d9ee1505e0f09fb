#pragma once

// Shared numerical plumbing: adaptive quadrature, bracketing inversion of
// monotone maps, and shape-preserving interpolation of tabulated data.

#include "blowup/errors.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/tools/toms748_solve.hpp>

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <queue>
#include <span>
#include <string>
#include <vector>

namespace blowup {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

using RealFn = std::function<double(double)>;

struct QuadTolerance {
    double abs = 1e-12;
    double rel = 1e-10;
    std::size_t max_intervals = 4000;
    /// When positive, integrate() returns a non-converged result whose error
    /// estimate is still below accept_rel*|I| instead of throwing. For
    /// integrands carrying round-off noise, e.g. differences of weights.
    double accept_rel = 0.0;
};

struct QuadResult {
    double value = 0.0;
    double error = 0.0;
    std::size_t intervals = 0;
    bool converged = true;
};

/// Globally adaptive Gauss–Kronrod (G10/K21 panels, worst panel bisected first).
/// Stops once the summed error estimate is below max(abs, rel*|I|).
/// Never throws on non-convergence; see integrate() for the throwing variant.
template <class F>
QuadResult integrate_adaptive(F&& f, double a, double b, const QuadTolerance& tol = {}) {
    using GK = boost::math::quadrature::gauss_kronrod<double, 21>;
    if (a == b) return {};
    double sign = 1.0;
    if (a > b) {
        std::swap(a, b);
        sign = -1.0;
    }
    struct Panel {
        double lo, hi, value, error;
        bool operator<(const Panel& o) const { return error < o.error; }
    };
    auto panel = [&](double lo, double hi) {
        double err = 0.0;
        auto g = [&](double x) { return static_cast<double>(f(x)); };
        double v = GK::integrate(g, lo, hi, 0, 0.0, &err);
        // Boost reports the single-panel error on the reference interval [-1, 1].
        err *= 0.5 * (hi - lo);
        if (!std::isfinite(v) || !std::isfinite(err))
            throw NumericFailure("integrand is not finite on [" + std::to_string(lo) + ", " +
                                     std::to_string(hi) + "]",
                                 v);
        return Panel{lo, hi, v, err};
    };

    std::priority_queue<Panel> heap;
    Panel first = panel(a, b);
    double total = first.value;
    double total_err = first.error;
    heap.push(first);
    std::size_t count = 1;
    auto good_enough = [&] {
        return total_err <= std::max(tol.abs, tol.rel * std::abs(total));
    };
    while (!good_enough()) {
        if (count >= tol.max_intervals) {
            return {sign * total, total_err, count, false};
        }
        Panel worst = heap.top();
        double mid = 0.5 * (worst.lo + worst.hi);
        if (!(mid > worst.lo && mid < worst.hi)) {
            // Panel cannot be split further in double precision.
            return {sign * total, total_err, count, false};
        }
        heap.pop();
        Panel left = panel(worst.lo, mid);
        Panel right = panel(mid, worst.hi);
        total += left.value + right.value - worst.value;
        total_err += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
        ++count;
        if (count % 64 == 0) {
            // Re-sum to stop cancellation drift in the running totals.
            auto copy = heap;
            total = 0.0;
            total_err = 0.0;
            while (!copy.empty()) {
                total += copy.top().value;
                total_err += copy.top().error;
                copy.pop();
            }
        }
    }
    return {sign * total, total_err, count, true};
}

/// Adaptive quadrature that throws NumericFailure (carrying the partial value)
/// when the tolerance cannot be met.
template <class F>
double integrate(F&& f, double a, double b, const QuadTolerance& tol = {}) {
    QuadResult r = integrate_adaptive(f, a, b, tol);
    if (!r.converged && !(tol.accept_rel > 0.0 && r.error <= tol.accept_rel * std::abs(r.value)))
        throw NumericFailure("quadrature did not converge on [" + std::to_string(a) + ", " +
                                 std::to_string(b) + "]",
                             r.value);
    return r.value;
}

/// Breakpoints for integrating over [a, b] with b/a spanning many decades:
/// a, then successive powers of `ratio`, then b.
std::vector<double> geometric_breaks(double a, double b, double ratio = 10.0);

/// Sum of adaptive integrals over consecutive breakpoint intervals.
template <class F>
double integrate_piecewise(F&& f, std::span<const double> breaks, const QuadTolerance& tol = {}) {
    double sum = 0.0;
    for (std::size_t i = 1; i < breaks.size(); ++i) sum += integrate(f, breaks[i - 1], breaks[i], tol);
    return sum;
}

/// n points log-spaced on [lo, hi], inclusive.
std::vector<double> log_grid(double lo, double hi, std::size_t n);
/// n points uniformly spaced on [lo, hi], inclusive.
std::vector<double> linear_grid(double lo, double hi, std::size_t n);

/// Inverse of a strictly increasing map g: [0, inf) -> [0, inf) with g(0) = 0.
/// The bracket starts at [0, 1] and is grown (or shrunk) geometrically by a
/// factor of two, then closed by TOMS 748. Never uses derivatives.
template <class G>
double invert_increasing(G&& g, double y) {
    if (std::isnan(y)) throw DomainError("cannot invert at NaN");
    if (y < 0.0) throw DomainError("inverse requested at negative value " + std::to_string(y));
    if (y == 0.0) return 0.0;
    if (std::isinf(y)) return kInf;

    double lo = 0.0;
    double hi = 1.0;
    double ghi = g(hi);
    if (ghi < y) {
        do {
            lo = hi;
            hi *= 2.0;
            if (!std::isfinite(hi))
                throw NumericFailure("no bracket found for inverse at " + std::to_string(y), lo);
            ghi = g(hi);
        } while (ghi < y);
    } else {
        lo = 0.5 * hi;
        double glo = g(lo);
        while (glo > y) {
            hi = lo;
            ghi = glo;
            lo *= 0.5;
            if (lo == 0.0) return 0.0;
            glo = g(lo);
        }
        if (glo == y) return lo;
    }
    if (ghi == y) return hi;

    std::uintmax_t max_iter = 200;
    auto res = boost::math::tools::toms748_solve(
        [&](double t) { return g(t) - y; }, lo, hi, boost::math::tools::eps_tolerance<double>(52),
        max_iter);
    return 0.5 * (res.first + res.second);
}

/// Shape-preserving piecewise cubic Hermite interpolant (Fritsch–Carlson
/// slopes). Extrapolates linearly with the end slopes.
class MonotoneCubic {
public:
    MonotoneCubic() = default;
    MonotoneCubic(std::vector<double> x, std::vector<double> y);

    double operator()(double x) const;
    std::span<const double> x() const { return x_; }
    std::span<const double> y() const { return y_; }

private:
    std::vector<double> x_, y_, d_;
};

/// Positive function given by (t, value) pairs, interpolated monotonically in
/// log-log coordinates and extended as power laws beyond the table.
class LogLogTable {
public:
    LogLogTable() = default;
    LogLogTable(std::vector<double> t, std::vector<double> values);

    double operator()(double t) const;
    const std::vector<double>& abscissae() const { return t_; }
    const std::vector<double>& values() const { return v_; }

private:
    std::vector<double> t_, v_;
    MonotoneCubic log_interp_;
};

/// Nonnegative function with f(0) = 0 given by (t, value) pairs on t >= 0,
/// interpolated monotonically in linear coordinates.
class LinearTable {
public:
    LinearTable() = default;
    LinearTable(std::vector<double> t, std::vector<double> values);

    double operator()(double t) const;
    const std::vector<double>& abscissae() const { return t_; }
    const std::vector<double>& values() const { return v_; }

private:
    std::vector<double> t_, v_;
    MonotoneCubic interp_;
};

}  // namespace blowup

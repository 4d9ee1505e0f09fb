#include "blowup/numerics.hpp"

#include <algorithm>

namespace blowup {

std::vector<double> geometric_breaks(double a, double b, double ratio) {
    std::vector<double> out{a};
    if (!(b > a)) return out;
    double x = a > 0.0 ? a * ratio : 1.0;
    if (a <= 0.0 && b > 1.0) {
        out.push_back(1.0);
        x = ratio;
    }
    while (x < b) {
        if (x > out.back()) out.push_back(x);
        x *= ratio;
    }
    if (b > out.back()) out.push_back(b);
    return out;
}

std::vector<double> log_grid(double lo, double hi, std::size_t n) {
    if (n < 2 || !(lo > 0.0) || !(hi > lo)) throw DomainError("log_grid needs 0 < lo < hi and n >= 2");
    std::vector<double> g(n);
    double a = std::log(lo), b = std::log(hi);
    for (std::size_t i = 0; i < n; ++i) g[i] = std::exp(a + (b - a) * double(i) / double(n - 1));
    g.front() = lo;
    g.back() = hi;
    return g;
}

std::vector<double> linear_grid(double lo, double hi, std::size_t n) {
    if (n < 2 || !(hi > lo)) throw DomainError("linear_grid needs lo < hi and n >= 2");
    std::vector<double> g(n);
    for (std::size_t i = 0; i < n; ++i) g[i] = lo + (hi - lo) * double(i) / double(n - 1);
    g.back() = hi;
    return g;
}

namespace {

double end_slope(double h0, double h1, double d0, double d1) {
    // Three-point formula with shape-preserving clamps.
    double d = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
    if (d * d0 <= 0.0) return 0.0;
    if (d0 * d1 <= 0.0 && std::abs(d) > std::abs(3.0 * d0)) return 3.0 * d0;
    return d;
}

}  // namespace

MonotoneCubic::MonotoneCubic(std::vector<double> x, std::vector<double> y)
    : x_(std::move(x)), y_(std::move(y)) {
    const std::size_t n = x_.size();
    if (n < 2 || y_.size() != n) throw ConfigError("interpolation table needs at least two (x, y) pairs");
    for (std::size_t i = 1; i < n; ++i)
        if (!(x_[i] > x_[i - 1])) throw ConfigError("interpolation abscissae must be strictly increasing");
    std::vector<double> h(n - 1), delta(n - 1);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        h[i] = x_[i + 1] - x_[i];
        delta[i] = (y_[i + 1] - y_[i]) / h[i];
    }
    d_.assign(n, 0.0);
    if (n == 2) {
        d_[0] = d_[1] = delta[0];
        return;
    }
    for (std::size_t k = 1; k + 1 < n; ++k) {
        if (delta[k - 1] * delta[k] <= 0.0) continue;
        double w1 = 2.0 * h[k] + h[k - 1];
        double w2 = h[k] + 2.0 * h[k - 1];
        d_[k] = (w1 + w2) / (w1 / delta[k - 1] + w2 / delta[k]);
    }
    d_[0] = end_slope(h[0], h[1], delta[0], delta[1]);
    d_[n - 1] = end_slope(h[n - 2], h[n - 3], delta[n - 2], delta[n - 3]);
}

double MonotoneCubic::operator()(double x) const {
    const std::size_t n = x_.size();
    if (x <= x_.front()) return y_.front() + d_.front() * (x - x_.front());
    if (x >= x_.back()) return y_.back() + d_.back() * (x - x_.back());
    std::size_t i = std::upper_bound(x_.begin(), x_.end(), x) - x_.begin() - 1;
    if (i >= n - 1) i = n - 2;
    double h = x_[i + 1] - x_[i];
    double s = (x - x_[i]) / h;
    double s2 = s * s, s3 = s2 * s;
    double h00 = 2 * s3 - 3 * s2 + 1, h10 = s3 - 2 * s2 + s;
    double h01 = -2 * s3 + 3 * s2, h11 = s3 - s2;
    return h00 * y_[i] + h10 * h * d_[i] + h01 * y_[i + 1] + h11 * h * d_[i + 1];
}

LogLogTable::LogLogTable(std::vector<double> t, std::vector<double> values)
    : t_(std::move(t)), v_(std::move(values)) {
    if (t_.size() != v_.size()) throw ConfigError("table columns differ in length");
    std::vector<double> lx(t_.size()), ly(v_.size());
    for (std::size_t i = 0; i < t_.size(); ++i) {
        if (!(t_[i] > 0.0) || !(v_[i] > 0.0))
            throw ConfigError("log-log table needs positive abscissae and values");
        lx[i] = std::log(t_[i]);
        ly[i] = std::log(v_[i]);
    }
    log_interp_ = MonotoneCubic(std::move(lx), std::move(ly));
}

double LogLogTable::operator()(double t) const {
    if (!(t > 0.0)) throw DomainError("log-log table evaluated at non-positive argument");
    return std::exp(log_interp_(std::log(t)));
}

LinearTable::LinearTable(std::vector<double> t, std::vector<double> values)
    : t_(std::move(t)), v_(std::move(values)) {
    if (t_.size() != v_.size()) throw ConfigError("table columns differ in length");
    for (std::size_t i = 0; i < t_.size(); ++i)
        if (t_[i] < 0.0 || v_[i] < 0.0) throw ConfigError("table entries must be nonnegative");
    if (t_.empty() || t_.front() != 0.0 || v_.front() != 0.0)
        throw ConfigError("table must start at (0, 0)");
    interp_ = MonotoneCubic(t_, v_);
}

double LinearTable::operator()(double t) const {
    if (t < 0.0) throw DomainError("table evaluated at negative argument");
    return std::max(0.0, interp_(t));
}

}  // namespace blowup

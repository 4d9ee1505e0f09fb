#include "blowup/problem_specs.hpp"

#include <boost/math/tools/minima.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace blowup {

namespace {

std::string fmt(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", x);
    return buf;
}

void require_nonneg(double t, const char* what) {
    if (std::isnan(t) || t < 0.0) throw DomainError(std::string(what) + " needs a nonnegative argument");
}

std::vector<double> decade_breaks_from_zero(double t) {
    std::vector<double> b{0.0};
    for (double x = t * 1e-8; x < t; x *= 10.0) b.push_back(x);
    b.push_back(t);
    return b;
}

}  // namespace

std::string to_string(FFamily f) {
    switch (f) {
        case FFamily::Power: return "power";
        case FFamily::Exponential: return "exponential";
        case FFamily::Custom: return "custom";
    }
    return "unknown";
}

std::string to_string(WeightComponent c) {
    switch (c) {
        case WeightComponent::Lower: return "lower";
        case WeightComponent::Upper: return "upper";
        case WeightComponent::Osc: return "osc";
        case WeightComponent::BallLower: return "ball-lower";
        case WeightComponent::BallUpper: return "ball-upper";
    }
    return "unknown";
}

NonlinearitySpec NonlinearitySpec::power(double gamma) {
    if (!(gamma > 0.0)) throw ConfigError("power nonlinearity needs gamma > 0");
    Impl impl;
    impl.family = FFamily::Power;
    impl.params = {gamma};
    impl.label = "power(gamma=" + fmt(gamma) + ")";
    impl.f = [gamma](double t) { return t == 0.0 ? 0.0 : std::pow(t, gamma); };
    impl.F = [gamma](double t) { return std::pow(t, gamma + 1.0) / (gamma + 1.0); };
    impl.hint = MonotoneHint::NonDecreasing;
    impl.tail = gamma;
    NonlinearitySpec nl;
    nl.impl_ = std::make_shared<Impl>(std::move(impl));
    return nl;
}

NonlinearitySpec NonlinearitySpec::exponential() {
    Impl impl;
    impl.family = FFamily::Exponential;
    impl.label = "exponential";
    impl.f = [](double t) { return std::expm1(t); };
    impl.F = [](double t) {
        // e^t - 1 - t, series near zero to avoid cancellation.
        if (t < 1e-3) return t * t / 2.0 + t * t * t / 6.0 + t * t * t * t / 24.0;
        return std::expm1(t) - t;
    };
    impl.hint = MonotoneHint::NonDecreasing;
    NonlinearitySpec nl;
    nl.impl_ = std::make_shared<Impl>(std::move(impl));
    return nl;
}

NonlinearitySpec NonlinearitySpec::custom(RealFn f, std::optional<RealFn> F, MonotoneHint hint,
                                          std::optional<double> tail_exponent, std::string label) {
    if (!f) throw ConfigError("custom nonlinearity callable is empty");
    Impl impl;
    impl.family = FFamily::Custom;
    impl.label = std::move(label);
    impl.f = std::move(f);
    if (F) impl.F = std::move(*F);
    impl.hint = hint;
    impl.tail = tail_exponent;
    NonlinearitySpec nl;
    nl.impl_ = std::make_shared<Impl>(std::move(impl));
    return nl;
}

NonlinearitySpec NonlinearitySpec::tabulated(std::vector<double> t, std::vector<double> f_values) {
    LinearTable table(std::move(t), std::move(f_values));
    const auto& v = table.values();
    bool nondecreasing = std::is_sorted(v.begin(), v.end());
    for (std::size_t i = 1; i < v.size(); ++i)
        if (!(v[i] > 0.0)) throw ConfigError("tabulated f must be positive for t > 0");
    Impl impl;
    impl.family = FFamily::Custom;
    impl.label = "custom(table)";
    impl.f = [table](double s) { return table(s); };
    impl.hint = nondecreasing ? MonotoneHint::NonDecreasing : MonotoneHint::Unknown;
    impl.table = table;
    NonlinearitySpec nl;
    nl.impl_ = std::make_shared<Impl>(std::move(impl));
    return nl;
}

double NonlinearitySpec::f(double t) const {
    require_nonneg(t, "f");
    if (t == 0.0) return 0.0;
    return impl_->f(t);
}

double NonlinearitySpec::F(double t) const {
    require_nonneg(t, "F");
    if (t == 0.0) return 0.0;
    if (std::isinf(t)) return kInf;
    if (impl_->F) return impl_->F(t);
    auto b = decade_breaks_from_zero(t);
    return integrate_piecewise([this](double s) { return f(s); }, b, kRelativeQuad);
}

double NonlinearitySpec::G(double x, double y) const {
    require_nonneg(x, "G");
    if (x > y) throw DomainError("G(x, y) needs x <= y, got x = " + fmt(x) + ", y = " + fmt(y));
    if (x == y) return 0.0;
    if (x == 0.0) return F(y);
    if (impl_->F) {
        double Fx = impl_->F(x);
        double Fy = impl_->F(y);
        // Difference of closed forms is safe once F(x) is at most half of F(y).
        if (Fx <= 0.5 * Fy) return Fy - Fx;
    }
    std::vector<double> b{x};
    for (double s = x * 10.0; s < y; s *= 10.0) b.push_back(s);
    b.push_back(y);
    return integrate_piecewise([this](double s) { return f(s); }, b, kRelativeQuad);
}

namespace {

// Minimum of g over [a, b] from a uniform grid merged with a log grid, then a
// Brent polish around the best grid point.
double grid_extremum(const std::function<double(double)>& g, double a, double b, std::size_t n) {
    std::vector<double> xs = linear_grid(a, b, n);
    double lo = a > 0.0 ? a : b * 1e-12;
    if (lo < b) {
        auto lg = log_grid(lo, b, n);
        xs.insert(xs.end(), lg.begin(), lg.end());
        std::sort(xs.begin(), xs.end());
        xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
    }
    std::size_t best = 0;
    double best_val = g(xs[0]);
    for (std::size_t i = 1; i < xs.size(); ++i) {
        double v = g(xs[i]);
        if (v < best_val) {
            best_val = v;
            best = i;
        }
    }
    double left = xs[best == 0 ? 0 : best - 1];
    double right = xs[std::min(best + 1, xs.size() - 1)];
    if (right > left) {
        auto r = boost::math::tools::brent_find_minima(g, left, right, 52);
        best_val = std::min(best_val, r.second);
    }
    return best_val;
}

double refined_extremum(const std::function<double(double)>& g, double a, double b,
                        const EnvelopeControls& c) {
    std::size_t n = std::max<std::size_t>(c.initial_points, 16);
    double prev = grid_extremum(g, a, b, n);
    while (n < c.max_points) {
        n *= 2;
        double cur = grid_extremum(g, a, b, n);
        bool stable = std::abs(cur - prev) <= c.stability * std::max(std::abs(cur), 1e-300);
        prev = std::min(prev, cur);
        if (stable) break;
    }
    return prev;
}

}  // namespace

double envelope_lower(const NonlinearitySpec& nl, double t, const EnvelopeControls& c) {
    require_nonneg(t, "envelope_lower");
    if (t > c.T_max) throw DomainError("envelope_lower needs t <= T_max");
    double ft = nl.f(t);
    if (nl.monotone_hint() == MonotoneHint::NonDecreasing || t == c.T_max) return ft;
    double m = refined_extremum([&nl](double s) { return nl.f(s); }, t, c.T_max, c);
    return std::min(m, ft);
}

double envelope_upper(const NonlinearitySpec& nl, double t, const EnvelopeControls& c) {
    require_nonneg(t, "envelope_upper");
    double ft = nl.f(t);
    if (nl.monotone_hint() == MonotoneHint::NonDecreasing || t == 0.0) return ft;
    double m = -refined_extremum([&nl](double s) { return -nl.f(s); }, 0.0, t, c);
    return std::max(m, ft);
}

EnvelopeRatioReport envelope_ratio_report(const NonlinearitySpec& nl, const std::vector<double>& grid,
                                          const EnvelopeControls& c) {
    EnvelopeRatioReport rep;
    rep.grid = grid;
    rep.min_lower_ratio = kInf;
    rep.min_upper_ratio = kInf;
    for (double t : grid) {
        double ft = nl.f(t);
        if (!(ft > 0.0)) throw DomainError("envelope ratio needs f(t) > 0 at t = " + fmt(t));
        double lr = envelope_lower(nl, t, c) / ft;
        double ur = ft / envelope_upper(nl, t, c);
        rep.lower_ratio.push_back(lr);
        rep.upper_ratio.push_back(ur);
        rep.min_lower_ratio = std::min(rep.min_lower_ratio, lr);
        rep.min_upper_ratio = std::min(rep.min_upper_ratio, ur);
    }
    rep.satisfied_on_sampled_horizon = rep.min_lower_ratio > 0.0 && rep.min_upper_ratio > 0.0;
    return rep;
}

CalF::CalF(NonlinearitySpec nl, double l1, double scan_lo, double scan_hi, std::size_t points)
    : nl_(std::move(nl)), l1_(l1) {
    if (!(l1 > 0.0)) throw DomainError("calF needs l1 > 0");
    auto ts = log_grid(scan_lo, scan_hi, points);
    std::vector<double> v(ts.size());
    for (std::size_t i = 0; i < ts.size(); ++i) {
        v[i] = (*this)(ts[i]);
        if (!std::isfinite(v[i]) || !(v[i] > 0.0))
            throw StructuralError("calF is not finite and positive at t = " + fmt(ts[i]), ts[i], ts[i]);
        if (i == 1) increasing_ = v[1] > v[0];
        if (i == 0) continue;
        bool ok = increasing_ ? v[i] > v[i - 1] : v[i] < v[i - 1];
        if (!ok)
            throw StructuralError("calF is not strictly monotone on [" + fmt(ts[i - 1]) + ", " +
                                      fmt(ts[i]) + "]",
                                  ts[i - 1], ts[i]);
    }
}

double CalF::operator()(double t) const {
    if (!(t > 0.0)) throw DomainError("calF needs t > 0");
    double ft = nl_.f(t);
    if (!(ft > 0.0)) throw DomainError("calF needs f(t) > 0 at t = " + fmt(t));
    return 0.5 * t * std::pow(ft, -1.0 / l1_);
}

double CalF::inv(double y) const {
    if (std::isnan(y) || y < 0.0) throw DomainError("calF inverse requested at " + fmt(y));
    if (y == 0.0) {
        if (increasing_) return 0.0;
        throw DomainError("calF is decreasing; 0 is not in its range");
    }
    // s(t) is increasing in t in both cases.
    auto s = [this](double t) { return increasing_ ? (*this)(t) : -(*this)(t); };
    const double target = increasing_ ? y : -y;
    double lo = 1.0, hi = 1.0;
    double slo = s(lo), shi = slo;
    if (shi < target) {
        while (shi < target) {
            lo = hi;
            slo = shi;
            hi *= 2.0;
            if (hi > 1e300) throw DomainError("y = " + fmt(y) + " lies beyond the range of calF");
            shi = s(hi);
            if (!(shi > slo))
                throw StructuralError("calF loses monotonicity on [" + fmt(lo) + ", " + fmt(hi) + "]", lo, hi);
        }
    } else {
        while (slo > target) {
            hi = lo;
            shi = slo;
            lo *= 0.5;
            if (lo < 1e-300) throw DomainError("y = " + fmt(y) + " lies below the range of calF");
            slo = s(lo);
            if (!(slo < shi))
                throw StructuralError("calF loses monotonicity on [" + fmt(lo) + ", " + fmt(hi) + "]", lo, hi);
        }
    }
    if (slo == target) return lo;
    if (shi == target) return hi;
    std::uintmax_t iters = 200;
    auto r = boost::math::tools::toms748_solve([&](double t) { return s(t) - target; }, lo, hi,
                                               boost::math::tools::eps_tolerance<double>(52), iters);
    return 0.5 * (r.first + r.second);
}

double calF(const NonlinearitySpec& nl, double l1, double t) { return CalF(nl, l1)(t); }
double calF_inv(const NonlinearitySpec& nl, double l1, double y) { return CalF(nl, l1).inv(y); }

WeightSpec WeightSpec::radial(RadialFunction a) {
    WeightSpec ws;
    ws.lower = a;
    ws.upper = a;
    return ws;
}

double WeightSpec::osc(double r) const {
    double d = upper(r) - lower(r);
    return d > 0.0 ? d : 0.0;
}

RealFn WeightSpec::component(WeightComponent which) const {
    switch (which) {
        case WeightComponent::Lower: return lower.fn;
        case WeightComponent::Upper: return upper.fn;
        case WeightComponent::Osc: {
            WeightSpec copy = *this;
            return [copy](double r) { return copy.osc(r); };
        }
        case WeightComponent::BallLower:
            if (!ball_lower) throw ConfigError("weight has no ball-lower envelope");
            return ball_lower->fn;
        case WeightComponent::BallUpper:
            if (!ball_upper) throw ConfigError("weight has no ball-upper envelope");
            return ball_upper->fn;
    }
    throw ConfigError("unknown weight component");
}

void validate_weight(const WeightSpec& ws, double r_max, std::size_t points) {
    if (!ws.lower.fn || !ws.upper.fn) throw ConfigError("weight needs lower and upper components");
    auto rs = linear_grid(0.0, r_max, points);
    double prev_ball_lower = kInf, prev_ball_upper = -kInf;
    for (double r : rs) {
        double lo = ws.lower(r), up = ws.upper(r);
        if (!(lo >= 0.0)) throw ConfigError("weight lower component is negative at r = " + fmt(r));
        if (!(up >= lo * (1.0 - 1e-14)))
            throw ConfigError("weight lower component exceeds upper at r = " + fmt(r));
        if (ws.ball_lower) {
            double b = (*ws.ball_lower)(r);
            if (!(b >= 0.0) || b > prev_ball_lower * (1.0 + 1e-14))
                throw ConfigError("ball-lower envelope must be nonnegative and nonincreasing; fails at r = " +
                                  fmt(r));
            prev_ball_lower = b;
        }
        if (ws.ball_upper) {
            double b = (*ws.ball_upper)(r);
            if (!(b >= 0.0) || b < prev_ball_upper * (1.0 - 1e-14))
                throw ConfigError("ball-upper envelope must be nonnegative and nondecreasing; fails at r = " +
                                  fmt(r));
            prev_ball_upper = b;
        }
    }
}

double calA(const RealFn& rho, double s, int N) {
    if (N < 1) throw DomainError("calA needs N >= 1");
    require_nonneg(s, "calA");
    if (s == 0.0) return 0.0;
    std::vector<double> b{0.0};
    for (double x = 1e-3; x < s; x *= 10.0) b.push_back(x);
    b.push_back(s);
    const int k = N - 1;
    double acc = integrate_piecewise([&](double t) { return std::pow(t, k) * rho(t); }, b, kRelativeQuad);
    return acc * std::pow(s, 1 - N);
}

double weight_A(const WeightSpec& ws, WeightComponent which, double s, int N) {
    if (!(s > 0.0)) {
        if (s == 0.0) return 0.0;
        throw DomainError("weight_A needs s >= 0");
    }
    return calA(ws.component(which), s, N);
}

CumulativeIntegral::CumulativeIntegral(RealFn g, std::vector<double> breaks, QuadTolerance tol)
    : g_(std::move(g)), breaks_(std::move(breaks)), tol_(tol) {
    if (breaks_.empty() || breaks_.front() != 0.0) breaks_.insert(breaks_.begin(), 0.0);
    for (std::size_t i = 1; i < breaks_.size(); ++i)
        if (!(breaks_[i] > breaks_[i - 1])) throw DomainError("cumulative integral breaks must increase");
    nodes_.assign(breaks_.size(), 0.0);
    for (std::size_t i = 1; i < breaks_.size(); ++i)
        nodes_[i] = nodes_[i - 1] + integrate(g_, breaks_[i - 1], breaks_[i], local_tol(nodes_[i - 1]));
}

// Accuracy is wanted relative to the running total, not to each piece.
QuadTolerance CumulativeIntegral::local_tol(double base) const {
    QuadTolerance t = tol_;
    t.abs = std::max(t.abs, t.rel * std::abs(base));
    return t;
}

double CumulativeIntegral::operator()(double s) const {
    require_nonneg(s, "cumulative integral");
    auto it = std::upper_bound(breaks_.begin(), breaks_.end(), s);
    std::size_t k = static_cast<std::size_t>(it - breaks_.begin()) - 1;
    if (breaks_[k] == s) return nodes_[k];
    return nodes_[k] + integrate(g_, breaks_[k], s, local_tol(nodes_[k]));
}

}  // namespace blowup

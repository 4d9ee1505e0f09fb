#include "blowup/fd_oracle.hpp"

#include "blowup/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <sstream>

namespace blowup {

namespace {

struct Grid {
    double dr = 0.0;
    std::vector<double> r;
    std::vector<double> volume;
    std::vector<double> rho;
    /// r_{i+1/2}^{N-1}, i = 0..M-1.
    std::vector<double> face;
};

Grid make_grid(const RadialFunction& rho, int N, double L, std::size_t M) {
    Grid g;
    g.dr = L / static_cast<double>(M);
    g.r.resize(M + 1);
    g.volume.resize(M + 1);
    g.rho.resize(M + 1);
    g.face.resize(M);
    for (std::size_t i = 0; i <= M; ++i) {
        g.r[i] = i == M ? L : g.dr * static_cast<double>(i);
        double lo = i == 0 ? 0.0 : g.r[i] - 0.5 * g.dr;
        double hi = g.r[i] + 0.5 * g.dr;
        g.volume[i] = (std::pow(hi, N) - std::pow(lo, N)) / N;
        g.rho[i] = rho(g.r[i]);
        if (!(g.rho[i] >= 0.0) || !std::isfinite(g.rho[i]))
            throw DomainError("fd_solve: weight must be finite and nonnegative, fails at r = " +
                              std::to_string(g.r[i]));
    }
    for (std::size_t i = 0; i < M; ++i) g.face[i] = std::pow(g.r[i] + 0.5 * g.dr, N - 1);
    return g;
}

/// Bound on the slope of f over [a, b], sampled.
double slope_bound(const NonlinearitySpec& nl, double a, double b) {
    if (a > b) std::swap(a, b);
    double d = 1e-6 * (1.0 + b);
    double lo = std::max(0.0, a - d);
    double hi = b + d;
    constexpr int kSamples = 8;
    double best = 0.0;
    double prev_x = lo;
    double prev_f = nl.f(lo);
    for (int j = 1; j <= kSamples; ++j) {
        double x = lo + (hi - lo) * j / kSamples;
        double fx = nl.f(x);
        best = std::max(best, (fx - prev_f) / (x - prev_x));
        prev_x = x;
        prev_f = fx;
    }
    return 1.1 * best;
}

/// One frozen sweep: solves L(w) - lambda rho V w = rho V (f(v) - lambda v), w_M = k.
/// The frozen equations are the stationarity conditions of the convex energy
///   E(w) = sum_faces r^{N-1} dr Phi(|w_{i+1} - w_i| / dr)
///        + sum_nodes V rho (lambda w^2 / 2 + (f(v) - lambda v) w),
/// minimised by Newton steps (tridiagonal Hessian). The line search works on
/// the directional derivative of E, which stays resolvable where differences
/// of E itself are lost to round-off.
class FrozenSweep {
public:
    FrozenSweep(const PhiSpec& phi, const Grid& g, double k)
        : phi_(phi), g_(g), k_(k), slope_floor_((1.0 + k) / g.r.back()) {
        const std::size_t M = g_.r.size() - 1;
        grad_.resize(M);
        diag_.resize(M);
        off_.resize(M);
        step_.resize(M);
        trial_.resize(M + 1);
    }

    void freeze(const std::vector<double>& v, const std::vector<double>& lambda, const NonlinearitySpec& nl) {
        lambda_ = &lambda;
        rhs_.resize(v.size());
        for (std::size_t i = 0; i < v.size(); ++i) rhs_[i] = nl.f(v[i]) - lambda[i] * v[i];
    }

    /// Newton from the starting profile w (w_M = k on entry and exit).
    void solve(std::vector<double>& w) {
        const std::size_t M = g_.r.size() - 1;
        w[M] = k_;
        trial_[M] = k_;
        // Curvature floor for degenerate h (h'(0) = 0): raised while steps need
        // damping, relaxed after full steps so that late steps are plain Newton.
        floor_ = slope_floor_;
        double best = kInf;
        int since_best = 0;
        for (int it = 0; it < kMaxNewton; ++it) {
            assemble(w);
            thomas();
            double rel = 0.0;
            for (std::size_t i = 0; i < M; ++i) rel = std::max(rel, std::abs(step_[i]) / (1.0 + std::abs(w[i])));
            if (rel <= kDoneRel) {
                for (std::size_t i = 0; i < M; ++i) w[i] += step_[i];
                return;
            }
            if (rel < best) {
                best = rel;
                since_best = 0;
            } else if (++since_best >= 5 && best <= kStallRel) {
                return;
            }
            double d0 = 0.0;
            for (std::size_t i = 0; i < M; ++i) d0 += grad_[i] * step_[i];
            double t = 1.0;
            double d1 = directional(w, 1.0);
            if (d1 > 0.0 && d0 < 0.0) {
                // E decreases up to the root of the directional derivative; bisect towards it.
                double lo = 0.0, hi = 1.0;
                for (int ls = 0; ls < 60; ++ls) {
                    t = 0.5 * (lo + hi);
                    double dt = directional(w, t);
                    if (std::abs(dt) <= 0.5 * std::abs(d0)) break;
                    if (dt < 0.0) lo = t; else hi = t;
                }
            }
            for (std::size_t i = 0; i < M; ++i) w[i] += t * step_[i];
            if (t == 1.0)
                floor_ = floor_ < 1e-12 * slope_floor_ ? 0.0 : 0.1 * floor_;
            else if (t < 0.25)
                floor_ = std::max(4.0 * floor_, 1e-12 * slope_floor_);
        }
        throw NumericFailure("fd_solve: frozen sweep Newton iteration did not converge", best);
    }

private:
    static constexpr int kMaxNewton = 300;
    static constexpr double kDoneRel = 1e-14;
    static constexpr double kStallRel = 1e-11;

    /// dE/dt at w + t step.
    double directional(const std::vector<double>& w, double t) {
        const std::size_t M = g_.r.size() - 1;
        for (std::size_t i = 0; i < M; ++i) trial_[i] = w[i] + t * step_[i];
        double d = 0.0;
        for (std::size_t i = 0; i < M; ++i)
            d += g_.volume[i] * g_.rho[i] * ((*lambda_)[i] * trial_[i] + rhs_[i]) * step_[i];
        for (std::size_t j = 0; j < M; ++j) {
            double flux = signed_flux(trial_, j);
            double dstep = (j + 1 < M ? step_[j + 1] : 0.0) - step_[j];
            d += flux * dstep;
        }
        return d;
    }

    double signed_flux(const std::vector<double>& w, std::size_t j) const {
        double s = slope_of(w, j);
        double hs = phi_.h(std::abs(s));
        return g_.face[j] * (s < 0.0 ? -hs : hs);
    }

    double slope_of(const std::vector<double>& w, std::size_t j) const { return (w[j + 1] - w[j]) / g_.dr; }

    /// h' with the slope floored: degenerate h (h'(0) = 0) would leave flat
    /// profiles without curvature. Any positive curvature keeps Newton a descent method.
    double dh(double s) const {
        double a = std::max(std::abs(s), floor_);
        double d = 1e-6 * std::max(a, 1e-8);
        double lo = std::max(a - d, 0.0);
        return (phi_.h(a + d) - phi_.h(lo)) / (a + d - lo);
    }

    void assemble(const std::vector<double>& w) {
        const std::size_t M = g_.r.size() - 1;
        for (std::size_t i = 0; i < M; ++i) {
            double mass = g_.volume[i] * g_.rho[i];
            grad_[i] = mass * ((*lambda_)[i] * w[i] + rhs_[i]);
            diag_[i] = mass * (*lambda_)[i];
            off_[i] = 0.0;
        }
        for (std::size_t j = 0; j < M; ++j) {
            double flux = signed_flux(w, j);
            double c = g_.face[j] * dh(slope_of(w, j)) / g_.dr;
            grad_[j] -= flux;
            diag_[j] += c;
            if (j + 1 < M) {
                grad_[j + 1] += flux;
                diag_[j + 1] += c;
                off_[j] = -c;
            }
        }
        double scale = 0.0;
        for (std::size_t i = 0; i < M; ++i) scale = std::max(scale, diag_[i]);
        for (std::size_t i = 0; i < M; ++i) diag_[i] += 1e-14 * scale + 1e-300;
    }

    /// Solves H step = -grad with H tridiagonal (diag_, off_ above and below).
    void thomas() {
        const std::size_t M = diag_.size();
        cprime_.resize(M);
        double denom = diag_[0];
        cprime_[0] = off_[0] / denom;
        step_[0] = -grad_[0] / denom;
        for (std::size_t i = 1; i < M; ++i) {
            denom = diag_[i] - off_[i - 1] * cprime_[i - 1];
            cprime_[i] = i + 1 < M ? off_[i] / denom : 0.0;
            step_[i] = (-grad_[i] - off_[i - 1] * step_[i - 1]) / denom;
        }
        for (std::size_t i = M - 1; i-- > 0;) step_[i] -= cprime_[i] * step_[i + 1];
    }

    const PhiSpec& phi_;
    const Grid& g_;
    double k_;
    double slope_floor_;
    double floor_ = 0.0;
    const std::vector<double>* lambda_ = nullptr;
    std::vector<double> rhs_, grad_, diag_, off_, step_, cprime_, trial_;
};

double sup_change(const std::vector<double>& a, const std::vector<double>& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

}  // namespace

RadialProfile FdSolution::profile() const {
    RadialProfile p;
    p.r = r;
    p.u.resize(r.size());
    for (std::size_t i = 0; i < r.size(); ++i) p.u[i] = 0.5 * (from_below[i] + from_above[i]);
    p.du = du;
    p.Q = Q;
    p.N = N;
    p.R = L;
    p.alpha = p.u.front();
    p.phi_label = phi_label;
    p.f_label = f_label;
    p.rho_label = rho_label;
    p.source = "fd";
    return p;
}

FdSolution fd_solve(const PhiSpec& phi, const NonlinearitySpec& nl, const RadialFunction& rho, int N, double L,
                    double k, std::size_t M, const FdControls& c) {
    if (!(k >= 0.0) || !std::isfinite(k)) throw DomainError("fd_solve: boundary value k must be finite and >= 0");
    if (M < 64) throw DomainError("fd_solve: grid size M must be at least 64");
    if (N < 1) throw DomainError("fd_solve: dimension N must be >= 1");
    if (!(L > 0.0) || !std::isfinite(L)) throw DomainError("fd_solve: radius L must be positive");
    if (!(c.tol > 0.0)) throw DomainError("fd_solve: tolerance must be positive");

    Grid g = make_grid(rho, N, L, M);
    FrozenSweep sweep(phi, g, k);

    FdSolution sol;
    sol.N = N;
    sol.L = L;
    sol.k = k;
    sol.M = M;
    sol.r = g.r;
    sol.phi_label = phi.label();
    sol.f_label = nl.label();
    sol.rho_label = rho.label;

    std::vector<double> below(M + 1, 0.0);
    std::vector<double> above(M + 1, k);
    below.back() = k;
    std::vector<double> next(M + 1), lambda(M + 1);
    // Monotonicity is checked up to the accuracy of the frozen solves.
    const double slack = std::max(1e-3 * c.tol, 1e-10);

    double best_below = kInf, best_above = kInf;
    std::size_t since_best_below = 0, since_best_above = 0;

    auto step = [&](std::vector<double>& v, bool from_below, double& change) {
        for (std::size_t i = 0; i <= M; ++i) lambda[i] = slope_bound(nl, below[i], above[i]);
        for (int attempt = 0;; ++attempt) {
            sweep.freeze(v, lambda, nl);
            next = v;
            sweep.solve(next);
            bool ok = true;
            for (std::size_t i = 0; i <= M; ++i) {
                // The frozen solution is nonnegative; round-off below zero is clipped.
                if (next[i] < 0.0 && next[i] >= -slack) next[i] = 0.0;
                if (next[i] < 0.0) {
                    // Overshoot below the subsolution 0: the shift was too weak.
                    ok = false;
                    lambda[i] = 2.0 * lambda[i] + 1.0;
                    continue;
                }
                double dv = next[i] - v[i];
                double df = nl.f(next[i]) - nl.f(v[i]);
                // The frozen step is a valid ladder rung only if lambda bounds the secant.
                double excess = from_below ? df - lambda[i] * dv : lambda[i] * dv - df;
                if (excess > 1e-12 * (1.0 + std::abs(nl.f(v[i])))) {
                    ok = false;
                    lambda[i] = std::max(2.0 * lambda[i], 1.1 * std::abs(df / dv));
                }
            }
            if (ok) break;
            if (attempt > 60) throw NumericFailure("fd_solve: no admissible shift for the frozen sweep", 0.0);
        }
        for (std::size_t i = 0; i <= M; ++i) {
            double dv = next[i] - v[i];
            double allowed = slack * (1.0 + std::abs(v[i]));
            if ((from_below && dv < -allowed) || (!from_below && dv > allowed)) {
                std::ostringstream os;
                os << "fd_solve: " << (from_below ? "lower" : "upper") << " ladder lost monotonicity at r = "
                   << g.r[i] << " (step " << dv << ")";
                throw SolverDefect(os.str());
            }
        }
        change = sup_change(next, v);
        v.swap(next);
    };

    while (true) {
        double cb = 0.0, ca = 0.0;
        step(below, true, cb);
        step(above, false, ca);
        ++sol.sweeps;
        sol.history_below.push_back(cb);
        sol.history_above.push_back(ca);
        if (cb < c.tol && ca < c.tol) break;

        if (cb < best_below) {
            best_below = cb;
            since_best_below = 0;
        } else {
            ++since_best_below;
        }
        if (ca < best_above) {
            best_above = ca;
            since_best_above = 0;
        } else {
            ++since_best_above;
        }
        if (since_best_below >= c.stall_window || since_best_above >= c.stall_window ||
            sol.sweeps >= c.max_sweeps) {
            std::vector<double> hist = since_best_below >= since_best_above ? sol.history_below : sol.history_above;
            std::ostringstream os;
            os << "fd_solve: monotone iteration stalled after " << sol.sweeps << " sweeps (last changes " << cb
               << ", " << ca << ")";
            throw NonConvergence(os.str(), std::move(hist));
        }
    }

    sol.from_below = std::move(below);
    sol.from_above = std::move(above);
    sol.gap = sup_change(sol.from_below, sol.from_above);
    sol.du.assign(M + 1, 0.0);
    sol.Q.assign(M + 1, 0.0);
    for (std::size_t i = 1; i <= M; ++i) {
        auto mid = [&](std::size_t j) { return 0.5 * (sol.from_below[j] + sol.from_above[j]); };
        sol.du[i] = i < M ? (mid(i + 1) - mid(i - 1)) / (2.0 * g.dr) : (mid(M) - mid(M - 1)) / g.dr;
        double s = phi.h(std::abs(sol.du[i]));
        sol.Q[i] = std::pow(g.r[i], N - 1) * (sol.du[i] < 0.0 ? -s : s);
    }
    for (std::size_t i = 0; i <= M; ++i) {
        if (sol.from_below[i] > sol.from_above[i] + slack * (1.0 + std::abs(sol.from_above[i]))) {
            std::ostringstream os;
            os << "fd_solve: lower ladder above upper ladder at r = " << g.r[i];
            throw SolverDefect(os.str());
        }
    }
    if (sol.gap > 10.0 * c.tol + slack * (1.0 + k)) {
        std::ostringstream os;
        os << "fd_solve: sub and super limits differ by " << sol.gap << " > 10 tol";
        throw SolverDefect(os.str());
    }
    return sol;
}

ComparisonReport fd_comparison_check(const FdSolution& lower, const FdSolution& upper, double tol) {
    if (lower.r.size() != upper.r.size() || lower.N != upper.N || lower.L != upper.L)
        throw DomainError("fd_comparison_check: solutions live on different grids");
    ComparisonReport rep;
    rep.worst_margin = kInf;
    RadialProfile a = lower.profile();
    RadialProfile b = upper.profile();
    for (std::size_t i = 0; i < a.r.size(); ++i) {
        double m = b.u[i] - a.u[i] + tol * (1.0 + std::abs(b.u[i]));
        if (m < rep.worst_margin) {
            rep.worst_margin = m;
            rep.worst_r = a.r[i];
        }
    }
    rep.ordered = rep.worst_margin >= 0.0;
    if (!rep.ordered) {
        std::ostringstream os;
        os << "fd_comparison_check: ordering violated at r = " << rep.worst_r << " (margin " << rep.worst_margin
           << ")";
        throw SolverDefect(os.str());
    }
    return rep;
}

}  // namespace blowup

#include "blowup/radial_solver.hpp"

#include <boost/math/tools/roots.hpp>
#include <boost/numeric/odeint.hpp>

#include <algorithm>
#include <future>
#include <array>
#include <cmath>
#include <cstdio>

namespace blowup {

std::string to_string(ProfileStatus s) {
    switch (s) {
        case ProfileStatus::Completed: return "completed";
        case ProfileStatus::Blowup: return "blow-up";
        case ProfileStatus::Global: return "global";
        case ProfileStatus::GlobalUnconfirmed: return "global-unconfirmed";
    }
    return "unknown";
}

namespace {

namespace odeint = boost::numeric::odeint;
using State = std::array<double, 2>;

std::string fmt(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", x);
    return buf;
}

double power_int(double r, int k) {
    return k == 0 ? 1.0 : std::pow(r, k);
}

struct CoreResult {
    RadialProfile profile;
    std::vector<double> crossings;
    bool integrator_failed = false;
};

// Root of g on [a, b] with g(a) < 0 <= g(b).
template <class G>
double crossing(G&& g, double a, double b) {
    boost::uintmax_t iters = 200;
    auto [lo, hi] = boost::math::tools::toms748_solve(g, a, b, boost::math::tools::eps_tolerance<double>(50), iters);
    return 0.5 * (lo + hi);
}

CoreResult integrate_radial(const PhiSpec& phi, const NonlinearitySpec& nl, const RadialFunction& rho, int N,
                            double alpha, double r_max, const SolverControls& c, std::vector<double> thresholds) {
    if (N < 1) throw DomainError("dimension N must be >= 1");
    if (!(alpha >= 0.0) || !std::isfinite(alpha)) throw DomainError("initial value alpha must be >= 0");
    if (!(r_max > 0.0)) throw DomainError("r_max must be positive");
    if (c.output_points < 2) throw DomainError("need at least two output points");
    std::sort(thresholds.begin(), thresholds.end());
    thresholds.push_back(c.blowup_threshold);
    std::sort(thresholds.begin(), thresholds.end());
    thresholds.erase(std::unique(thresholds.begin(), thresholds.end()), thresholds.end());
    thresholds.erase(std::remove_if(thresholds.begin(), thresholds.end(),
                                    [&](double t) { return t > c.blowup_threshold; }),
                     thresholds.end());

    auto rho_at = [&](double r) {
        double v = rho(r);
        if (v < 0.0 || std::isnan(v)) throw DomainError("weight rho is negative at r = " + fmt(r));
        return v;
    };
    const double f_alpha = nl.f(alpha);
    auto W = [&](double s) {
        return integrate([&](double t) { return power_int(t, N - 1) * rho_at(t); }, 0.0, s, kNoisyQuad);
    };
    // Near the origin f(u) is frozen at f(alpha): Q = f(alpha) W(r).
    auto series_u = [&](double r) {
        if (r == 0.0 || f_alpha == 0.0) return alpha;
        return alpha + integrate([&](double s) { return phi.h_inv(f_alpha * W(s) / power_int(s, N - 1)); }, 0.0, r,
                                 kNoisyQuad);
    };
    double r1 = std::min(1e-4, 1e-3 * r_max);
    double u1 = series_u(r1);
    for (int i = 0; i < 60 && f_alpha > 0.0; ++i) {
        if (std::abs(nl.f(u1) - f_alpha) <= c.rtol * f_alpha) break;
        r1 *= 0.5;
        u1 = series_u(r1);
    }

    CoreResult out;
    RadialProfile& p = out.profile;
    p.N = N;
    p.alpha = alpha;
    p.phi_label = phi.label();
    p.f_label = nl.label();
    p.rho_label = rho.label;

    auto emit = [&](double r, double u, double Q) {
        p.r.push_back(r);
        p.u.push_back(u);
        p.Q.push_back(Q);
        p.du.push_back(r == 0.0 ? 0.0 : phi.h_inv(std::max(Q, 0.0) / power_int(r, N - 1)));
    };
    const std::size_t P = c.output_points;
    auto t_out = [&](std::size_t k) { return k + 1 == P ? r_max : r_max * double(k) / double(P - 1); };
    std::size_t next_out = 0;
    while (next_out < P && t_out(next_out) < r1) {
        double r = t_out(next_out);
        emit(r, series_u(r), f_alpha * (r == 0.0 ? 0.0 : W(r)));
        ++next_out;
    }

    auto rhs = [&](const State& x, State& dx, double r) {
        if (!std::isfinite(x[0]) || !std::isfinite(x[1])) {
            // Overflowed trial stage; the step controller rejects it.
            dx = {kInf, kInf};
            return;
        }
        double Q = std::max(x[1], 0.0);
        dx[0] = phi.h_inv(Q / power_int(r, N - 1));
        dx[1] = power_int(r, N - 1) * rho_at(r) * nl.f(std::max(x[0], 0.0));
    };
    auto stepper = odeint::make_dense_output(c.atol, c.rtol, odeint::runge_kutta_dopri5<State>());
    State x1{u1, f_alpha * W(r1)};
    stepper.initialize(x1, r1, std::min(r1, 1e-3 * r_max));

    std::vector<std::array<double, 3>> steps;
    std::size_t next_thr = 0;
    double t_now = r1;
    p.status = ProfileStatus::Completed;
    auto state_at = [&](double r) {
        State s;
        stepper.calc_state(r, s);
        return s;
    };
    std::size_t nsteps = 0;
    while (t_now < r_max) {
        double t0, t1;
        try {
            auto span = stepper.do_step(rhs);
            t0 = span.first;
            t1 = span.second;
        } catch (const odeint::odeint_error&) {
            out.integrator_failed = true;
            p.status = ProfileStatus::Blowup;
            p.R = t_now;
            p.bracket = std::make_pair(t_now, t_now + stepper.current_time_step());
            break;
        }
        if (++nsteps > c.max_steps) throw NumericFailure("radial integration exceeded the step budget", t1);
        State x = stepper.current_state();
        if (!std::isfinite(x[0]) || !std::isfinite(x[1])) {
            out.integrator_failed = true;
            p.status = ProfileStatus::Blowup;
            p.R = t0;
            p.bracket = std::make_pair(t0, t1);
            break;
        }
        double stop = kInf;
        while (next_thr < thresholds.size() && x[0] >= thresholds[next_thr]) {
            double thr = thresholds[next_thr];
            double lo = std::max(t0, out.crossings.empty() ? t0 : out.crossings.back());
            double rc = state_at(lo)[0] >= thr
                            ? lo
                            : crossing([&](double r) { return state_at(r)[0] - thr; }, lo, t1);
            out.crossings.push_back(rc);
            ++next_thr;
            if (next_thr == thresholds.size()) stop = rc;
        }
        double t_end = std::min({t1, r_max, stop});
        while (next_out < P && t_out(next_out) <= t_end) {
            double r = t_out(next_out);
            State s = state_at(r);
            emit(r, s[0], s[1]);
            ++next_out;
        }
        if (std::isfinite(stop)) {
            State s = state_at(stop);
            steps.push_back({stop, s[0], s[1]});
            p.status = ProfileStatus::Blowup;
            p.R = stop;
            double du = phi.h_inv(std::max(s[1], 0.0) / power_int(stop, N - 1));
            // Upper end assumes a blow-up exponent of at most 10 in u ~ (Gamma - r)^-a.
            p.bracket = std::make_pair(stop, stop + 10.0 * s[0] / std::max(du, 1e-300));
            break;
        }
        if (t1 < r_max) steps.push_back({t1, x[0], x[1]});
        t_now = t1;
    }
    if (p.status == ProfileStatus::Completed) {
        p.R = r_max;
    } else {
        // Keep the accepted steps beyond the last uniform point, where the profile is steep.
        double last = p.r.empty() ? -1.0 : p.r.back();
        for (const auto& s : steps)
            if (s[0] > last && s[0] <= p.R) emit(s[0], s[1], s[2]);
    }
    return out;
}

}  // namespace

RadialProfile solve_ivp(const PhiSpec& phi, const NonlinearitySpec& nl, const RadialFunction& rho, int N,
                        double alpha, double r_max, const SolverControls& c) {
    return integrate_radial(phi, nl, rho, N, alpha, r_max, c, {}).profile;
}

BlowupRadius blowup_radius(const PhiSpec& phi, const NonlinearitySpec& nl, const RadialFunction& rho, int N,
                           double alpha, const BlowupControls& c) {
    if (c.thresholds.size() < 3) throw DomainError("blow-up detection needs three thresholds");
    SolverControls sc = c.solver;
    sc.blowup_threshold = *std::max_element(c.thresholds.begin(), c.thresholds.end());
    CoreResult run = integrate_radial(phi, nl, rho, N, alpha, c.horizon, sc, c.thresholds);

    BlowupRadius out;
    out.alpha = alpha;
    out.crossings = run.crossings;
    const auto& u = run.profile.u;
    out.u_max_reached = u.empty() ? alpha : *std::max_element(u.begin(), u.end());

    if (run.integrator_failed) {
        out.status = ProfileStatus::Blowup;
        out.bracket = *run.profile.bracket;
        out.gamma = 0.5 * (out.bracket.first + out.bracket.second);
        out.note = "integrator step size collapsed before the top threshold";
        return out;
    }
    const auto& x = run.crossings;
    if (x.size() >= 3) {
        double r1 = x[x.size() - 3], r2 = x[x.size() - 2], r3 = x.back();
        double d1 = r2 - r1, d2 = r3 - r2;
        if (d2 > 0.0 && d1 > 0.0 && d2 <= c.contraction * d1) {
            out.status = ProfileStatus::Blowup;
            out.gamma = r3 + d2 * d2 / (d1 - d2);
            out.bracket = {r3, out.gamma + (out.gamma - r3)};
            out.note = "Aitken extrapolation over threshold crossings";
            return out;
        }
        if (d2 == 0.0) {
            out.status = ProfileStatus::Blowup;
            out.gamma = r3;
            out.bracket = {r3, std::nextafter(r3, kInf)};
            out.note = "all thresholds crossed at one radius";
            return out;
        }
    }
    Verdict ko = Verdict::Inconclusive;
    try {
        ko = check_KO(phi, nl).verdict;
    } catch (const Error&) {
    }
    out.gamma = kInf;
    out.bracket = {run.profile.R, kInf};
    if (ko == Verdict::Diverges) {
        out.status = ProfileStatus::Global;
        out.note = x.empty() ? "u stayed below the thresholds up to the horizon; KO fails"
                             : "threshold crossings do not contract; KO fails";
    } else {
        out.status = ProfileStatus::GlobalUnconfirmed;
        out.note = "no contracting crossings but KO verdict is " + to_string(ko);
    }
    return out;
}

RadialProfile solve_ball_dirichlet(const PhiSpec& phi, const NonlinearitySpec& nl, const RadialFunction& rho,
                                   int N, double L, double k, const BallControls& c) {
    if (!(k >= 0.0)) throw DomainError("boundary value k must be >= 0");
    if (!(L > 0.0)) throw DomainError("radius L must be positive");
    SolverControls sc = c.solver;
    sc.blowup_threshold = std::max(sc.blowup_threshold, 1e3 * k);
    auto shoot = [&](double a) { return integrate_radial(phi, nl, rho, N, a, L, sc, {}).profile; };
    auto end_value = [&](const RadialProfile& p) {
        return p.status == ProfileStatus::Completed ? p.u.back() : kInf;
    };

    RadialProfile lo_p = shoot(0.0);
    double lo = 0.0, hi = k;
    double v_lo = end_value(lo_p);
    if (v_lo > k + c.tol)
        throw DomainError("ball shooting infeasible: u_0(L) = " + fmt(v_lo) + " exceeds k = " + fmt(k));
    if (std::abs(v_lo - k) <= c.tol) return lo_p;
    RadialProfile hi_p = shoot(k);
    double v_hi = end_value(hi_p);
    if (std::abs(v_hi - k) <= c.tol) return hi_p;
    for (int i = 0; i < c.max_bisections; ++i) {
        double mid = 0.5 * (lo + hi);
        if (!(mid > lo && mid < hi)) break;
        RadialProfile mp = shoot(mid);
        double v = end_value(mp);
        if (std::abs(v - k) <= c.tol) return mp;
        if (v < k) {
            lo = mid;
            lo_p = std::move(mp);
            v_lo = v;
        } else {
            hi = mid;
            hi_p = std::move(mp);
            v_hi = v;
        }
    }
    // Interval exhausted in double precision: return the closer end.
    if (hi_p.status != ProfileStatus::Completed || std::abs(v_lo - k) <= std::abs(v_hi - k)) return lo_p;
    return hi_p;
}

SandwichReport verify_sandwich(const RadialProfile& profile, const PhiSpec& phi, const NonlinearitySpec& nl,
                               double c, double l1, double m1, int N) {
    if (profile.u.empty()) throw DomainError("empty profile");
    if (!(c > 0.0) || !(l1 > 0.0) || !(m1 > 0.0) || N < 1) throw DomainError("sandwich constants must be positive");
    const double v0 = profile.u.front();
    const double vmax = *std::max_element(profile.u.begin(), profile.u.end());
    if (!(vmax > v0)) throw DomainError("sandwich check needs v(0) < v(L)");
    const double D = vmax - v0;
    const double l = phi.indices().l;
    // tau = v0 + D x^kappa turns the (tau - v0)^(-1/l) endpoint singularity smooth.
    const double kappa = 2.0 * l / (l - 1.0);
    auto integrand = [&](double C) {
        return [&, C](double x) {
            if (x <= 0.0) return 0.0;
            double delta = D * std::pow(x, kappa);
            double tau = v0 + delta;
            // Rescale by the exact width: tau - v0 loses digits when delta << v0.
            double y = tau > v0 ? C * nl.G(v0, tau) * (delta / (tau - v0)) : C * nl.f(v0) * delta;
            if (!(y > 0.0)) return 0.0;
            return D * kappa * std::pow(x, kappa - 1.0) / phi.Phi_inv(y);
        };
    };
    auto g_lo = integrand(c / l1);
    auto g_hi = integrand(c / (m1 * N));
    const QuadTolerance tol{1e-14, 1e-11, 4000};

    SandwichReport rep;
    double acc_lo = 0.0, acc_hi = 0.0, x_prev = 0.0;
    bool broken = false;
    for (std::size_t i = 0; i < profile.r.size(); ++i) {
        SandwichPoint pt;
        pt.r = profile.r[i];
        double x = std::pow(std::max(profile.u[i] - v0, 0.0) / D, 1.0 / kappa);
        if (!broken && x > x_prev) {
            try {
                acc_lo += integrate(g_lo, x_prev, x, tol);
                acc_hi += integrate(g_hi, x_prev, x, tol);
                x_prev = x;
            } catch (const NumericFailure&) {
                broken = true;
            }
        }
        if (broken) {
            pt.skipped = true;
            ++rep.skipped;
            rep.points.push_back(pt);
            continue;
        }
        pt.lower = acc_lo;
        pt.upper = acc_hi;
        const double slack = 1e-6 * (1.0 + pt.r);
        pt.lower_margin = pt.r - pt.lower;
        pt.upper_margin = pt.upper - pt.r;
        rep.worst_margin = std::min({rep.worst_margin, pt.lower_margin + slack, pt.upper_margin + slack});
        rep.points.push_back(pt);
    }
    rep.passed = rep.skipped == 0 && rep.worst_margin >= 0.0;
    return rep;
}

double ordering_margin(const RadialProfile& lower, const RadialProfile& upper, double tol) {
    if (lower.r.size() != upper.r.size()) throw DomainError("profiles are on different grids");
    double worst = kInf;
    for (std::size_t i = 0; i < lower.r.size(); ++i) {
        if (std::abs(lower.r[i] - upper.r[i]) > 1e-12 * (1.0 + std::abs(lower.r[i])))
            throw DomainError("profiles are on different grids");
        worst = std::min(worst, upper.u[i] - lower.u[i] + tol * (1.0 + std::abs(upper.u[i])));
    }
    return worst;
}

SweepResult boundary_sweep_blowup(const PhiSpec& phi, const NonlinearitySpec& nl, const RadialFunction& rho, int N,
                                  double L, const std::vector<double>& k_sequence, double r_star,
                                  const BallControls& c, std::size_t threads) {
    if (k_sequence.empty()) throw DomainError("empty boundary-data ladder");
    for (std::size_t i = 0; i < k_sequence.size(); ++i)
        if (!(k_sequence[i] > 0.0) || (i > 0 && !(k_sequence[i] > k_sequence[i - 1])))
            throw DomainError("boundary-data ladder must be positive and increasing");
    if (!(r_star > 0.0 && r_star < L)) throw DomainError("compact radius must lie in (0, L)");

    SweepResult out;
    out.ko = check_KO(phi, nl);
    if (out.ko.verdict == Verdict::Diverges)
        throw PreconditionRejected("nonexistence-without-ko",
                                   "f satisfies the Keller-Osserman condition",
                                   "KO integral diverges for " + nl.label() +
                                       ": boundary blow-up solutions do not exist and the sweep diverges pointwise");
    if (out.ko.verdict != Verdict::Converges)
        throw PreconditionRejected("ko-inconclusive", "f satisfies the Keller-Osserman condition",
                                   "KO verdict is inconclusive for " + nl.label());
    out.r_star = r_star;
    out.k_values = k_sequence;
    // Members are independent ball solves; they may run concurrently.
    out.profiles.resize(k_sequence.size());
    const std::size_t workers = std::max<std::size_t>(1, std::min(threads, k_sequence.size()));
    for (std::size_t first = 0; first < k_sequence.size(); first += workers) {
        std::vector<std::future<RadialProfile>> batch;
        for (std::size_t j = first; j < std::min(first + workers, k_sequence.size()); ++j)
            batch.push_back(std::async(workers > 1 ? std::launch::async : std::launch::deferred, [&, j] {
                return solve_ball_dirichlet(phi, nl, rho, N, L, k_sequence[j], c);
            }));
        for (std::size_t j = 0; j < batch.size(); ++j) out.profiles[first + j] = batch[j].get();
    }
    for (std::size_t j = 0; j < k_sequence.size(); ++j) {
        const auto& cur = out.profiles[j];
        if (cur.status != ProfileStatus::Completed)
            throw SolverDefect("ball solve for k = " + fmt(k_sequence[j]) + " did not complete");
        if (j > 0 && ordering_margin(out.profiles[j - 1], cur, 1e-8) < 0.0)
            throw SolverDefect("sweep profiles are not ordered in k at k = " + fmt(k_sequence[j]));
    }
    const auto& grid = out.profiles.front().r;
    std::size_t n = 0;
    while (n < grid.size() && grid[n] <= r_star * (1 + 1e-12)) ++n;
    auto sup_diff = [&](const std::vector<double>& a, const std::vector<double>& b) {
        double m = 0.0;
        for (std::size_t i = 0; i < n; ++i) m = std::max(m, std::abs(a[i] - b[i]));
        return m;
    };
    for (std::size_t j = 1; j < out.profiles.size(); ++j)
        out.raw_increments.push_back(sup_diff(out.profiles[j].u, out.profiles[j - 1].u));

    std::vector<std::vector<double>> ext;
    for (std::size_t j = 2; j < out.profiles.size(); ++j) {
        std::vector<double> e(n);
        for (std::size_t i = 0; i < n; ++i) {
            double a = out.profiles[j - 2].u[i], b = out.profiles[j - 1].u[i], cc = out.profiles[j].u[i];
            double d1 = b - a, d2 = cc - b;
            e[i] = cc;
            if (d1 > 0.0 && d2 >= 0.0 && d2 < d1) e[i] = cc + d2 * d2 / (d1 - d2);
        }
        ext.push_back(std::move(e));
    }
    for (std::size_t j = 1; j < ext.size(); ++j) out.extrapolated_increments.push_back(sup_diff(ext[j], ext[j - 1]));
    out.limit_r.assign(grid.begin(), grid.begin() + n);
    if (!ext.empty())
        out.limit_u = ext.back();
    else
        out.limit_u.assign(out.profiles.back().u.begin(), out.profiles.back().u.begin() + n);
    return out;
}

std::vector<double> growth_minorant(const PhiSpec& phi, const NonlinearitySpec& nl, const RadialFunction& rho,
                                    int N, double alpha, const std::vector<double>& radii) {
    if (radii.empty()) return {};
    double rmax = *std::max_element(radii.begin(), radii.end());
    AveragedWeight A(rho.fn, N, std::max(rmax, 1.0));
    const double scale = xi_eta(phi, XiEta::Eta3, nl.f(alpha));
    std::vector<double> out;
    out.reserve(radii.size());
    double acc = 0.0, prev = 0.0;
    for (double r : radii) {
        if (r < prev) throw DomainError("minorant radii must be sorted");
        if (r > prev) acc += integrate([&](double s) { return phi.h_inv(A(s)); }, prev, r, kNoisyQuad);
        prev = r;
        out.push_back(alpha + scale * acc);
    }
    return out;
}

EntireCertificate entire_sandwich(const PhiSpec& phi, const NonlinearitySpec& nl, const WeightSpec& ws, int N,
                                  double alpha, double epsilon, double horizon, const EntireControls& c) {
    if (!(alpha > 0.0) || !(epsilon > 0.0) || !(horizon > 0.0))
        throw DomainError("entire sandwich needs alpha, epsilon, horizon > 0");
    const std::string ko_hyp = "f does not satisfy the Keller-Osserman condition";
    auto ko = check_KO(phi, nl, c.classifier);
    if (ko.verdict == Verdict::Converges)
        throw PreconditionRejected("entire-requires-ko-failure", ko_hyp,
                                   "KO integral converges for " + nl.label() +
                                       ": entire large solutions are excluded");
    if (ko.verdict != Verdict::Diverges)
        throw PreconditionRejected("ko-inconclusive", ko_hyp, "KO verdict is inconclusive for " + nl.label());
    auto grow = check_A_rho(phi, ws, WeightComponent::Lower, N, c.classifier);
    if (grow.verdict != Verdict::Diverges)
        throw PreconditionRejected("growth-lower-weight", "int_1^inf h^{-1}(calA_lower) diverges",
                                   "growth condition on the lower weight is " + to_string(grow.verdict));
    auto sub = check_h_inv_subadditive(phi, c.subadditivity_samples);
    if (sub.verdict != Verdict::Holds)
        throw PreconditionRejected("h-inv-subadditivity", "h^{-1}(s+t) <= h^{-1}(s) + h^{-1}(t)",
                                   "h^{-1} is not subadditive: " + sub.note);

    EntireCertificate cert;
    cert.budget = compute_H_bar(phi, nl, ws, N, c.budget_horizon, c.classifier);
    if (cert.budget.verdict != Verdict::Converges)
        throw PreconditionRejected("budget-not-finite", "H-bar is finite",
                                   "H-bar budget verdict is " + to_string(cert.budget.verdict));
    cert.alpha = alpha;
    cert.epsilon = epsilon;
    cert.H_bar = cert.budget.estimate;
    cert.beta = alpha + epsilon + cert.H_bar;
    cert.u_alpha = solve_ivp(phi, nl, ws.upper, N, alpha, horizon, c.solver);
    cert.u_beta = solve_ivp(phi, nl, ws.lower, N, cert.beta, horizon, c.solver);
    if (cert.u_alpha.status != ProfileStatus::Completed || cert.u_beta.status != ProfileStatus::Completed)
        throw NumericFailure("entire profiles did not reach the horizon", cert.u_alpha.R);
    double worst = kInf;
    for (std::size_t i = 0; i < cert.u_alpha.u.size(); ++i)
        worst = std::min(worst, cert.u_beta.u[i] - cert.u_alpha.u[i]);
    cert.ordering_margin = worst;
    cert.ordered = worst >= 0.0;

    // Upper estimate for u_alpha, claimed for large r only.
    const auto& r = cert.u_alpha.r;
    CalF calF(nl, phi.indices().l1);
    AveragedWeight A(ws.upper.fn, N, std::max(horizon, 1.0));
    double acc = 0.0, prev = 0.0;
    cert.estimate_bound.resize(r.size());
    for (std::size_t i = 0; i < r.size(); ++i) {
        if (r[i] > prev) acc += integrate([&](double s) { return phi.h_inv(A(s)); }, prev, r[i], kNoisyQuad);
        prev = r[i];
        try {
            cert.estimate_bound[i] = calF.inv(acc);
        } catch (const DomainError&) {
            cert.estimate_bound[i] = std::nan("");
        }
    }
    std::optional<double> onset;
    for (std::size_t i = r.size(); i-- > 0;) {
        double b = cert.estimate_bound[i];
        if (std::isnan(b) || cert.u_alpha.u[i] > b * (1.0 + 1e-10)) break;
        onset = r[i];
    }
    cert.estimate_onset = onset;
    cert.estimate_holds_eventually = onset.has_value() && *onset < r.back();

    auto minorant = growth_minorant(phi, nl, ws.upper, N, alpha, r);
    cert.minorant_holds = true;
    for (std::size_t i = 0; i < r.size(); ++i)
        if (cert.u_alpha.u[i] < minorant[i] - 1e-8 * (1.0 + std::abs(minorant[i]))) cert.minorant_holds = false;
    cert.certified = cert.ordered && cert.estimate_holds_eventually && cert.minorant_holds;
    return cert;
}

}  // namespace blowup

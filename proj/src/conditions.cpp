#include "blowup/conditions.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>

namespace blowup {

std::string to_string(ConditionId id) {
    switch (id) {
        case ConditionId::KO: return "KO";
        case ConditionId::ARho: return "A-rho";
        case ConditionId::HBar: return "H-bar";
        case ConditionId::HTilde: return "H-tilde";
        case ConditionId::HInvSubadditive: return "h-inv-subadditive";
    }
    return "unknown";
}

std::string to_string(Verdict v) {
    switch (v) {
        case Verdict::Converges: return "converges";
        case Verdict::Diverges: return "diverges";
        case Verdict::Inconclusive: return "inconclusive";
        case Verdict::Holds: return "holds";
        case Verdict::Fails: return "fails";
    }
    return "unknown";
}

std::string to_string(Confidence c) {
    switch (c) {
        case Confidence::Analytic: return "analytic";
        case Confidence::Fitted: return "fitted";
        case Confidence::Sampled: return "sampled";
    }
    return "unknown";
}

namespace {

std::string fmt(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", x);
    return buf;
}

double integrate_span(const RealFn& g, double a, double b, const QuadTolerance& tol) {
    auto br = geometric_breaks(a, b, 10.0);
    return integrate_piecewise(g, br, tol);
}

struct Fit {
    double slope = 0.0;
    double residual = 0.0;
};

Fit least_squares(const std::vector<double>& x, const std::vector<double>& y) {
    const double n = static_cast<double>(x.size());
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    Fit f;
    f.slope = sxy / sxx;
    double ss = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        double r = y[i] - (my + f.slope * (x[i] - mx));
        ss += r * r;
    }
    f.residual = std::sqrt(ss / n);
    return f;
}

}  // namespace

ConditionReport classify_improper(ConditionId id, const RealFn& g, double lower, const ClassifierControls& c) {
    ConditionReport rep;
    rep.id = id;
    rep.cutoffs = c.cutoffs;
    if (c.cutoffs.empty()) throw DomainError("cutoff ladder is empty");
    for (std::size_t i = 0; i < c.cutoffs.size(); ++i) {
        double prev = i == 0 ? lower : c.cutoffs[i - 1];
        if (!(c.cutoffs[i] > prev)) throw DomainError("cutoffs must increase and exceed the lower limit");
    }

    std::vector<double> incr(c.cutoffs.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < c.cutoffs.size(); ++i) {
        double a = i == 0 ? lower : c.cutoffs[i - 1];
        incr[i] = integrate_span(g, a, c.cutoffs[i], c.quad);
        acc += incr[i];
        rep.partial_values.push_back(acc);
    }
    rep.estimate = acc;

    // Increments between consecutive cutoffs, normalised by the log-width so
    // that an integrand t^-a yields density slope 1 - a for any ladder.
    std::vector<double> xs, ys, dens;
    std::size_t last_positive = 0;
    bool any_positive = false;
    for (std::size_t i = 1; i < c.cutoffs.size(); ++i) {
        if (incr[i] > 0.0) {
            any_positive = true;
            last_positive = i;
        }
    }
    if (!any_positive) {
        rep.fitted_verdict = Verdict::Converges;
        rep.verdict = Verdict::Converges;
        rep.confidence = Confidence::Fitted;
        rep.note = "integrand vanishes on every sampled increment";
        return rep;
    }
    if (last_positive + 1 < c.cutoffs.size()) {
        rep.fitted_verdict = Verdict::Converges;
        rep.verdict = Verdict::Converges;
        rep.confidence = Confidence::Fitted;
        rep.note = "increments vanish beyond cutoff " + fmt(c.cutoffs[last_positive]);
        return rep;
    }
    for (std::size_t i = 1; i < c.cutoffs.size(); ++i) {
        if (!(incr[i] > 0.0)) continue;
        double a = c.cutoffs[i - 1], b = c.cutoffs[i];
        xs.push_back(0.5 * (std::log10(a) + std::log10(b)));
        double d = incr[i] / std::log(b / a);
        dens.push_back(d);
        ys.push_back(std::log10(d));
    }
    if (xs.size() > c.fit_points) {
        std::size_t drop = xs.size() - c.fit_points;
        xs.erase(xs.begin(), xs.begin() + drop);
        ys.erase(ys.begin(), ys.begin() + drop);
        dens.erase(dens.begin(), dens.begin() + drop);
    }
    if (xs.size() < 2) {
        rep.fitted_verdict = Verdict::Inconclusive;
        rep.verdict = Verdict::Inconclusive;
        rep.note = "fewer than two positive increments to fit";
        return rep;
    }
    Fit fit = least_squares(xs, ys);
    rep.fitted_tail_exponent = fit.slope;
    rep.fit_residual = fit.residual;

    // Doubling beyond the last cutoff until the local slope settles.
    {
        double a = c.cutoffs.back();
        double prev_d = 0.0, prev_slope = 0.0;
        bool have_slope = false;
        for (int j = 0; j <= c.max_doublings; ++j) {
            double d = integrate(g, a, 2.0 * a, c.quad) / std::log(2.0);
            if (!(d > 0.0)) break;
            if (j > 0) {
                double s = std::log10(d / prev_d) / std::log10(2.0);
                if (have_slope && std::abs(s - prev_slope) <= c.doubling_stability * std::max(1.0, std::abs(s))) {
                    rep.local_tail_slope = s;
                    break;
                }
                prev_slope = s;
                have_slope = true;
                rep.local_tail_slope = s;
            }
            prev_d = d;
            a *= 2.0;
        }
    }

    const double last_ratio = dens.back() / dens[dens.size() - 2];
    Verdict v = Verdict::Inconclusive;
    std::string note;
    if (fit.residual > c.residual_threshold) {
        note = "fit residual " + fmt(fit.residual) + " above threshold";
    } else if (fit.slope >= c.diverge_slope) {
        v = Verdict::Diverges;
        if (rep.local_tail_slope && *rep.local_tail_slope <= c.converge_slope) {
            v = Verdict::Inconclusive;
            note = "fitted slope says divergent but the local tail slope decays";
        }
    } else if (fit.slope <= c.converge_slope && last_ratio < 1.0) {
        v = Verdict::Converges;
        if (rep.local_tail_slope && *rep.local_tail_slope >= c.diverge_slope) {
            v = Verdict::Inconclusive;
            note = "fitted slope says convergent but the local tail slope does not decay";
        }
    } else {
        note = "fitted slope " + fmt(fit.slope) + " inside the undecided band";
    }
    rep.fitted_verdict = v;
    rep.verdict = v;
    rep.confidence = Confidence::Fitted;
    rep.note = note;
    if (v == Verdict::Converges) {
        double q = incr.back() / incr[incr.size() - 2];
        if (q < 1.0) rep.estimate = acc + incr.back() * q / (1.0 - q);
    }
    return rep;
}

std::optional<Verdict> ko_analytic_verdict(const PhiSpec& phi, const NonlinearitySpec& nl) {
    const Indices& idx = phi.indices();
    auto tail = nl.tail_exponent_hint();
    if (!idx.exact || !tail) return std::nullopt;
    const double g1 = *tail + 1.0;
    if (g1 / idx.m > 1.0) return Verdict::Converges;
    // At the borderline only an exact power law is decided (log divergence).
    if (g1 / idx.l < 1.0) return Verdict::Diverges;
    if (g1 / idx.l == 1.0 && nl.family() == FFamily::Power && idx.l == idx.m) return Verdict::Diverges;
    return std::nullopt;
}

ConditionReport check_KO(const PhiSpec& phi, const NonlinearitySpec& nl, const ClassifierControls& c) {
    if (c.cutoffs.empty() || c.cutoffs.front() <= 1.0) throw DomainError("KO cutoffs must start above 1");
    if (!(nl.F(1.0) > 0.0)) throw DomainError("degenerate input: F vanishes on [0, 1]");
    auto g = [&](double t) { return 1.0 / phi.Phi_inv(nl.F(t)); };
    ConditionReport rep = classify_improper(ConditionId::KO, g, 1.0, c);
    rep.analytic_verdict = ko_analytic_verdict(phi, nl);
    if (rep.analytic_verdict) {
        if (rep.fitted_verdict != Verdict::Inconclusive && rep.fitted_verdict != *rep.analytic_verdict)
            rep.note += (rep.note.empty() ? "" : "; ") + std::string("fitted verdict disagrees with analytic");
        rep.verdict = *rep.analytic_verdict;
        rep.confidence = Confidence::Analytic;
    }
    return rep;
}

AveragedWeight::AveragedWeight(RealFn rho, int N, double s_max)
    : N_(N),
      W_(
          [rho, N](double t) { return std::pow(t, N - 1) * rho(t); },
          [s_max] {
              std::vector<double> b{0.0};
              double x = 1e-3;
              for (; x < s_max; x *= 10.0) b.push_back(x);
              b.push_back(x);
              return b;
          }(),
          kNoisyQuad) {
    if (N < 1) throw DomainError("dimension N must be >= 1");
}

double AveragedWeight::operator()(double s) const {
    if (!(s > 0.0)) {
        if (s == 0.0) return 0.0;
        throw DomainError("calA needs s >= 0");
    }
    return W_(s) * std::pow(s, 1 - N_);
}

ConditionReport check_A_rho(const PhiSpec& phi, const RealFn& rho, int N, const ClassifierControls& c) {
    if (c.cutoffs.empty() || c.cutoffs.front() <= 1.0) throw DomainError("cutoffs must start above 1");
    double reach = c.cutoffs.back() * std::pow(2.0, c.max_doublings + 1);
    AveragedWeight A(rho, N, reach);
    auto g = [&](double s) { return phi.h_inv(A(s)); };
    return classify_improper(ConditionId::ARho, g, 1.0, c);
}

ConditionReport check_A_rho(const PhiSpec& phi, const WeightSpec& ws, WeightComponent which, int N,
                            const ClassifierControls& c) {
    return check_A_rho(phi, ws.component(which), N, c);
}

std::vector<double> decade_ladder(double horizon) {
    if (!(horizon > 1.0)) throw DomainError("budget horizon must exceed 1");
    std::vector<double> v;
    for (double x = 1.0; x < horizon * (1 - 1e-12); x *= 10.0) v.push_back(x);
    v.push_back(horizon);
    return v;
}

namespace {

// Shared machinery of the two budgets: the factor vanishing on a radial weight
// times h^{-1}(scale(s) * f(calF^{-1}(I(s)))), with I(s) = int_0^s h^{-1}(calA_rho).
ConditionReport nested_budget(ConditionId id, const PhiSpec& phi, const NonlinearitySpec& nl,
                              const RealFn& rho_inner, int N, const std::function<double(double)>& factor,
                              bool multiply_by_s, double horizon, const ClassifierControls& base) {
    ClassifierControls c = base;
    c.cutoffs = decade_ladder(horizon);
    const double reach = horizon * std::pow(2.0, c.max_doublings + 1);
    CalF calF(nl, phi.indices().l1);
    AveragedWeight A(rho_inner, N, reach);
    std::vector<double> breaks{0.0};
    double x = 1e-3;
    for (; x < reach; x *= 10.0) breaks.push_back(x);
    breaks.push_back(x);
    CumulativeIntegral inner([&](double t) { return phi.h_inv(A(t)); }, breaks, kNoisyQuad);

    auto g = [&](double s) -> double {
        double fac = factor(s);
        if (fac == 0.0) return 0.0;
        double I = inner(s);
        double u;
        try {
            u = calF.inv(I);
        } catch (const DomainError& e) {
            throw StructuralError("calF^{-1} undefined at inner value " + fmt(I) + " for s = " + fmt(s) + ": " +
                                      e.what(),
                                  s, s);
        }
        double arg = nl.f(u);
        if (multiply_by_s) arg *= s;
        return fac * phi.h_inv(arg);
    };
    ConditionReport rep = classify_improper(id, g, 0.0, c);
    return rep;
}

}  // namespace

ConditionReport compute_H_bar(const PhiSpec& phi, const NonlinearitySpec& nl, const WeightSpec& ws, int N,
                              double horizon, const ClassifierControls& c) {
    const Indices idx = phi.indices();
    const double reach = horizon * std::pow(2.0, c.max_doublings + 1);
    AveragedWeight Aosc(ws.component(WeightComponent::Osc), N, reach);
    auto factor = [&](double s) { return xi_eta(idx, XiEta::Eta4, Aosc(s)); };
    ConditionReport rep =
        nested_budget(ConditionId::HBar, phi, nl, ws.upper.fn, N, factor, false, horizon, c);
    bool all_zero = std::all_of(rep.partial_values.begin(), rep.partial_values.end(),
                                [](double v) { return v == 0.0; });
    if (all_zero) rep.note = "oscillation vanishes on the horizon; H-bar = 0";
    return rep;
}

ConditionReport compute_H_tilde(const PhiSpec& phi, const NonlinearitySpec& nl, const WeightSpec& ws, int N,
                                double horizon, const ClassifierControls& c) {
    RealFn a_star = ws.component(WeightComponent::BallLower);
    RealFn a_upper_star = ws.component(WeightComponent::BallUpper);
    const Indices idx = phi.indices();
    auto factor = [&](double s) {
        double b = xi_eta(idx, XiEta::Eta4, a_upper_star(s)) - xi_eta(idx, XiEta::Eta3, a_star(s));
        return b > 0.0 ? b : 0.0;
    };
    return nested_budget(ConditionId::HTilde, phi, nl, a_upper_star, N, factor, true, horizon, c);
}

ConditionReport check_h_inv_subadditive(const PhiSpec& phi, std::size_t samples, std::uint64_t seed) {
    if (samples < 10000) throw DomainError("subadditivity probe needs at least 1e4 samples");
    ConditionReport rep;
    rep.id = ConditionId::HInvSubadditive;
    rep.confidence = Confidence::Sampled;

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> uni(0.0, 1e6);
    std::uniform_real_distribution<double> logu(std::log(1e-6), std::log(1e6));
    Witness worst;
    worst.violation = -kInf;
    std::size_t tested = 0, violations = 0;
    auto probe = [&](double s, double t) {
        double hs = phi.h_inv(s), ht = phi.h_inv(t);
        double excess = phi.h_inv(s + t) - hs - ht;
        double scale = hs + ht;
        double rel = scale > 0.0 ? excess / scale : excess;
        ++tested;
        if (excess > 1e-9 * scale) ++violations;
        if (rel > worst.violation) worst = Witness{s, t, rel};
    };
    const std::size_t half = samples / 2;
    for (std::size_t i = 0; i < half; ++i) probe(uni(rng), uni(rng));
    for (std::size_t i = half; i < samples; ++i) probe(std::exp(logu(rng)), std::exp(logu(rng)));
    auto grid = log_grid(1e-6, 1e6, 100);
    for (double s : grid)
        for (double t : grid) probe(s, t);

    rep.estimate = worst.violation;
    if (violations > 0) {
        rep.verdict = Verdict::Fails;
        rep.fitted_verdict = Verdict::Fails;
        rep.witness = worst;
    } else {
        rep.verdict = Verdict::Holds;
        rep.fitted_verdict = Verdict::Holds;
    }
    rep.note = std::to_string(violations) + " violations in " + std::to_string(tested) + " sampled pairs";
    return rep;
}

}  // namespace blowup

#include "blowup/nfunction.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace blowup {

std::string to_string(PhiFamily f) {
    switch (f) {
        case PhiFamily::ConstantTwo: return "constant-two";
        case PhiFamily::Power: return "power";
        case PhiFamily::PAndQ: return "p-and-q";
        case PhiFamily::Elasticity: return "elasticity";
        case PhiFamily::ElasticitySqrt: return "elasticity-sqrt";
        case PhiFamily::PlasticityLog: return "plasticity-log";
        case PhiFamily::Custom: return "custom";
    }
    return "unknown";
}

namespace {

void require_nonneg(double t, const char* what) {
    if (std::isnan(t) || t < 0.0) throw DomainError(std::string(what) + " needs a nonnegative argument");
}

// Phi spans many decades, so its quadrature is held to a relative criterion.
const QuadTolerance kPhiQuad{1e-300, 1e-12, 4000};

double quadrature_Phi(const RealFn& h, double t) {
    if (t == 0.0) return 0.0;
    std::vector<double> breaks{0.0};
    for (double x = t * 1e-8; x < t; x *= 10.0) breaks.push_back(x);
    breaks.push_back(t);
    return integrate_piecewise(h, breaks, kPhiQuad);
}

std::string fmt(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", x);
    return buf;
}

void check_h_increasing(const RealFn& phi, const IndexGrid& grid) {
    double prev_h = 0.0;
    double prev_t = 0.0;
    for (double t : log_grid(grid.t_min, grid.t_max, grid.points)) {
        double ph = phi(t);
        if (!(ph > 0.0)) throw StructuralError("phi is not positive at t = " + fmt(t), t, t);
        double hv = ph * t;
        if (!(hv > prev_h))
            throw StructuralError("h = phi(t) t is not strictly increasing on [" + fmt(prev_t) + ", " +
                                      fmt(t) + "]",
                                  prev_t, t);
        prev_h = hv;
        prev_t = t;
    }
}

}  // namespace

PhiSpec PhiSpec::finish(Impl impl, std::optional<Indices> exact) {
    PhiSpec spec;
    if (!impl.h) {
        RealFn phi = impl.phi;
        impl.h = [phi](double t) { return t == 0.0 ? 0.0 : phi(t) * t; };
    }
    if (exact) {
        impl.indices = *exact;
        impl.indices.exact = true;
    }
    spec.impl_ = std::make_shared<Impl>(std::move(impl));
    if (!exact) {
        auto mutable_impl = std::const_pointer_cast<Impl>(spec.impl_);
        mutable_impl->indices = estimate_indices(spec);
    }
    return spec;
}

PhiSpec PhiSpec::constant_two() {
    Impl impl;
    impl.family = PhiFamily::ConstantTwo;
    impl.label = "constant-two";
    impl.phi = [](double) { return 2.0; };
    impl.h = [](double t) { return 2.0 * t; };
    impl.Phi = [](double t) { return t * t; };
    impl.Phi_inv = [](double y) { return std::sqrt(y); };
    impl.h_inv = [](double s) { return 0.5 * s; };
    return finish(std::move(impl), Indices{2.0, 2.0, 1.0, 1.0, true});
}

PhiSpec PhiSpec::unit() {
    Impl impl;
    impl.family = PhiFamily::Custom;
    impl.label = "unit";
    impl.phi = [](double) { return 1.0; };
    impl.h = [](double t) { return t; };
    impl.Phi = [](double t) { return 0.5 * t * t; };
    impl.Phi_inv = [](double y) { return std::sqrt(2.0 * y); };
    impl.h_inv = [](double s) { return s; };
    return finish(std::move(impl), Indices{2.0, 2.0, 1.0, 1.0, true});
}

PhiSpec PhiSpec::power(double p) {
    if (!(p > 1.0)) throw ConfigError("power family needs p > 1, got " + fmt(p));
    Impl impl;
    impl.family = PhiFamily::Power;
    impl.params = {p};
    impl.label = "power(p=" + fmt(p) + ")";
    impl.phi = [p](double t) { return p * std::pow(t, p - 2.0); };
    impl.h = [p](double t) { return t == 0.0 ? 0.0 : p * std::pow(t, p - 1.0); };
    impl.Phi = [p](double t) { return std::pow(t, p); };
    impl.Phi_inv = [p](double y) { return std::pow(y, 1.0 / p); };
    impl.h_inv = [p](double s) { return s == 0.0 ? 0.0 : std::pow(s / p, 1.0 / (p - 1.0)); };
    return finish(std::move(impl), Indices{p, p, p - 1.0, p - 1.0, true});
}

PhiSpec PhiSpec::p_and_q(double p, double q) {
    if (!(p > 1.0) || !(q > p)) throw ConfigError("p-and-q family needs 1 < p < q");
    Impl impl;
    impl.family = PhiFamily::PAndQ;
    impl.params = {p, q};
    impl.label = "p-and-q(p=" + fmt(p) + ",q=" + fmt(q) + ")";
    impl.phi = [p, q](double t) { return p * std::pow(t, p - 2.0) + q * std::pow(t, q - 2.0); };
    impl.h = [p, q](double t) {
        return t == 0.0 ? 0.0 : p * std::pow(t, p - 1.0) + q * std::pow(t, q - 1.0);
    };
    impl.Phi = [p, q](double t) { return std::pow(t, p) + std::pow(t, q); };
    return finish(std::move(impl), std::nullopt);
}

PhiSpec PhiSpec::elasticity(double gamma) {
    if (!(gamma > 1.0)) throw ConfigError("elasticity family needs gamma > 1");
    Impl impl;
    impl.family = PhiFamily::Elasticity;
    impl.params = {gamma};
    impl.label = "elasticity(gamma=" + fmt(gamma) + ")";
    impl.phi = [gamma](double t) { return 2.0 * gamma * std::pow(1.0 + t * t, gamma - 1.0); };
    impl.h = [gamma](double t) { return 2.0 * gamma * t * std::pow(1.0 + t * t, gamma - 1.0); };
    impl.Phi = [gamma](double t) { return std::expm1(gamma * std::log1p(t * t)); };
    impl.Phi_inv = [gamma](double y) {
        if (std::isinf(y)) return kInf;
        return std::sqrt(std::expm1(std::log1p(y) / gamma));
    };
    return finish(std::move(impl), std::nullopt);
}

PhiSpec PhiSpec::elasticity_sqrt(double gamma) {
    if (!(gamma >= 1.0)) throw ConfigError("elasticity-sqrt family needs gamma >= 1");
    // w = sqrt(1+t^2) - 1 written without cancellation.
    auto w = [](double t) { return t * (t / (std::hypot(1.0, t) + 1.0)); };
    Impl impl;
    impl.family = PhiFamily::ElasticitySqrt;
    impl.params = {gamma};
    impl.label = "elasticity-sqrt(gamma=" + fmt(gamma) + ")";
    impl.phi = [gamma, w](double t) {
        return gamma * std::pow(w(t), gamma - 1.0) / std::hypot(1.0, t);
    };
    impl.h = [gamma, w](double t) {
        return t == 0.0 ? 0.0 : gamma * std::pow(w(t), gamma - 1.0) * (t / std::hypot(1.0, t));
    };
    impl.Phi = [gamma, w](double t) { return std::pow(w(t), gamma); };
    impl.Phi_inv = [gamma](double y) {
        if (std::isinf(y)) return kInf;
        double v = std::pow(y, 1.0 / gamma);
        return std::sqrt(v * (v + 2.0));
    };
    return finish(std::move(impl), std::nullopt);
}

PhiSpec PhiSpec::plasticity_log(double p) {
    if (!(p > 1.0)) throw ConfigError("plasticity-log family needs p > 1");
    Impl impl;
    impl.family = PhiFamily::PlasticityLog;
    impl.params = {p};
    impl.label = "plasticity-log(p=" + fmt(p) + ")";
    impl.phi = [p](double t) {
        return p * std::pow(t, p - 2.0) * std::log1p(t) + std::pow(t, p - 1.0) / (1.0 + t);
    };
    impl.h = [p](double t) {
        if (t == 0.0) return 0.0;
        return p * std::pow(t, p - 1.0) * std::log1p(t) + std::pow(t, p) / (1.0 + t);
    };
    impl.Phi = [p](double t) { return std::pow(t, p) * std::log1p(t); };
    return finish(std::move(impl), std::nullopt);
}

PhiSpec PhiSpec::custom(RealFn phi, std::optional<RealFn> Phi, std::optional<Indices> exact_indices,
                        std::string label) {
    if (!phi) throw ConfigError("custom phi callable is empty");
    Impl impl;
    impl.family = PhiFamily::Custom;
    impl.label = std::move(label);
    impl.phi = std::move(phi);
    if (Phi) impl.Phi = std::move(*Phi);
    return finish(std::move(impl), exact_indices);
}

PhiSpec PhiSpec::tabulated(std::vector<double> t, std::vector<double> phi_values) {
    LogLogTable table(std::move(t), std::move(phi_values));
    Impl impl;
    impl.family = PhiFamily::Custom;
    impl.label = "custom(table)";
    impl.phi = [table](double s) { return table(s); };
    impl.table = table;
    check_h_increasing(impl.phi, IndexGrid{});
    PhiSpec spec = finish(std::move(impl), std::nullopt);
    validate_phi(spec);
    return spec;
}

double PhiSpec::phi(double t) const {
    if (!(t > 0.0)) throw DomainError("phi is defined for t > 0");
    return impl_->phi(t);
}

double PhiSpec::h(double t) const {
    require_nonneg(t, "h");
    if (t == 0.0) return 0.0;
    return impl_->h(t);
}

double PhiSpec::Phi(double t) const {
    require_nonneg(t, "Phi");
    if (t == 0.0) return 0.0;
    if (impl_->Phi) return impl_->Phi(t);
    return quadrature_Phi(impl_->h, t);
}

double PhiSpec::Phi_inv(double y) const {
    require_nonneg(y, "Phi_inv");
    if (y == 0.0) return 0.0;
    if (impl_->Phi_inv) return impl_->Phi_inv(y);
    return invert_increasing([this](double t) { return Phi(t); }, y);
}

double PhiSpec::h_inv(double s) const {
    require_nonneg(s, "h_inv");
    if (s == 0.0) return 0.0;
    if (impl_->h_inv) return impl_->h_inv(s);
    return invert_increasing([this](double t) { return h(t); }, s);
}

double PhiSpec::h_log_slope(double t) const {
    if (!(t > 0.0)) throw DomainError("index ratio needs t > 0");
    double d = t * 1e-5;
    return (impl_->h(t + d) - impl_->h(t - d)) / (2.0 * d) * t / impl_->h(t);
}

double PhiSpec::Phi_ratio(double t) const {
    if (!(t > 0.0)) throw DomainError("index ratio needs t > 0");
    return impl_->phi(t) * t * t / Phi(t);
}

Indices estimate_indices(const PhiSpec& spec, const IndexGrid& grid) {
    if (spec.indices().exact) return spec.indices();
    if (!(grid.t_min <= 1e-6 && grid.t_max >= 1e6 && grid.points >= 200))
        throw DomainError("index grid must span [1e-6, 1e6] with at least 200 points");
    Indices out;
    out.l = out.l1 = kInf;
    out.m = out.m1 = -kInf;
    for (double t : log_grid(grid.t_min, grid.t_max, grid.points)) {
        double r = spec.Phi_ratio(t);
        double r1 = spec.h_log_slope(t);
        if (!std::isfinite(r) || !std::isfinite(r1))
            throw NumericFailure("index ratio not finite at t = " + fmt(t), r);
        out.l = std::min(out.l, r);
        out.m = std::max(out.m, r);
        out.l1 = std::min(out.l1, r1);
        out.m1 = std::max(out.m1, r1);
    }
    out.l *= 1.0 - grid.safety;
    out.l1 *= 1.0 - grid.safety;
    out.m *= 1.0 + grid.safety;
    out.m1 *= 1.0 + grid.safety;
    out.exact = false;
    return out;
}

void validate_phi(const PhiSpec& spec, const IndexGrid& grid) {
    check_h_increasing([&spec](double t) { return spec.phi(t); }, grid);
    const Indices& idx = spec.indices();
    if (!(idx.l > 1.0))
        throw StructuralError("lower index l = " + fmt(idx.l) + " is not above 1", grid.t_min, grid.t_max);
    if (!(idx.l1 > 0.0))
        throw StructuralError("lower index l1 = " + fmt(idx.l1) + " is not positive", grid.t_min,
                              grid.t_max);
}

double xi_eta(const Indices& idx, XiEta which, double t) {
    require_nonneg(t, "xi/eta");
    auto mn = [t](double a, double b) { return std::min(std::pow(t, a), std::pow(t, b)); };
    auto mx = [t](double a, double b) { return std::max(std::pow(t, a), std::pow(t, b)); };
    switch (which) {
        case XiEta::Xi1: return mn(idx.l, idx.m);
        case XiEta::Xi2: return mx(idx.l, idx.m);
        case XiEta::Xi3: return mn(idx.l1, idx.m1);
        case XiEta::Xi4: return mx(idx.l1, idx.m1);
        case XiEta::Eta1: return mn(1.0 / idx.l, 1.0 / idx.m);
        case XiEta::Eta2: return mx(1.0 / idx.l, 1.0 / idx.m);
        case XiEta::Eta3: return mn(1.0 / idx.l1, 1.0 / idx.m1);
        case XiEta::Eta4: return mx(1.0 / idx.l1, 1.0 / idx.m1);
    }
    return 0.0;
}

}  // namespace blowup

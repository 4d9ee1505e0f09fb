#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "blowup/nfunction.hpp"
#include "oracles.hpp"

#include <cmath>

using namespace blowup;

namespace {

std::vector<PhiSpec> six_families() {
    return {PhiSpec::constant_two(),     PhiSpec::power(3.0),          PhiSpec::p_and_q(2.0, 4.0),
            PhiSpec::elasticity(2.0),    PhiSpec::elasticity_sqrt(2.0), PhiSpec::plasticity_log(2.0)};
}

double rel_gap(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

}  // namespace

TEST_CASE("Phi closed forms and quadrature") {
    CHECK(PhiSpec::power(2.0).Phi(3.0) == doctest::Approx(9.0).epsilon(1e-15));
    for (const auto& s : six_families()) CHECK(s.Phi(0.0) == 0.0);

    double oracle_val = oracle::simpson([](double s) { return 2 * s + 4 * s * s * s; }, 0.0, 1.0);
    CHECK(PhiSpec::p_and_q(2.0, 4.0).Phi(1.0) == doctest::Approx(oracle_val).epsilon(1e-12));

    // Same operator without a closed form: exercises the quadrature path.
    auto pq_quad = PhiSpec::custom([](double t) { return 2.0 + 4.0 * t * t; });
    CHECK_FALSE(pq_quad.has_closed_form_Phi());
    CHECK(pq_quad.Phi(1.0) == doctest::Approx(oracle_val).epsilon(1e-11));
    CHECK(pq_quad.Phi(1e-5) == doctest::Approx(1e-10 + 1e-20).epsilon(1e-10));
    CHECK(pq_quad.Phi(300.0) == doctest::Approx(300.0 * 300.0 + std::pow(300.0, 4)).epsilon(1e-10));
}

TEST_CASE("Phi_inv") {
    CHECK(PhiSpec::power(3.0).Phi_inv(8.0) == doctest::Approx(2.0).epsilon(1e-14));
    for (const auto& s : six_families()) CHECK(s.Phi_inv(0.0) == 0.0);

    auto pl = PhiSpec::plasticity_log(2.0);
    double t_star = oracle::bisect([](double t) { return t * t * std::log(1.0 + t); }, 1.0, 0.0, 10.0);
    CHECK(rel_gap(pl.Phi_inv(1.0), t_star) < 1e-12);
    // Its Phi is the integral of h, checked independently.
    double by_quad = oracle::simpson([&](double s) { return pl.h(s); }, 0.0, t_star);
    CHECK(by_quad == doctest::Approx(1.0).epsilon(1e-10));

    CHECK_THROWS_AS(pl.Phi_inv(-1.0), DomainError);
}

TEST_CASE("h and h_inv") {
    auto p3 = PhiSpec::power(3.0);
    CHECK(p3.h(2.0) == doctest::Approx(12.0));
    CHECK(p3.h_inv(12.0) == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(PhiSpec::constant_two().h_inv(6.0) == doctest::Approx(3.0));
    // phi(t) = 2 gamma (1 + t^2)^(gamma - 1), gamma = 2, t = 1.
    CHECK(PhiSpec::elasticity(2.0).h(1.0) == doctest::Approx(8.0).epsilon(1e-15));
    for (const auto& s : six_families()) {
        CHECK(s.h(0.0) == 0.0);
        CHECK(s.h_inv(0.0) == 0.0);
        CHECK_THROWS_AS(s.h(-1.0), DomainError);
        CHECK_THROWS_AS(s.h_inv(-1.0), DomainError);
    }
}

TEST_CASE("index estimation") {
    auto p = PhiSpec::power(2.5).indices();
    CHECK(p.exact);
    CHECK(p.l == 2.5);
    CHECK(p.m == 2.5);
    CHECK(p.l1 == 1.5);
    CHECK(p.m1 == 1.5);
    auto c = PhiSpec::constant_two().indices();
    CHECK((c.l == 2.0 && c.m == 2.0 && c.l1 == 1.0 && c.m1 == 1.0));

    // Brute-force sampled inf/sup of the two closed-form ratios.
    double lo = 1e9, hi = -1e9, lo1 = 1e9, hi1 = -1e9;
    for (double t : oracle::log_points(1e-6, 1e6, 4001)) {
        double r = (2 * t * t + 4 * std::pow(t, 4)) / (t * t + std::pow(t, 4));
        double r1 = (2 + 12 * t * t) / (2 + 4 * t * t);
        lo = std::min(lo, r);
        hi = std::max(hi, r);
        lo1 = std::min(lo1, r1);
        hi1 = std::max(hi1, r1);
    }
    auto pq = PhiSpec::p_and_q(2.0, 4.0).indices();
    CHECK_FALSE(pq.exact);
    CHECK(pq.l <= lo);
    CHECK(pq.m >= hi);
    CHECK(pq.l1 <= lo1);
    CHECK(pq.m1 >= hi1);
    CHECK(rel_gap(pq.l, 2.0) < 0.01);
    CHECK(rel_gap(pq.m, 4.0) < 0.01);
    CHECK(rel_gap(pq.l1, 1.0) < 0.01);
    CHECK(rel_gap(pq.m1, 3.0) < 0.01);

    IndexGrid narrow;
    narrow.t_max = 10.0;
    CHECK_THROWS_AS(estimate_indices(PhiSpec::p_and_q(2.0, 4.0), narrow), DomainError);
}

TEST_CASE("hypotheses hold on sampled grids for the six families") {
    for (const auto& s : six_families()) {
        CAPTURE(s.label());
        CHECK_NOTHROW(validate_phi(s));
        const auto& idx = s.indices();
        CHECK(idx.l > 1.0);
        CHECK(idx.l1 > 0.0);
        for (double t : oracle::log_points(1e-6, 1e6, 301)) {
            CHECK(s.phi(t) > 0.0);
            // Exact indices are attained, so allow rounding and difference noise.
            double r = s.Phi_ratio(t);
            CHECK(r >= idx.l * (1 - 1e-12));
            CHECK(r <= idx.m * (1 + 1e-12));
            double r1 = s.h_log_slope(t);
            CHECK(r1 >= idx.l1 * (1 - 1e-8));
            CHECK(r1 <= idx.m1 * (1 + 1e-8));
        }
    }
}

TEST_CASE("xi and eta") {
    auto p2 = PhiSpec::power(2.0);
    CHECK(xi_eta(p2, XiEta::Xi1, 3.0) == doctest::Approx(9.0));
    for (const auto& s : six_families())
        for (auto w : {XiEta::Xi1, XiEta::Xi2, XiEta::Xi3, XiEta::Xi4, XiEta::Eta1, XiEta::Eta2,
                       XiEta::Eta3, XiEta::Eta4})
            CHECK(xi_eta(s, w, 1.0) == 1.0);
    Indices pq{2.0, 4.0, 1.0, 3.0, false};
    CHECK(xi_eta(pq, XiEta::Xi2, 0.5) == doctest::Approx(0.25));
    CHECK(xi_eta(pq, XiEta::Xi1, 0.5) == doctest::Approx(0.0625));
    CHECK(xi_eta(pq, XiEta::Eta4, 4.0) == doctest::Approx(4.0));
    CHECK(xi_eta(pq, XiEta::Eta3, 8.0) == doctest::Approx(2.0));
}

TEST_CASE("property: power sandwiches") {
    oracle::Gen gen(20240611);
    const double slack = 1e-8;
    for (const auto& s : six_families()) {
        CAPTURE(s.label());
        const auto& idx = s.indices();
        int failures = 0;
        for (int i = 0; i < 1500; ++i) {
            double rho = gen.uniform(1e-9, 100.0);
            double t = gen.uniform(1e-9, 100.0);
            double P = s.Phi(t), Pr = s.Phi(rho * t);
            failures += !(xi_eta(idx, XiEta::Xi1, rho) * P <= Pr * (1 + slack));
            failures += !(Pr <= xi_eta(idx, XiEta::Xi2, rho) * P * (1 + slack));
            double Q = s.Phi_inv(t), Qr = s.Phi_inv(rho * t);
            failures += !(xi_eta(idx, XiEta::Eta1, rho) * Q <= Qr * (1 + slack));
            failures += !(Qr <= xi_eta(idx, XiEta::Eta2, rho) * Q * (1 + slack));
            double H = s.h(t), Hr = s.h(rho * t);
            failures += !(xi_eta(idx, XiEta::Xi3, rho) * H <= Hr * (1 + slack));
            failures += !(Hr <= xi_eta(idx, XiEta::Xi4, rho) * H * (1 + slack));
            double G = s.h_inv(t), Gr = s.h_inv(rho * t);
            failures += !(xi_eta(idx, XiEta::Eta3, rho) * G <= Gr * (1 + slack));
            failures += !(Gr <= xi_eta(idx, XiEta::Eta4, rho) * G * (1 + slack));
        }
        CHECK(failures == 0);
    }
}

TEST_CASE("property: round trips and monotonicity") {
    auto ts = oracle::log_points(1e-6, 1e6, 241);
    for (const auto& s : six_families()) {
        CAPTURE(s.label());
        double prev[4] = {0, 0, 0, 0};
        for (double t : ts) {
            CHECK(rel_gap(s.Phi_inv(s.Phi(t)), t) < 1e-9);
            CHECK(rel_gap(s.h_inv(s.h(t)), t) < 1e-9);
            double cur[4] = {s.Phi(t), s.Phi_inv(t), s.h(t), s.h_inv(t)};
            for (int k = 0; k < 4; ++k) {
                CHECK(cur[k] > prev[k]);
                prev[k] = cur[k];
            }
        }
    }
}

TEST_CASE("tabulated phi") {
    // Samples of the p = 2.5 power kernel: log-log interpolation is exact.
    std::vector<double> t, v;
    for (double x : oracle::log_points(1e-3, 1e3, 25)) {
        t.push_back(x);
        v.push_back(2.5 * std::pow(x, 0.5));
    }
    auto tab = PhiSpec::tabulated(t, v);
    auto ref = PhiSpec::power(2.5);
    for (double x : {1e-8, 0.37, 5.0, 4e4}) {
        CAPTURE(x);
        CHECK(rel_gap(tab.phi(x), ref.phi(x)) < 1e-12);
        CHECK(rel_gap(tab.Phi(x), ref.Phi(x)) < 1e-10);
        CHECK(rel_gap(tab.h_inv(ref.h(x)), x) < 1e-10);
    }
    CHECK(tab.indices().l == doctest::Approx(2.5).epsilon(0.01));
    CHECK(tab.indices().m1 == doctest::Approx(1.5).epsilon(0.01));

    // phi decaying like t^-2 makes h decreasing: rejected.
    std::vector<double> bad;
    for (double x : t) bad.push_back(1.0 / (x * x));
    CHECK_THROWS_AS(PhiSpec::tabulated(t, bad), StructuralError);
    CHECK_THROWS_AS(PhiSpec::tabulated({1.0, 0.5}, {1.0, 1.0}), ConfigError);
}

TEST_CASE("custom phi with declared exact indices") {
    auto id = PhiSpec::custom([](double) { return 1.0; }, [](double t) { return 0.5 * t * t; },
                              Indices{2.0, 2.0, 1.0, 1.0, true}, "identity-flux");
    CHECK(id.indices().exact);
    CHECK(id.h(3.0) == 3.0);
    CHECK(id.h_inv(3.0) == doctest::Approx(3.0).epsilon(1e-14));
    CHECK(id.Phi_inv(2.0) == doctest::Approx(2.0).epsilon(1e-14));
}

TEST_CASE("parameter guards") {
    CHECK_THROWS_AS(PhiSpec::power(1.0), ConfigError);
    CHECK_THROWS_AS(PhiSpec::p_and_q(3.0, 2.0), ConfigError);
    CHECK_THROWS_AS(PhiSpec::elasticity(1.0), ConfigError);
    CHECK_THROWS_AS(PhiSpec::power(2.0).phi(0.0), DomainError);
}

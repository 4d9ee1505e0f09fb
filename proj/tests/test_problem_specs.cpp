#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "blowup/problem_specs.hpp"
#include "oracles.hpp"

#include <cmath>
#include <numbers>

using namespace blowup;

namespace {

NonlinearitySpec wiggly() {
    return NonlinearitySpec::custom([](double s) { return s * (2.0 + std::sin(s)); });
}

double brute_min(const std::function<double(double)>& f, double a, double b, int n) {
    double m = f(a);
    for (int i = 1; i <= n; ++i) m = std::min(m, f(a + (b - a) * i / n));
    return m;
}

double brute_max(const std::function<double(double)>& f, double a, double b, int n) {
    return -brute_min([&](double x) { return -f(x); }, a, b, n);
}

}  // namespace

TEST_CASE("F") {
    CHECK(NonlinearitySpec::power(2.0).F(3.0) == doctest::Approx(9.0).epsilon(1e-15));
    CHECK(NonlinearitySpec::exponential().F(0.0) == 0.0);
    double ref = oracle::simpson([](double s) { return std::exp(s) - 1.0; }, 0.0, 1.0);
    CHECK(NonlinearitySpec::exponential().F(1.0) == doctest::Approx(ref).epsilon(1e-12));
    CHECK(NonlinearitySpec::exponential().F(1.0) == doctest::Approx(std::exp(1.0) - 2.0).epsilon(1e-14));
    // Series branch near zero.
    CHECK(NonlinearitySpec::exponential().F(1e-4) == doctest::Approx(5.000166670833e-9).epsilon(1e-12));

    auto w = wiggly();
    CHECK_FALSE(w.has_closed_form_F());
    double wref = oracle::simpson([](double s) { return s * (2.0 + std::sin(s)); }, 0.0, 7.0, 200000);
    CHECK(w.F(7.0) == doctest::Approx(wref).epsilon(1e-11));
}

TEST_CASE("G") {
    CHECK(NonlinearitySpec::power(1.0).G(1.0, 2.0) == doctest::Approx(1.5).epsilon(1e-15));
    CHECK(NonlinearitySpec::exponential().G(2.5, 2.5) == 0.0);
    double ref = oracle::simpson_singular([](double s) { return std::sqrt(s); }, 0.0, 4.0);
    CHECK(NonlinearitySpec::power(0.5).G(0.0, 4.0) == doctest::Approx(ref).epsilon(1e-9));
    CHECK(NonlinearitySpec::power(0.5).G(0.0, 4.0) == doctest::Approx(16.0 / 3.0).epsilon(1e-14));
    CHECK_THROWS_AS(NonlinearitySpec::power(1.0).G(2.0, 1.0), DomainError);

    // Short intervals keep full relative accuracy.
    auto cube = NonlinearitySpec::power(3.0);
    double x = 5.0, d = 1e-9;
    // ((x + d)^4 - x^4) / 4 expanded, free of cancellation.
    double series = 125.0 * d + 75.0 * d * d + 5.0 * d * d * d;
    CHECK(cube.G(x, x + d) == doctest::Approx(series).epsilon(1e-12));
}

TEST_CASE("property: G is additive") {
    oracle::Gen gen(7);
    std::vector<NonlinearitySpec> specs{NonlinearitySpec::power(0.5), NonlinearitySpec::power(3.0),
                                        NonlinearitySpec::exponential(), wiggly()};
    for (const auto& nl : specs) {
        CAPTURE(nl.label());
        for (int i = 0; i < 200; ++i) {
            double a = gen.uniform(0.0, 10.0), b = gen.uniform(0.0, 10.0), c = gen.uniform(0.0, 10.0);
            double v[3] = {a, b, c};
            std::sort(v, v + 3);
            double whole = nl.G(v[0], v[2]);
            double parts = nl.G(v[0], v[1]) + nl.G(v[1], v[2]);
            CHECK(std::abs(whole - parts) <= 1e-10 * std::max(1.0, whole));
            CHECK(nl.G(v[0], v[1]) >= 0.0);
        }
    }
}

TEST_CASE("envelopes") {
    auto p = NonlinearitySpec::power(2.0);
    for (double t : {0.0, 0.3, 7.0, 1e4}) {
        CHECK(envelope_lower(p, t) == p.f(t));
        CHECK(envelope_upper(p, t) == p.f(t));
    }
    auto w = wiggly();
    auto fw = [](double s) { return s * (2.0 + std::sin(s)); };
    EnvelopeControls c;
    c.T_max = 100.0;
    CHECK(envelope_lower(w, 0.0, c) == 0.0);
    double pi = std::numbers::pi;
    double brute = brute_min(fw, pi, 100.0, 100000);
    double lower = envelope_lower(w, pi, c);
    CHECK(lower <= brute + 1e-12);
    CHECK(lower == doctest::Approx(brute).epsilon(1e-6));
    CHECK(lower < w.f(pi));

    double brute_up = brute_max(fw, 0.0, 20.0, 100000);
    double upper = envelope_upper(w, 20.0, c);
    CHECK(upper >= brute_up - 1e-12);
    CHECK(upper == doctest::Approx(brute_up).epsilon(1e-6));
    CHECK(envelope_upper(w, 0.0, c) == 0.0);
    CHECK_THROWS_AS(envelope_lower(w, 200.0, c), DomainError);
}

TEST_CASE("property: envelope ordering and monotonicity") {
    auto w = wiggly();
    EnvelopeControls c;
    c.T_max = 60.0;
    c.initial_points = 2048;
    double prev_lo = -1.0, prev_up = -1.0;
    for (double t = 0.0; t <= 50.0; t += 0.73) {
        double lo = envelope_lower(w, t, c), up = envelope_upper(w, t, c), ft = w.f(t);
        CHECK(lo <= ft);
        CHECK(ft <= up);
        // Both envelopes grow with t: the lower one takes an inf over a shrinking set.
        CHECK(lo >= prev_lo - 1e-12);
        CHECK(up >= prev_up - 1e-12);
        prev_lo = lo;
        prev_up = up;
    }
    auto rep = envelope_ratio_report(w, {1.0, 5.0, 20.0, 50.0}, c);
    CHECK(rep.satisfied_on_sampled_horizon);
    CHECK(rep.min_lower_ratio > 0.3);
    CHECK(rep.min_upper_ratio > 0.3);
}

TEST_CASE("calF") {
    auto lin = NonlinearitySpec::power(1.0);
    CHECK(calF(lin, 2.0, 4.0) == doctest::Approx(1.0).epsilon(1e-15));
    double ref = oracle::bisect([&](double t) { return 0.5 * t / std::sqrt(t); }, 1.0, 0.0, 100.0);
    CHECK(calF_inv(lin, 2.0, 1.0) == doctest::Approx(ref).epsilon(1e-12));
    CHECK(calF_inv(lin, 2.0, 1.0) == doctest::Approx(4.0).epsilon(1e-14));

    // gamma < l1: calF(s) = s^((l1 - gamma)/l1) / 2, increasing.
    for (double gamma : {0.5, 1.0, 1.5}) {
        double l1 = 2.0;
        CalF F(NonlinearitySpec::power(gamma), l1);
        CHECK(F.increasing());
        for (double s : {1e-3, 0.5, 3.0, 1e5})
            CHECK(F(s) == doctest::Approx(std::pow(s, (l1 - gamma) / l1) / 2.0).epsilon(1e-13));
        CHECK(F.inv(0.0) == 0.0);
    }
    // gamma > l1: decreasing, still invertible.
    CalF dec(NonlinearitySpec::power(3.0), 1.0);
    CHECK_FALSE(dec.increasing());
    CHECK(dec.inv(dec(2.5)) == doctest::Approx(2.5).epsilon(1e-12));
    CHECK_THROWS_AS(dec.inv(0.0), DomainError);

    // Exponential f turns calF around: rejected with the offending interval.
    try {
        CalF bad(NonlinearitySpec::exponential(), 2.0);
        FAIL("expected a structural error");
    } catch (const StructuralError& e) {
        CHECK(e.lo() < e.hi());
        CHECK(e.lo() > 0.5);
        CHECK(e.hi() < 10.0);
    }
}

TEST_CASE("property: calF round trip on the scanned range") {
    oracle::Gen gen(99);
    CalF F(NonlinearitySpec::power(0.5), 1.5);
    CalF G(NonlinearitySpec::power(4.0), 2.0);
    for (int i = 0; i < 500; ++i) {
        double t = gen.log_uniform(1e-10, 1e10);
        CHECK(F.inv(F(t)) == doctest::Approx(t).epsilon(1e-9));
        CHECK(G.inv(G(t)) == doctest::Approx(t).epsilon(1e-9));
    }
}

TEST_CASE("weight_A") {
    auto one = WeightSpec::radial({[](double) { return 1.0; }, "one"});
    for (int N : {1, 2, 3, 5})
        for (double s : {0.1, 1.0, 30.0}) CHECK(weight_A(one, WeightComponent::Upper, s, N) == doctest::Approx(s / N).epsilon(1e-13));
    auto lin = WeightSpec::radial({[](double t) { return t; }, "t"});
    CHECK(weight_A(lin, WeightComponent::Lower, 3.0, 1) == doctest::Approx(4.5).epsilon(1e-13));

    auto lor = WeightSpec::radial({[](double t) { return 1.0 / (1.0 + t * t); }, "lorentz"});
    double ref = 0.25 * oracle::simpson([](double t) { return t * t / (1 + t * t); }, 0.0, 2.0);
    CHECK(weight_A(lor, WeightComponent::Upper, 2.0, 3) == doctest::Approx(ref).epsilon(1e-11));
    CHECK(weight_A(lor, WeightComponent::Upper, 2.0, 3) == doctest::Approx((2.0 - std::atan(2.0)) / 4.0).epsilon(1e-13));

    CHECK_THROWS_AS(weight_A(one, WeightComponent::BallLower, 1.0, 2), ConfigError);
    CHECK(weight_A(one, WeightComponent::Osc, 5.0, 2) == 0.0);
    CHECK(weight_A(one, WeightComponent::Upper, 0.0, 2) == 0.0);

    // Vanishes as s -> 0 for bounded weights.
    for (int N : {1, 3}) CHECK(weight_A(lor, WeightComponent::Upper, 1e-8, N) <= 1e-8);

    // Features near the origin are not missed at large s: int_0^inf (1+t)^-4 = 1/3.
    auto decay = WeightSpec::radial({[](double t) { return std::pow(1.0 + t, -4.0); }, "decay"});
    CHECK(weight_A(decay, WeightComponent::Upper, 1e6, 1) == doctest::Approx(1.0 / 3.0).epsilon(1e-9));
}

TEST_CASE("weight validation and oscillation") {
    WeightSpec ws;
    ws.upper = {[](double) { return 1.0; }, "one"};
    ws.lower = {[](double s) { return 1.0 - std::exp(-s); }, "1-exp"};
    CHECK_NOTHROW(validate_weight(ws, 50.0));
    CHECK(ws.osc(0.0) == 1.0);
    CHECK(ws.osc(2.0) == doctest::Approx(std::exp(-2.0)));
    WeightSpec swapped = ws;
    std::swap(swapped.lower, swapped.upper);
    CHECK_THROWS_AS(validate_weight(swapped, 50.0), ConfigError);
    CHECK(swapped.osc(1.0) == 0.0);  // clamped

    ws.ball_lower = RadialFunction{[](double r) { return std::exp(-r); }, "exp"};
    CHECK_NOTHROW(validate_weight(ws, 10.0));
    ws.ball_lower = RadialFunction{[](double r) { return r; }, "growing"};
    CHECK_THROWS_AS(validate_weight(ws, 10.0), ConfigError);
}

TEST_CASE("cumulative integral") {
    CumulativeIntegral I([](double t) { return std::cos(t); }, linear_grid(0.0, 10.0, 21));
    for (double s : {0.0, 0.25, 3.3, 10.0, 12.0}) CHECK(I(s) == doctest::Approx(std::sin(s)).epsilon(1e-11));
    CHECK_THROWS_AS(I(-1.0), DomainError);
}

#pragma once

// Nonlinearity f and radial weights a, with the derived objects consumed by
// the conditions and solvers: F, G, the monotone envelopes, the transform
// calF(t) = (t/2) f(t)^(-1/l1), and the weighted averages calA.

#include "blowup/numerics.hpp"

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace blowup {

/// Quadrature held to a purely relative criterion; for quantities that span
/// many decades or vanish identically.
inline constexpr QuadTolerance kRelativeQuad{0.0, 1e-12, 4000};

enum class FFamily { Power, Exponential, Custom };
enum class MonotoneHint { NonDecreasing, Unknown };

std::string to_string(FFamily f);

class NonlinearitySpec {
public:
    /// f(u) = u^gamma.
    static NonlinearitySpec power(double gamma);
    /// f(u) = e^u - 1.
    static NonlinearitySpec exponential();
    static NonlinearitySpec custom(RealFn f, std::optional<RealFn> F = std::nullopt,
                                   MonotoneHint hint = MonotoneHint::Unknown,
                                   std::optional<double> tail_exponent = std::nullopt,
                                   std::string label = "custom");
    /// Tabulated (t, f(t)) pairs starting at (0, 0), monotone cubic interpolation.
    static NonlinearitySpec tabulated(std::vector<double> t, std::vector<double> f_values);

    FFamily family() const { return impl_->family; }
    const std::vector<double>& params() const { return impl_->params; }
    const std::string& label() const { return impl_->label; }
    MonotoneHint monotone_hint() const { return impl_->hint; }
    std::optional<double> tail_exponent_hint() const { return impl_->tail; }
    bool has_closed_form_F() const { return static_cast<bool>(impl_->F); }
    const std::optional<LinearTable>& table() const { return impl_->table; }

    double f(double t) const;
    double F(double t) const;
    /// G(x, y) = int_x^y f. Throws DomainError when x > y.
    double G(double x, double y) const;

private:
    struct Impl {
        FFamily family = FFamily::Custom;
        std::vector<double> params;
        std::string label;
        RealFn f;
        RealFn F;
        MonotoneHint hint = MonotoneHint::Unknown;
        std::optional<double> tail;
        std::optional<LinearTable> table;
    };
    std::shared_ptr<const Impl> impl_;
};

struct EnvelopeControls {
    double T_max = 1e6;
    std::size_t initial_points = 4096;
    std::size_t max_points = std::size_t(1) << 22;
    double stability = 1e-8;
};

/// inf of f over [t, T_max], by refined grid search plus local polishing.
/// Equals f(t) exactly when f is declared non-decreasing.
double envelope_lower(const NonlinearitySpec& nl, double t, const EnvelopeControls& c = {});
/// sup of f over [0, t]; same construction.
double envelope_upper(const NonlinearitySpec& nl, double t, const EnvelopeControls& c = {});

/// Diagnostic for the envelope ratio hypotheses: inf over the grid of
/// lower(t)/f(t) and of f(t)/upper(t). Classified on the sampled horizon only.
struct EnvelopeRatioReport {
    std::vector<double> grid;
    std::vector<double> lower_ratio;
    std::vector<double> upper_ratio;
    double min_lower_ratio = 0.0;
    double min_upper_ratio = 0.0;
    bool satisfied_on_sampled_horizon = false;
};
EnvelopeRatioReport envelope_ratio_report(const NonlinearitySpec& nl, const std::vector<double>& grid,
                                          const EnvelopeControls& c = {});

/// calF(t) = (t/2) f(t)^(-1/l1), required strictly monotone (either direction).
class CalF {
public:
    /// Scans a log grid on [scan_lo, scan_hi]; throws StructuralError on the
    /// first interval where calF fails to be strictly monotone.
    CalF(NonlinearitySpec nl, double l1, double scan_lo = 1e-12, double scan_hi = 1e12,
         std::size_t points = 2001);

    double operator()(double t) const;
    /// Bracketing inverse. Values outside the attained range raise DomainError.
    double inv(double y) const;
    bool increasing() const { return increasing_; }
    double l1() const { return l1_; }

private:
    NonlinearitySpec nl_;
    double l1_;
    bool increasing_ = true;
};

double calF(const NonlinearitySpec& nl, double l1, double t);
double calF_inv(const NonlinearitySpec& nl, double l1, double y);

/// Radial function r -> rho(r) with a display label.
struct RadialFunction {
    RealFn fn;
    std::string label;
    double operator()(double r) const { return fn(r); }
};

enum class WeightComponent { Lower, Upper, Osc, BallLower, BallUpper };
std::string to_string(WeightComponent c);

struct WeightSpec {
    RadialFunction lower;
    RadialFunction upper;
    std::optional<RadialFunction> ball_lower;
    std::optional<RadialFunction> ball_upper;

    static WeightSpec radial(RadialFunction a);
    /// max(0, upper - lower), round-off clamped.
    double osc(double r) const;
    /// The selected component as a callable. Missing ball envelopes raise ConfigError.
    RealFn component(WeightComponent which) const;
};

/// Checks 0 <= lower <= upper and the ball envelope ordering on a grid of
/// [0, r_max]. Throws ConfigError naming the first offending radius.
void validate_weight(const WeightSpec& ws, double r_max, std::size_t points = 2001);

/// calA_rho(s) = s^(1-N) int_0^s t^(N-1) rho(t) dt, with calA(0) = 0.
double calA(const RealFn& rho, double s, int N);
double weight_A(const WeightSpec& ws, WeightComponent which, double s, int N);

/// s -> int_0^s g(t) dt for s in [0, s_max], tabulated at breakpoints with
/// local quadrature between them. Accuracy is relative to the running total.
class CumulativeIntegral {
public:
    CumulativeIntegral(RealFn g, std::vector<double> breaks, QuadTolerance tol = kRelativeQuad);
    double operator()(double s) const;
    double s_max() const { return breaks_.back(); }

private:
    QuadTolerance local_tol(double base) const;

    RealFn g_;
    std::vector<double> breaks_;
    std::vector<double> nodes_;
    QuadTolerance tol_;
};

}  // namespace blowup

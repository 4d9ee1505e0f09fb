#pragma once

// Radial IVP (r^{N-1} h(u'))' = r^{N-1} rho(r) f(u), u(0) = alpha, u'(0) = 0,
// advanced in the state (u, Q) with Q = r^{N-1} h(u'). Built on top: blow-up
// radius detection, Dirichlet ball shooting, the two-sided bound check, the
// boundary-data sweep and the entire-space sandwich.

#include "blowup/conditions.hpp"
#include "blowup/nfunction.hpp"
#include "blowup/problem_specs.hpp"

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace blowup {

enum class ProfileStatus { Completed, Blowup, Global, GlobalUnconfirmed };
std::string to_string(ProfileStatus s);

struct RadialProfile {
    std::vector<double> r;
    std::vector<double> u;
    std::vector<double> du;
    /// Q(r) = int_0^r t^{N-1} rho f(u) dt = r^{N-1} h(u'(r)).
    std::vector<double> Q;
    ProfileStatus status = ProfileStatus::Completed;
    /// Last radius reached.
    double R = 0.0;
    /// Blow-up bracket when status is Blowup.
    std::optional<std::pair<double, double>> bracket;
    int N = 1;
    double alpha = 0.0;
    std::string phi_label;
    std::string f_label;
    std::string rho_label;
    std::string source = "shooting";
};

struct SolverControls {
    double rtol = 1e-8;
    double atol = 1e-14;
    /// Integration stops once u exceeds this value.
    double blowup_threshold = 1e8;
    /// Uniform output points on [0, r_max]; blow-up runs also keep accepted steps.
    std::size_t output_points = 401;
    std::size_t max_steps = 2000000;
};

RadialProfile solve_ivp(const PhiSpec& phi, const NonlinearitySpec& nl, const RadialFunction& rho, int N,
                        double alpha, double r_max, const SolverControls& c = {});

struct BlowupControls {
    std::vector<double> thresholds{1e4, 1e6, 1e8};
    /// Largest radius integrated before declaring global existence.
    double horizon = 1e3;
    /// Ratio below which crossing gaps count as contracting.
    double contraction = 0.5;
    SolverControls solver{};
};

struct BlowupRadius {
    double alpha = 0.0;
    /// Estimated Gamma(alpha); +inf for global solutions.
    double gamma = kInf;
    std::pair<double, double> bracket{0.0, kInf};
    /// Radii where u crossed each threshold, in threshold order.
    std::vector<double> crossings;
    double u_max_reached = 0.0;
    ProfileStatus status = ProfileStatus::Global;
    std::string note;
};

/// Threshold crossings extrapolated by Aitken's process when their gaps
/// contract; otherwise classified Global or GlobalUnconfirmed from the KO
/// verdict (global existence needs KO to fail).
BlowupRadius blowup_radius(const PhiSpec& phi, const NonlinearitySpec& nl, const RadialFunction& rho, int N,
                           double alpha, const BlowupControls& c = {});

struct BallControls {
    /// Accepted boundary mismatch |v(L) - k|.
    double tol = 1e-9;
    int max_bisections = 200;
    SolverControls solver{};
};

/// Shooting on alpha in [0, k] so that u_alpha(L) = k.
RadialProfile solve_ball_dirichlet(const PhiSpec& phi, const NonlinearitySpec& nl, const RadialFunction& rho,
                                   int N, double L, double k, const BallControls& c = {});

struct SandwichPoint {
    double r = 0.0;
    double lower = 0.0;
    double upper = 0.0;
    /// r - lower and upper - r.
    double lower_margin = 0.0;
    double upper_margin = 0.0;
    bool skipped = false;
};

struct SandwichReport {
    std::vector<SandwichPoint> points;
    double worst_margin = kInf;
    std::size_t skipped = 0;
    bool passed = false;
};

/// For each grid radius checks
///   int_{v0}^{v(r)} dtau / Phi^{-1}((c/l1) G(v0, tau)) <= r
///     <= int_{v0}^{v(r)} dtau / Phi^{-1}((c/(m1 N)) G(v0, tau))
/// with slack 1e-6 (1 + r). Constant weight c.
SandwichReport verify_sandwich(const RadialProfile& profile, const PhiSpec& phi, const NonlinearitySpec& nl,
                               double c, double l1, double m1, int N);

struct SweepResult {
    std::vector<double> k_values;
    std::vector<RadialProfile> profiles;
    double r_star = 0.0;
    /// sup over [0, r*] of |u_k - u_{k_prev}|.
    std::vector<double> raw_increments;
    /// Same for the pointwise Aitken-extrapolated limits (from the third k on).
    std::vector<double> extrapolated_increments;
    std::vector<double> limit_r;
    std::vector<double> limit_u;
    ConditionReport ko;
};

/// Ball solves for increasing k with pointwise monotonicity asserted in k.
/// Rejected unless KO converges: without it the sweep diverges pointwise.
/// Up to `threads` ball solves run concurrently; results do not depend on it.
SweepResult boundary_sweep_blowup(const PhiSpec& phi, const NonlinearitySpec& nl, const RadialFunction& rho, int N,
                                  double L, const std::vector<double>& k_sequence, double r_star,
                                  const BallControls& c = {}, std::size_t threads = 1);

/// Pointwise ordering of two profiles on a shared grid, tolerance tol (1 + |v|).
/// Returns the worst margin (positive when lower <= upper everywhere).
double ordering_margin(const RadialProfile& lower, const RadialProfile& upper, double tol = 1e-8);

/// alpha + eta_3(f(alpha)) int_0^r h^{-1}(calA_rho(s)) ds on the given radii.
std::vector<double> growth_minorant(const PhiSpec& phi, const NonlinearitySpec& nl, const RadialFunction& rho,
                                    int N, double alpha, const std::vector<double>& radii);

struct EntireControls {
    ClassifierControls classifier{};
    std::size_t subadditivity_samples = 10000;
    /// Budget horizon for H-bar.
    double budget_horizon = 1e6;
    SolverControls solver{};
};

struct EntireCertificate {
    RadialProfile u_alpha;
    RadialProfile u_beta;
    double alpha = 0.0;
    double beta = 0.0;
    double epsilon = 0.0;
    double H_bar = 0.0;
    ConditionReport budget;
    /// min over the grid of u_beta - u_alpha.
    double ordering_margin = 0.0;
    bool ordered = false;
    /// Upper estimate calF^{-1}(int_0^r h^{-1}(calA_upper)) on the grid.
    std::vector<double> estimate_bound;
    /// Smallest grid radius from which u_alpha stays below the bound.
    std::optional<double> estimate_onset;
    bool estimate_holds_eventually = false;
    bool minorant_holds = false;
    bool certified = false;
};

/// Entire-space construction with weights upper (for u_alpha) and lower (for
/// u_beta, beta = alpha + epsilon + H-bar). Throws PreconditionRejected when a
/// hypothesis verdict is not met.
EntireCertificate entire_sandwich(const PhiSpec& phi, const NonlinearitySpec& nl, const WeightSpec& ws, int N,
                                  double alpha, double epsilon, double horizon, const EntireControls& c = {});

}  // namespace blowup

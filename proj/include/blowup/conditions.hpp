#pragma once

// Classifiers for the improper-integral conditions: Keller–Osserman (KO),
// growth of calA_rho, the oscillation budgets H-bar and H-tilde, and the
// subadditivity of h^{-1}. Convergence of an improper integral is not
// decidable numerically, so every verdict carries its evidence.

#include "blowup/nfunction.hpp"
#include "blowup/problem_specs.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace blowup {

enum class ConditionId { KO, ARho, HBar, HTilde, HInvSubadditive };
enum class Verdict { Converges, Diverges, Inconclusive, Holds, Fails };
enum class Confidence { Analytic, Fitted, Sampled };

std::string to_string(ConditionId id);
std::string to_string(Verdict v);
std::string to_string(Confidence c);

struct Witness {
    double s = 0.0;
    double t = 0.0;
    /// h^{-1}(s+t) - h^{-1}(s) - h^{-1}(t), relative to h^{-1}(s) + h^{-1}(t).
    double violation = 0.0;
};

struct ConditionReport {
    ConditionId id = ConditionId::KO;
    std::vector<double> cutoffs;
    std::vector<double> partial_values;
    /// Least-squares slope of log10(increment density) against log10(radius).
    /// An integrand behaving like t^-a has slope 1 - a.
    std::optional<double> fitted_tail_exponent;
    std::optional<double> fit_residual;
    /// Slope from doubling intervals beyond the last cutoff.
    std::optional<double> local_tail_slope;
    Verdict verdict = Verdict::Inconclusive;
    Confidence confidence = Confidence::Fitted;
    std::optional<Verdict> analytic_verdict;
    Verdict fitted_verdict = Verdict::Inconclusive;
    std::optional<Witness> witness;
    /// Best value estimate: last partial plus geometric tail when convergent.
    double estimate = 0.0;
    std::string note;
};

struct ClassifierControls {
    std::vector<double> cutoffs{1e1, 1e2, 1e3, 1e4, 1e5, 1e6};
    double residual_threshold = 0.05;
    /// Slope at or above this is read as divergence.
    double diverge_slope = -0.01;
    /// Slope at or below this (with decaying last increments) is read as convergence.
    double converge_slope = -0.05;
    /// Number of trailing increments used by the fit.
    std::size_t fit_points = 4;
    /// Relative stability required of the doubling slope.
    double doubling_stability = 0.01;
    int max_doublings = 12;
    QuadTolerance quad{0.0, 1e-10, 4000, 1e-7};
};

/// Increment analysis of int_lower^inf g over the cutoff ladder. Shared by
/// every integral condition; `id` only labels the report.
ConditionReport classify_improper(ConditionId id, const RealFn& g, double lower,
                                  const ClassifierControls& c = {});

/// Integral of 1 / Phi^{-1}(F(t)) on [1, inf).
ConditionReport check_KO(const PhiSpec& phi, const NonlinearitySpec& nl, const ClassifierControls& c = {});

/// Closed-form KO verdict when phi has exact indices and f a tail exponent:
/// converges if (gamma+1)/m > 1, diverges if (gamma+1)/l <= 1.
std::optional<Verdict> ko_analytic_verdict(const PhiSpec& phi, const NonlinearitySpec& nl);

/// Integral of h^{-1}(calA_rho(s)) on [1, inf). The growth condition holds
/// exactly when the verdict is Diverges.
ConditionReport check_A_rho(const PhiSpec& phi, const WeightSpec& ws, WeightComponent which, int N,
                            const ClassifierControls& c = {});
ConditionReport check_A_rho(const PhiSpec& phi, const RealFn& rho, int N, const ClassifierControls& c = {});

/// Quadrature for nested budget integrals: relative, tolerating round-off
/// noise from weight differences down to accept_rel.
inline constexpr QuadTolerance kNoisyQuad{0.0, 1e-12, 4000, 1e-7};

/// s -> calA_rho(s), with the inner integral tabulated once.
class AveragedWeight {
public:
    AveragedWeight(RealFn rho, int N, double s_max);
    double operator()(double s) const;

private:
    int N_;
    CumulativeIntegral W_;
};

/// Ladder ending at `horizon`: decades from 1 up to horizon.
std::vector<double> decade_ladder(double horizon);

/// H-bar budget: integral over s of eta_4(calA_osc(s)) h^{-1}(f(calF^{-1}(I(s)))),
/// with I(s) = int_0^s h^{-1}(calA_upper). Zero exactly when the weight is radial.
ConditionReport compute_H_bar(const PhiSpec& phi, const NonlinearitySpec& nl, const WeightSpec& ws, int N,
                              double horizon, const ClassifierControls& c = {});

/// H-tilde budget with the ball envelopes a_*, a^*.
ConditionReport compute_H_tilde(const PhiSpec& phi, const NonlinearitySpec& nl, const WeightSpec& ws, int N,
                                double horizon, const ClassifierControls& c = {});

/// Samples (s, t) in [0, 1e6]^2: uniform, log-uniform and a structured log
/// grid. Verdict Holds, or Fails with the worst witness.
ConditionReport check_h_inv_subadditive(const PhiSpec& phi, std::size_t samples, std::uint64_t seed = 1);

}  // namespace blowup

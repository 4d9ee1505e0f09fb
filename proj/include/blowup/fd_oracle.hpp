#pragma once

// Finite-volume oracle for the radial Dirichlet problem
//   (r^{N-1} h(v'))' = r^{N-1} rho f(v) on (0, L), v'(0) = 0, v(L) = k,
// solved by monotone iteration from the subsolution 0 and the supersolution k.

#include "blowup/nfunction.hpp"
#include "blowup/problem_specs.hpp"
#include "blowup/radial_solver.hpp"

#include <cstddef>
#include <vector>

namespace blowup {

struct FdControls {
    /// Iteration stops when the sup-norm change of both ladders drops below tol.
    double tol = 1e-9;
    /// A ladder whose change has not reached a new minimum for this many sweeps is stalled.
    std::size_t stall_window = 50;
    std::size_t max_sweeps = 20000;
};

struct FdSolution {
    int N = 1;
    double L = 0.0;
    double k = 0.0;
    std::size_t M = 0;
    /// Uniform radii r_0 = 0, ..., r_M = L.
    std::vector<double> r;
    /// Limit of the ladder started from v = 0.
    std::vector<double> from_below;
    /// Limit of the ladder started from v = k.
    std::vector<double> from_above;
    /// Centred differences of the midpoint profile (one-sided at r = L) and
    /// the matching r^{N-1} h(du).
    std::vector<double> du;
    std::vector<double> Q;
    std::size_t sweeps = 0;
    /// Per-sweep sup-norm changes of the lower and upper ladders.
    std::vector<double> history_below;
    std::vector<double> history_above;
    /// Sup-norm gap between the two limits.
    double gap = 0.0;
    std::string phi_label;
    std::string f_label;
    std::string rho_label;

    /// Midpoint of the two limits, flagged source "fd".
    RadialProfile profile() const;
};

/// Half-point fluxes r_{i+1/2}^{N-1} h((v_{i+1} - v_i)/dr), control volumes
/// (r_{i+1/2}^N - r_{i-1/2}^N)/N and the mirror condition v_{-1} = v_1. Each
/// sweep freezes f with a nodewise shift lambda_i bounding the slope of f
/// between the two ladders; the frozen problem is the minimiser of a convex
/// discrete energy built from Phi and is found by damped Newton steps.
/// Throws NonConvergence on a stall and SolverDefect when a ladder loses
/// monotonicity or the limits disagree beyond 10 tol.
FdSolution fd_solve(const PhiSpec& phi, const NonlinearitySpec& nl, const RadialFunction& rho, int N, double L,
                    double k, std::size_t M, const FdControls& c = {});

struct ComparisonReport {
    /// min_i (upper_i - lower_i + tol (1 + |upper_i|)).
    double worst_margin = 0.0;
    double worst_r = 0.0;
    bool ordered = false;
};

/// Asserts lower <= upper pointwise up to 1e-10 (1 + |v|). The caller
/// supplies solutions with ordered data; a violation throws SolverDefect.
ComparisonReport fd_comparison_check(const FdSolution& lower, const FdSolution& upper, double tol = 1e-10);

}  // namespace blowup

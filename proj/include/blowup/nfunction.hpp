#pragma once

// The operator kernel phi and its N-function machinery:
//   Phi(t) = int_0^t phi(s) s ds,  h(t) = phi(t) t,
// their inverses, the index pairs (l, m), (l1, m1), and the power sandwiches
// xi_1..xi_4, eta_1..eta_4.

#include "blowup/numerics.hpp"

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace blowup {

enum class PhiFamily { ConstantTwo, Power, PAndQ, Elasticity, ElasticitySqrt, PlasticityLog, Custom };

std::string to_string(PhiFamily f);

/// (l, m) bound phi(t) t^2 / Phi(t); (l1, m1) bound Phi''(t) t / Phi'(t).
struct Indices {
    double l = 0.0;
    double m = 0.0;
    double l1 = 0.0;
    double m1 = 0.0;
    bool exact = false;
};

/// Sampling controls for index estimation. The inf is multiplied by
/// (1 - safety) and the sup by (1 + safety).
struct IndexGrid {
    double t_min = 1e-6;
    double t_max = 1e6;
    std::size_t points = 2001;
    double safety = 0.005;
};

class PhiSpec {
public:
    static PhiSpec constant_two();
    static PhiSpec power(double p);
    /// phi = 1: h is the identity and Phi(t) = t^2/2. A custom-family spec
    /// with closed forms, used by the linear and cosh fixtures.
    static PhiSpec unit();
    static PhiSpec p_and_q(double p, double q);
    static PhiSpec elasticity(double gamma);
    static PhiSpec elasticity_sqrt(double gamma);
    static PhiSpec plasticity_log(double p);

    /// User-supplied positive phi. Phi may be given in closed form; exact
    /// indices may be declared when known (e.g. phi = 1 gives (2, 2, 1, 1)).
    static PhiSpec custom(RealFn phi, std::optional<RealFn> Phi = std::nullopt,
                          std::optional<Indices> exact_indices = std::nullopt,
                          std::string label = "custom");

    /// phi from tabulated (t, phi(t)) pairs, log-log monotone interpolation.
    static PhiSpec tabulated(std::vector<double> t, std::vector<double> phi_values);

    PhiFamily family() const { return impl_->family; }
    const std::vector<double>& params() const { return impl_->params; }
    const std::string& label() const { return impl_->label; }
    bool has_closed_form_Phi() const { return static_cast<bool>(impl_->Phi); }
    /// Present only for table-backed specs.
    const std::optional<LogLogTable>& table() const { return impl_->table; }

    double phi(double t) const;
    double Phi(double t) const;
    double Phi_inv(double y) const;
    double h(double t) const;
    double h_inv(double s) const;
    /// Phi''(t) t / Phi'(t) with Phi'' by central difference of h, step t*1e-5.
    double h_log_slope(double t) const;
    /// phi(t) t^2 / Phi(t).
    double Phi_ratio(double t) const;

    /// Exact indices when the family has them, else the default-grid estimate.
    const Indices& indices() const { return impl_->indices; }

private:
    struct Impl {
        PhiFamily family = PhiFamily::Custom;
        std::vector<double> params;
        std::string label;
        RealFn phi;
        RealFn h;
        RealFn Phi;
        RealFn Phi_inv;
        RealFn h_inv;
        std::optional<LogLogTable> table;
        Indices indices;
    };
    static PhiSpec finish(Impl impl, std::optional<Indices> exact);
    std::shared_ptr<const Impl> impl_;
};

/// Sampled inf/sup of the two index ratios, widened by the safety factor.
/// Families with exact indices return them unchanged.
Indices estimate_indices(const PhiSpec& spec, const IndexGrid& grid = {});

/// Checks phi > 0 and strict growth of h on a log grid. Throws StructuralError
/// naming the first offending interval.
void validate_phi(const PhiSpec& spec, const IndexGrid& grid = {});

enum class XiEta { Xi1, Xi2, Xi3, Xi4, Eta1, Eta2, Eta3, Eta4 };

/// min / max of the powers t^a, t^b with (a, b) = (l, m), (l1, m1) for the
/// xi's and their reciprocals for the eta's.
double xi_eta(const Indices& idx, XiEta which, double t);
inline double xi_eta(const PhiSpec& spec, XiEta which, double t) {
    return xi_eta(spec.indices(), which, t);
}

}  // namespace blowup

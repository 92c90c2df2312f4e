#pragma once

// Welfare model with binary improvements w = 1{<x, beta> + mu > 0}, x ~ N(0, I).
// Parameterized by the base rate b = Pr[w = 1], so mu/|beta| = Phi^{-1}(b), and
// by gamma_s, the observable share of the latent score's standard deviation.
//
// The value of the optimal budget-alpha policy is
//   V(alpha, gamma_s) = int_{q}^{inf} Phi((gamma_s z + mu/|beta|)/gamma_t) phi(z) dz,
// q = Phi^{-1}(1 - alpha), gamma_t = sqrt(1 - gamma_s^2). It has no closed form and
// is evaluated by quadrature after substituting v = 1 - Phi(z):
//   V = int_0^alpha Phi((gamma_s Phi^{-1}(1 - v) + mu/|beta|)/gamma_t) dv.

#include "welfare/gaussian.hpp"
#include "welfare/linear_model.hpp"

namespace welfare {

struct ProbitParams {
    double base_rate;  // b in (0, 1)
    double gamma_s;    // in [0, 1]
};

void validate(const ProbitParams& p);

namespace probit {

/// Relative tolerance requested from the value quadrature.
inline constexpr double kValueRelTol = 1e-13;
/// Smallest nonzero lever increment accepted by par_exact.
inline constexpr double kMinDelta = 1e-5;

/// mu/|beta| = Phi^{-1}(b).
double mu_over_beta(const ProbitParams& p);
/// sqrt(1 - gamma_s^2).
double gamma_t(const ProbitParams& p);

/// Threshold Phi^{-1}(1 - alpha) on the standardized observable score z_s.
double policy_threshold(const ProbitParams& p, Probability alpha);

/// Requires alpha > 0. gamma_s = 0 and gamma_s = 1 are evaluated analytically
/// (alpha*b and min(alpha, b)); otherwise quadrature. Throws NumericalError if
/// the quadrature does not converge.
double value(const ProbitParams& p, Probability alpha);

/// dV/dalpha = Phi((gamma_s q + mu/|beta|)/gamma_t). Requires gamma_s < 1.
double dvalue_dalpha(const ProbitParams& p, Probability alpha);

/// dV/dgamma_s = phi(mu/|beta|) phi((q + gamma_s mu/|beta|)/gamma_t) / gamma_t.
/// Requires 0 < gamma_s < 1.
double dvalue_dgamma(const ProbitParams& p, Probability alpha);

/// Finite-difference prediction-access ratio of value(). Nonzero deltas below
/// kMinDelta are rejected; a prediction gain within 10x of the quadrature
/// tolerance throws NumericalError.
double par_exact(const ProbitParams& p, Probability alpha, const LeverDelta& d);

struct BoundsConfig {
    double eps = 0.05;        // in (0, 0.1)
    double smallness = 0.01;  // stands in for the existential threshold on alpha, delta_r2
};

/// Envelope on par_exact valid for sufficiently small alpha and delta_r2:
///   lower = 0.3 (da gt/dr) / (b qb) * (1/(1.01 sqrt(2pi) alpha q))^{(1-eps)^2/gt^2}
///   upper = 3   (da gt/dr) / (b qb) * (1/(sqrt(2pi) alpha q))^{(1+eps')^2/gt^2}
/// with qb = Phi^{-1}(1 - b), eps' = eps/(1 - eps). Hypotheses gamma_s in (0, 1),
/// b < 0.1, eps in (0, 0.1), delta_alpha <= alpha and max(alpha, delta_r2) <=
/// smallness are checked; each violation throws PreconditionError naming it.
BoundPair par_bounds(const ProbitParams& p, Probability alpha, const LeverDelta& d,
                     const BoundsConfig& config = {});

/// Conditions used to derive par_bounds, evaluated for one instance. When any
/// is false the instance lies outside the regime the envelope was proven for.
struct BoundsDiagnostics {
    bool access_regime;      // gamma_s Phi^{-1}(1 - 2 alpha) >= Phi^{-1}(1 - b)
    bool argument_slack;     // shifted density argument within (1 -+ eps) of q/gamma_t
    bool density_slack;      // phi(q) <= 1.01 alpha q
    [[nodiscard]] bool all() const { return access_regime && argument_slack && density_slack; }
};

BoundsDiagnostics bounds_diagnostics(const ProbitParams& p, Probability alpha,
                                     const LeverDelta& d, const BoundsConfig& config = {});

struct CutoffResult {
    bool passes;      // gamma_t >= cost_ratio * alpha^{1/gamma_t^2} * b
    double margin;    // left side minus right side
    bool degenerate;  // gamma_t == 0: exponent infinite, right side taken as its limit 0
};

/// Leading-order check that expanding access is the cost-efficient lever.
CutoffResult cutoff_check(const ProbitParams& p, Probability alpha,
                          double cost_ratio_access_over_prediction);

}  // namespace probit
}  // namespace welfare

#pragma once

// Welfare model with real-valued, Gaussian improvements w = <x, beta> + mu,
// x ~ N(0, I), of which a gamma_s^2 fraction of the variance is observable.
// The optimal budget-alpha policy thresholds the observable score, giving
//   V(alpha, gamma_s) = alpha*mu + gamma_s*|beta|*phi(Phi^{-1}(1 - alpha)).
// Only the alpha < 1/2 regime is supported; there the positivity indicator of
// the optimal policy never binds.

#include "welfare/gaussian.hpp"

namespace welfare {

struct LinearParams {
    double mu;         // mean welfare improvement E[w], > 0
    double beta_norm;  // |beta|, the standard deviation of w, > 0
    double gamma_s;    // sqrt(r^2) of the observable features, in [0, 1]
};

/// Proposed increments to access (alpha) and prediction (gamma_s).
struct LeverDelta {
    double delta_alpha;
    double delta_r2;
};

void validate(const LinearParams& p);
void validate(const LeverDelta& d);

namespace linear {

/// Score threshold Phi^{-1}(1 - alpha) * gamma_s * |beta| on <x_s, beta_s>.
double policy_threshold(const LinearParams& p, Probability alpha);

double value(const LinearParams& p, Probability alpha);

/// alpha * mu, the value of treating a Bernoulli(alpha) random subset.
double random_value(const LinearParams& p, Probability alpha);

/// random_value / value at gamma_s = 1.
double random_to_optimal_ratio(const LinearParams& p, Probability alpha);

/// Exact finite-difference prediction-access ratio
///   (V(a + da, g) - V(a, g)) / (V(a, g + dr) - V(a, g)).
double par_exact(const LinearParams& p, Probability alpha, const LeverDelta& d);

/// Envelope [upper/4, upper] with upper = (1/alpha)(mu/(|beta| q) + gamma_s)(da/dr).
/// Hypotheses: gamma_s, delta_r2 in (0, 1), alpha + delta_alpha < 0.05,
/// delta_alpha in [0, 4 alpha]. Each violation throws a PreconditionError naming it.
BoundPair par_bounds(const LinearParams& p, Probability alpha, const LeverDelta& d);

/// delta_mu * alpha, the gain from raising the mean effect by delta_mu.
double quality_gain(const LinearParams& p, Probability alpha, double delta_mu);

/// Indifference threshold on gamma_s, clamped at 0:
///   (dr * C_alpha / (da * C_r2)) * alpha - mu / (|beta| q).
/// This is the leading-order form; constant factors are dropped.
double indifference_gamma(Probability alpha, double cost_ratio_access_over_prediction,
                          const LeverDelta& d, const LinearParams& p);

/// Conservative version of indifference_gamma that keeps the factor 4 from the
/// lower envelope of par_bounds: any gamma_s strictly above it gives a
/// lower-envelope cost-benefit ratio above 1.
double sufficient_gamma(Probability alpha, double cost_ratio_access_over_prediction,
                        const LeverDelta& d, const LinearParams& p);

}  // namespace linear
}  // namespace welfare

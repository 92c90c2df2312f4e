#include "welfare/linear_model.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "welfare/errors.hpp"

namespace welfare {

void validate(const LinearParams& p) {
    if (!std::isfinite(p.mu) || !(p.mu > 0.0)) {
        throw DomainError("linear model: mu must be finite and > 0");
    }
    if (!std::isfinite(p.beta_norm) || !(p.beta_norm > 0.0)) {
        throw DomainError("linear model: beta_norm must be finite and > 0");
    }
    if (std::isnan(p.gamma_s) || p.gamma_s < 0.0 || p.gamma_s > 1.0) {
        throw DomainError("linear model: gamma_s must lie in [0, 1]");
    }
}

void validate(const LeverDelta& d) {
    if (!std::isfinite(d.delta_alpha) || d.delta_alpha < 0.0) {
        throw DomainError("lever delta: delta_alpha must be finite and >= 0");
    }
    if (!std::isfinite(d.delta_r2) || d.delta_r2 < 0.0) {
        throw DomainError("lever delta: delta_r2 must be finite and >= 0");
    }
}

namespace linear {
namespace {

void require_supported_alpha(double alpha, const char* op) {
    if (!(alpha > 0.0)) {
        throw DomainError(std::string(op) + ": alpha must be > 0");
    }
    if (alpha >= 0.5) {
        throw PreconditionError(std::string(op) + ": alpha = " + std::to_string(alpha) +
                                " >= 1/2 is outside the supported regime (the positivity "
                                "indicator of the optimal policy would bind)");
    }
}

double require_positive_cost_ratio(double ratio) {
    if (!std::isfinite(ratio) || !(ratio > 0.0)) {
        throw DomainError("cost ratio must be finite and > 0");
    }
    return ratio;
}

double value_unchecked(double mu, double beta_norm, double gamma_s, double alpha) {
    return alpha * mu + gamma_s * beta_norm * gaussian::phi_of_quantile(alpha);
}

}  // namespace

double policy_threshold(const LinearParams& p, Probability alpha) {
    validate(p);
    require_supported_alpha(alpha.value(), "policy_threshold");
    return gaussian::upper_quantile(alpha.value()) * p.gamma_s * p.beta_norm;
}

double value(const LinearParams& p, Probability alpha) {
    validate(p);
    require_supported_alpha(alpha.value(), "value");
    return value_unchecked(p.mu, p.beta_norm, p.gamma_s, alpha.value());
}

double random_value(const LinearParams& p, Probability alpha) {
    validate(p);
    return alpha.value() * p.mu;
}

double random_to_optimal_ratio(const LinearParams& p, Probability alpha) {
    validate(p);
    require_supported_alpha(alpha.value(), "random_to_optimal_ratio");
    const double a = alpha.value();
    return 1.0 / (1.0 + (p.beta_norm / p.mu) * gaussian::phi_of_quantile(a) / a);
}

double par_exact(const LinearParams& p, Probability alpha, const LeverDelta& d) {
    validate(p);
    validate(d);
    const double a = alpha.value();
    require_supported_alpha(a, "par_exact");
    if (!(a + d.delta_alpha < 0.5)) {
        throw PreconditionError("par_exact: alpha + delta_alpha must stay below 1/2");
    }
    if (!(d.delta_r2 > 0.0)) {
        throw PreconditionError("par_exact: degenerate lever, delta_r2 = 0 gives a zero "
                                "prediction gain");
    }
    if (p.gamma_s + d.delta_r2 > 1.0) {
        throw PreconditionError("par_exact: gamma_s + delta_r2 exceeds 1");
    }
    const double base = value_unchecked(p.mu, p.beta_norm, p.gamma_s, a);
    const double access_gain =
        value_unchecked(p.mu, p.beta_norm, p.gamma_s, a + d.delta_alpha) - base;
    const double prediction_gain =
        value_unchecked(p.mu, p.beta_norm, p.gamma_s + d.delta_r2, a) - base;
    if (!(prediction_gain > 0.0)) {
        throw PreconditionError("par_exact: degenerate lever, prediction gain is zero");
    }
    return access_gain / prediction_gain;
}

BoundPair par_bounds(const LinearParams& p, Probability alpha, const LeverDelta& d) {
    validate(p);
    validate(d);
    const double a = alpha.value();
    if (!(a > 0.0)) throw DomainError("par_bounds: alpha must be > 0");
    if (!(p.gamma_s > 0.0 && p.gamma_s < 1.0)) {
        throw PreconditionError("par_bounds: hypothesis gamma_s in (0, 1) violated");
    }
    if (!(d.delta_r2 > 0.0 && d.delta_r2 < 1.0)) {
        throw PreconditionError("par_bounds: hypothesis delta_r2 in (0, 1) violated");
    }
    if (!(a + d.delta_alpha < 0.05)) {
        throw PreconditionError("par_bounds: hypothesis alpha + delta_alpha < 0.05 violated");
    }
    if (d.delta_alpha > 4.0 * a) {
        throw PreconditionError("par_bounds: hypothesis delta_alpha in [0, 4 alpha] violated");
    }
    const double q = gaussian::upper_quantile(a);
    const double upper =
        (p.mu / (p.beta_norm * q) + p.gamma_s) * (d.delta_alpha / d.delta_r2) / a;
    return {0.25 * upper, upper};
}

double quality_gain(const LinearParams& p, Probability alpha, double delta_mu) {
    validate(p);
    require_supported_alpha(alpha.value(), "quality_gain");
    if (!std::isfinite(delta_mu) || !(delta_mu > 0.0)) {
        throw DomainError("quality_gain: delta_mu must be finite and > 0");
    }
    return delta_mu * alpha.value();
}

namespace {

double threshold_with_factor(double factor, Probability alpha, double cost_ratio,
                             const LeverDelta& d, const LinearParams& p) {
    validate(p);
    validate(d);
    require_positive_cost_ratio(cost_ratio);
    const double a = alpha.value();
    if (!(a > 0.0 && a < 0.05)) {
        throw DomainError("indifference threshold: alpha must lie in (0, 0.05)");
    }
    if (!(d.delta_alpha > 0.0 && d.delta_r2 > 0.0)) {
        throw DomainError("indifference threshold: both deltas must be > 0");
    }
    const double q = gaussian::upper_quantile(a);
    const double rhs =
        factor * (d.delta_r2 * cost_ratio / d.delta_alpha) * a - p.mu / (p.beta_norm * q);
    return std::max(0.0, rhs);
}

}  // namespace

double indifference_gamma(Probability alpha, double cost_ratio_access_over_prediction,
                          const LeverDelta& d, const LinearParams& p) {
    return threshold_with_factor(1.0, alpha, cost_ratio_access_over_prediction, d, p);
}

double sufficient_gamma(Probability alpha, double cost_ratio_access_over_prediction,
                        const LeverDelta& d, const LinearParams& p) {
    return threshold_with_factor(4.0, alpha, cost_ratio_access_over_prediction, d, p);
}

}  // namespace linear
}  // namespace welfare

#include "welfare/probit_model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "welfare/errors.hpp"
#include "welfare/quadrature.hpp"

namespace welfare {

void validate(const ProbitParams& p) {
    if (std::isnan(p.base_rate) || !(p.base_rate > 0.0 && p.base_rate < 1.0)) {
        throw DomainError("probit model: base_rate must lie in (0, 1)");
    }
    if (std::isnan(p.gamma_s) || p.gamma_s < 0.0 || p.gamma_s > 1.0) {
        throw DomainError("probit model: gamma_s must lie in [0, 1]");
    }
}

namespace probit {
namespace {

double require_alpha(Probability alpha, const char* op) {
    if (!(alpha.value() > 0.0)) {
        throw DomainError(std::string(op) + ": alpha must be > 0");
    }
    return alpha.value();
}

struct Evaluation {
    double value;
    double tolerance;  // absolute tolerance the quadrature was asked to meet
};

Evaluation evaluate(double base_rate, double gamma_s, double alpha) {
    if (gamma_s == 0.0) return {alpha * base_rate, 0.0};
    if (gamma_s == 1.0) return {std::min(alpha, base_rate), 0.0};

    const double m = gaussian::quantile(base_rate);
    const double gt = std::sqrt((1.0 - gamma_s) * (1.0 + gamma_s));
    auto integrand = [=](double v) {
        return gaussian::cdf((gamma_s * gaussian::upper_quantile(v) + m) / gt);
    };
    quadrature::Options options;
    options.rel_tol = kValueRelTol;
    options.abs_tol = 1e-300;
    const quadrature::Result r = quadrature::integrate(integrand, 0.0, alpha, options);
    return {r.value, std::max(options.abs_tol, options.rel_tol * std::abs(r.value))};
}

}  // namespace

double mu_over_beta(const ProbitParams& p) {
    validate(p);
    return gaussian::quantile(p.base_rate);
}

double gamma_t(const ProbitParams& p) {
    validate(p);
    return std::sqrt((1.0 - p.gamma_s) * (1.0 + p.gamma_s));
}

double policy_threshold(const ProbitParams& p, Probability alpha) {
    validate(p);
    const double a = require_alpha(alpha, "policy_threshold");
    if (a >= 1.0) throw DomainError("policy_threshold: alpha must be < 1");
    return gaussian::upper_quantile(a);
}

double value(const ProbitParams& p, Probability alpha) {
    validate(p);
    const double a = require_alpha(alpha, "value");
    return evaluate(p.base_rate, p.gamma_s, a).value;
}

double dvalue_dalpha(const ProbitParams& p, Probability alpha) {
    validate(p);
    const double a = require_alpha(alpha, "dvalue_dalpha");
    if (a >= 1.0) throw DomainError("dvalue_dalpha: alpha must be < 1");
    if (p.gamma_s >= 1.0) {
        throw PreconditionError("dvalue_dalpha: gamma_s = 1 leaves no unexplained variance");
    }
    const double gt = gamma_t(p);
    return gaussian::cdf((p.gamma_s * gaussian::upper_quantile(a) + mu_over_beta(p)) / gt);
}

double dvalue_dgamma(const ProbitParams& p, Probability alpha) {
    validate(p);
    const double a = require_alpha(alpha, "dvalue_dgamma");
    if (a >= 1.0) throw DomainError("dvalue_dgamma: alpha must be < 1");
    if (!(p.gamma_s > 0.0 && p.gamma_s < 1.0)) {
        throw PreconditionError("dvalue_dgamma: gamma_s must lie strictly inside (0, 1)");
    }
    const double m = mu_over_beta(p);
    const double gt = gamma_t(p);
    const double q = gaussian::upper_quantile(a);
    return gaussian::pdf(m) * gaussian::pdf((q + m * p.gamma_s) / gt) / gt;
}

double par_exact(const ProbitParams& p, Probability alpha, const LeverDelta& d) {
    validate(p);
    validate(d);
    const double a = require_alpha(alpha, "par_exact");
    if (a + d.delta_alpha > 1.0) {
        throw PreconditionError("par_exact: alpha + delta_alpha exceeds 1");
    }
    if (p.gamma_s + d.delta_r2 > 1.0) {
        throw PreconditionError("par_exact: gamma_s + delta_r2 exceeds 1");
    }
    if (!(d.delta_r2 > 0.0)) {
        throw PreconditionError("par_exact: degenerate lever, delta_r2 = 0");
    }
    if (d.delta_r2 < kMinDelta) {
        throw PreconditionError("par_exact: delta_r2 below 1e-5 is dominated by quadrature error");
    }
    if (d.delta_alpha > 0.0 && d.delta_alpha < kMinDelta) {
        throw PreconditionError(
            "par_exact: delta_alpha below 1e-5 is dominated by quadrature error");
    }

    const Evaluation base = evaluate(p.base_rate, p.gamma_s, a);
    const Evaluation better = evaluate(p.base_rate, p.gamma_s + d.delta_r2, a);
    const double prediction_gain = better.value - base.value;
    const double tolerance = std::max(base.tolerance, better.tolerance);
    if (!(prediction_gain > 10.0 * tolerance)) {
        throw NumericalError("par_exact: prediction gain " + std::to_string(prediction_gain) +
                             " is within 10x of the quadrature tolerance");
    }
    if (d.delta_alpha == 0.0) return 0.0;
    const double access_gain = evaluate(p.base_rate, p.gamma_s, a + d.delta_alpha).value -
                               base.value;
    return access_gain / prediction_gain;
}

namespace {

void check_bound_hypotheses(const ProbitParams& p, double a, const LeverDelta& d,
                            const BoundsConfig& config) {
    if (!(config.eps > 0.0 && config.eps < 0.1)) {
        throw PreconditionError("par_bounds: hypothesis eps in (0, 0.1) violated");
    }
    if (!(config.smallness > 0.0)) {
        throw DomainError("par_bounds: smallness threshold must be > 0");
    }
    if (!(p.gamma_s > 0.0 && p.gamma_s < 1.0)) {
        throw PreconditionError("par_bounds: hypothesis gamma_s in (0, 1) violated");
    }
    if (!(p.base_rate < 0.1)) {
        throw PreconditionError("par_bounds: hypothesis b < 0.1 violated");
    }
    if (!(d.delta_r2 > 0.0)) {
        throw PreconditionError("par_bounds: hypothesis delta_r2 > 0 violated");
    }
    if (d.delta_alpha > a) {
        throw PreconditionError("par_bounds: hypothesis delta_alpha <= alpha violated");
    }
    if (std::max(a, d.delta_r2) > config.smallness) {
        throw PreconditionError("par_bounds: hypothesis max(alpha, delta_r2) <= t violated (t = " +
                                std::to_string(config.smallness) + ")");
    }
}

}  // namespace

BoundPair par_bounds(const ProbitParams& p, Probability alpha, const LeverDelta& d,
                     const BoundsConfig& config) {
    validate(p);
    validate(d);
    const double a = require_alpha(alpha, "par_bounds");
    check_bound_hypotheses(p, a, d, config);

    const double gt = gamma_t(p);
    const double inv_var = 1.0 / (gt * gt);
    const double qa = gaussian::upper_quantile(a);
    const double qb = gaussian::upper_quantile(p.base_rate);
    const double eps = config.eps;
    const double eps_prime = eps / (1.0 - eps);
    const double prefactor = (d.delta_alpha * gt / d.delta_r2) / (p.base_rate * qb);
    const double lower_exponent = inv_var * (1.0 - eps) * (1.0 - eps);
    const double upper_exponent = inv_var * (1.0 + eps_prime) * (1.0 + eps_prime);
    const double lower =
        0.3 * prefactor * std::pow(1.0 / (1.01 * gaussian::kSqrt2Pi * a * qa), lower_exponent);
    const double upper =
        3.0 * prefactor * std::pow(1.0 / (gaussian::kSqrt2Pi * a * qa), upper_exponent);
    return {lower, upper};
}

BoundsDiagnostics bounds_diagnostics(const ProbitParams& p, Probability alpha,
                                     const LeverDelta& d, const BoundsConfig& config) {
    validate(p);
    validate(d);
    const double a = require_alpha(alpha, "bounds_diagnostics");
    BoundsDiagnostics out{};

    const double qb = gaussian::upper_quantile(p.base_rate);
    out.access_regime = 2.0 * a < 1.0 && p.gamma_s * gaussian::upper_quantile(2.0 * a) >= qb;

    const double qa = gaussian::upper_quantile(a);
    const double gt = gamma_t(p);
    const double lo = (1.0 - config.eps) * qa / gt;
    const double hi = qa / ((1.0 - config.eps) * gt);
    out.argument_slack = true;
    for (double gs : {p.gamma_s, std::min(1.0, p.gamma_s + d.delta_r2)}) {
        const double gtc = std::sqrt((1.0 - gs) * (1.0 + gs));
        const double arg = (qa - qb * gs) / gtc;
        if (!(gtc > 0.0 && arg >= lo && arg <= hi)) out.argument_slack = false;
    }

    out.density_slack = gaussian::pdf(qa) <= 1.01 * a * qa;
    return out;
}

CutoffResult cutoff_check(const ProbitParams& p, Probability alpha,
                          double cost_ratio_access_over_prediction) {
    validate(p);
    const double a = require_alpha(alpha, "cutoff_check");
    if (a >= 1.0) throw DomainError("cutoff_check: alpha must be < 1");
    const double ratio = cost_ratio_access_over_prediction;
    if (!std::isfinite(ratio) || !(ratio > 0.0)) {
        throw DomainError("cutoff_check: cost ratio must be finite and > 0");
    }
    const double gt = gamma_t(p);
    const double exponent = 1.0 / (gt * gt);
    if (gt == 0.0 || !std::isfinite(exponent)) {
        return {true, 0.0, true};
    }
    const double rhs = ratio * std::pow(a, exponent) * p.base_rate;
    return {gt >= rhs, gt - rhs, false};
}

}  // namespace probit
}  // namespace welfare

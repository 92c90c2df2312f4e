#include "welfare/gaussian.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "welfare/errors.hpp"

namespace welfare {

Probability::Probability(double value) : value_(value) {
    if (std::isnan(value) || value < 0.0 || value > 1.0) {
        throw DomainError("probability must lie in [0, 1], got " + std::to_string(value));
    }
}

namespace gaussian {
namespace {

constexpr double kTailSwitch = 6.0;

void reject_nan(double x, const char* what) {
    if (std::isnan(x)) {
        throw DomainError(std::string(what) + ": NaN argument");
    }
}

// Mills ratio R(x) = Q(x)/phi(x) for x >= kTailSwitch, from the continued fraction
//   R(x) = 1/(x + 1/(x + 2/(x + 3/(x + ...))))
// evaluated with the modified Lentz algorithm.
double mills_ratio_cf(double x) {
    constexpr double tiny = 1e-300;
    constexpr double eps = 1e-16;
    double f = x;
    double c = f;
    double d = 0.0;
    for (int n = 1; n < 1000; ++n) {
        const double a = n;
        d = x + a * d;
        if (d == 0.0) d = tiny;
        c = x + a / c;
        if (c == 0.0) c = tiny;
        d = 1.0 / d;
        const double delta = c * d;
        f *= delta;
        if (std::abs(delta - 1.0) < eps) break;
    }
    return 1.0 / f;
}

double raw_pdf(double z) { return kInvSqrt2Pi * std::exp(-0.5 * z * z); }

double raw_survival(double t) {
    if (t == std::numeric_limits<double>::infinity()) return 0.0;
    if (t == -std::numeric_limits<double>::infinity()) return 1.0;
    if (t > kTailSwitch) return raw_pdf(t) * mills_ratio_cf(t);
    if (t < -kTailSwitch) return 1.0 - raw_pdf(t) * mills_ratio_cf(-t);
    return 0.5 * std::erfc(t / std::numbers::sqrt2);
}

// Lower half of the quantile, p in (0, 1/2].
double lower_quantile(double p) {
    static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                   -2.759285104469687e+02, 1.383577518672690e+02,
                                   -3.066479806614716e+01, 2.506628277459239e+00};
    static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                   -1.556989798598866e+02, 6.680131188771972e+01,
                                   -1.328068155288572e+01};
    static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                   -2.400758277161838e+00, -2.549732539343734e+00,
                                   4.374664141464968e+00,  2.938163982698783e+00};
    static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                                   2.445134137142996e+00, 3.754408661907416e+00};
    constexpr double p_low = 0.02425;

    double x;
    if (p < p_low) {
        const double q = std::sqrt(-2.0 * std::log(p));
        x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    } else {
        const double q = p - 0.5;
        const double r = q * q;
        x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
            (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
    }

    // One Halley step against the exact cdf.
    const double density = raw_pdf(x);
    if (density > std::numeric_limits<double>::min()) {
        const double e = raw_survival(-x) - p;
        const double u = e / density;
        x -= u / (1.0 + 0.5 * x * u);
    }
    return x;
}

}  // namespace

double pdf(double z) {
    if (!std::isfinite(z)) {
        throw DomainError("pdf: argument must be finite");
    }
    return raw_pdf(z);
}

double cdf(double t) {
    reject_nan(t, "cdf");
    return raw_survival(-t);
}

double survival(double t) {
    reject_nan(t, "survival");
    return raw_survival(t);
}

double quantile(double p) {
    if (std::isnan(p) || p <= 0.0 || p >= 1.0) {
        throw DomainError("quantile: p must lie in (0, 1), got " + std::to_string(p));
    }
    if (p > 0.5) return -lower_quantile(1.0 - p);
    return lower_quantile(p);
}

double upper_quantile(double alpha) {
    if (std::isnan(alpha) || alpha <= 0.0 || alpha >= 1.0) {
        throw DomainError("upper_quantile: alpha must lie in (0, 1), got " +
                          std::to_string(alpha));
    }
    if (alpha > 0.5) return lower_quantile(1.0 - alpha);
    return -lower_quantile(alpha);
}

double mills_conditional_mean(double mu, double sigma, double a) {
    if (!std::isfinite(mu)) throw DomainError("mills_conditional_mean: mu must be finite");
    if (!std::isfinite(sigma) || !(sigma > 0.0)) {
        throw DomainError("mills_conditional_mean: sigma must be finite and > 0");
    }
    reject_nan(a, "mills_conditional_mean");
    if (a == -std::numeric_limits<double>::infinity()) return mu;

    const double standardized = (a - mu) / sigma;
    const double tail = raw_survival(standardized);
    const double density = std::isfinite(standardized) ? raw_pdf(standardized) : 0.0;
    if (tail == 0.0 || density == 0.0) {
        throw NumericalError("mills_conditional_mean: tail mass beyond standardized threshold " +
                             std::to_string(standardized) + " underflows to zero");
    }
    return mu + sigma * density / tail;
}

BoundPair tail_bounds(double t) {
    if (!std::isfinite(t) || !(t > 0.0)) {
        throw DomainError("tail_bounds: t must be finite and > 0, got " + std::to_string(t));
    }
    const double upper = raw_pdf(t) / t;
    return {upper * (1.0 - 1.0 / (t * t)), upper};
}

double phi_of_quantile(double alpha) { return raw_pdf(upper_quantile(alpha)); }

double phi_of_quantile_slack(double alpha) {
    if (std::isnan(alpha) || !(alpha > 0.0 && alpha < 0.15)) {
        throw DomainError("phi_of_quantile_slack: alpha must lie in (0, 0.15), got " +
                          std::to_string(alpha));
    }
    const double q = upper_quantile(alpha);
    return 1.0 / (q * q - 1.0);
}

BoundPair phi_of_quantile_sandwich(double alpha) {
    const double f = phi_of_quantile_slack(alpha);
    const double base = alpha * upper_quantile(alpha);
    return {base, base * (1.0 + f)};
}

BoundPair k_phi_of_quantile_bounds(double k, double alpha, double eps) {
    if (!std::isfinite(k) || !(k > 0.0)) {
        throw DomainError("k_phi_of_quantile_bounds: k must be finite and > 0");
    }
    if (!std::isfinite(eps) || !(eps > 0.0)) {
        throw DomainError("k_phi_of_quantile_bounds: eps must be finite and > 0");
    }
    if (std::isnan(alpha) || !(alpha > 0.0 && alpha < 0.5)) {
        throw PreconditionError("k_phi_of_quantile_bounds: alpha = " + std::to_string(alpha) +
                                " outside (0, 1/2), Phi^{-1}(1 - alpha) is not positive");
    }
    const double q = upper_quantile(alpha);
    const double base = alpha * q;
    const double g = raw_pdf(q);
    if (!(g >= base && g <= (1.0 + eps) * base)) {
        throw PreconditionError("k_phi_of_quantile_bounds: alpha = " + std::to_string(alpha) +
                                " is not small enough for slack eps = " + std::to_string(eps) +
                                " (phi(q)/(alpha q) = " + std::to_string(g / base) + ")");
    }
    const double k2 = k * k;
    return {std::pow(kSqrt2Pi * base, k2) / kSqrt2Pi,
            std::pow((1.0 + eps) * kSqrt2Pi * base, k2) / kSqrt2Pi};
}

}  // namespace gaussian
}  // namespace welfare

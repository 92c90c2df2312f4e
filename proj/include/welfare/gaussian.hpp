#pragma once

// Standard-normal special functions and the tail/quantile inequalities used by
// the welfare models. Everything here is pure and thread-safe.

#include <numbers>

namespace welfare {

/// A real number in the closed unit interval. Construction rejects NaN and
/// values outside [0, 1].
class Probability {
public:
    explicit Probability(double value);

    [[nodiscard]] double value() const noexcept { return value_; }

    friend bool operator==(Probability, Probability) = default;

private:
    double value_;
};

/// Sandwich [lower, upper] with lower <= upper.
struct BoundPair {
    double lower;
    double upper;

    [[nodiscard]] bool contains(double x) const noexcept { return lower <= x && x <= upper; }
};

namespace gaussian {

inline constexpr double kInvSqrt2Pi = 0.398942280401432677939946059934;  // 1/sqrt(2*pi)
inline constexpr double kSqrt2Pi = 2.50662827463100050241576528481;

/// phi(z). Throws DomainError for non-finite z.
double pdf(double z);

/// Phi(t). Accepts +-inf; throws DomainError for NaN.
/// Uses erfc for |t| <= 6 and a continued-fraction Mills ratio beyond.
double cdf(double t);

/// Upper tail Pr(Z >= t) = Phi(-t), accurate deep into the right tail.
double survival(double t);

/// Phi^{-1}(p) for p in (0, 1). Acklam's rational approximation refined by one
/// Halley step against cdf; exactly antisymmetric about p = 1/2.
double quantile(double p);

/// Phi^{-1}(1 - alpha), computed without forming 1 - alpha.
double upper_quantile(double alpha);

/// E[z | z > a] for z ~ N(mu, sigma^2). a may be -inf.
/// Throws NumericalError when the tail mass past a underflows to zero.
double mills_conditional_mean(double mu, double sigma, double a);

/// (phi(t)/t)(1 - t^-2) <= Pr(z >= t) <= phi(t)/t, for t > 0.
BoundPair tail_bounds(double t);

/// g(alpha) = phi(Phi^{-1}(1 - alpha)).
double phi_of_quantile(double alpha);

/// f(alpha) = q^2/(q^2 - 1) - 1 with q = Phi^{-1}(1 - alpha); the relative slack
/// in alpha*q <= g(alpha) <= alpha*q*(1 + f(alpha)). Requires alpha < 0.15.
double phi_of_quantile_slack(double alpha);

/// [alpha*q, alpha*q*(1 + f(alpha))] for alpha < 0.15.
BoundPair phi_of_quantile_sandwich(double alpha);

/// Bounds on phi(k * Phi^{-1}(1 - alpha)):
///   lower = (sqrt(2pi) alpha q)^{k^2} / sqrt(2pi)
///   upper = ((1 + eps) sqrt(2pi) alpha q)^{k^2} / sqrt(2pi)
/// Valid only once g(alpha) <= (1 + eps) alpha q; that condition is checked at
/// runtime and a PreconditionError naming alpha is thrown when it fails.
BoundPair k_phi_of_quantile_bounds(double k, double alpha, double eps);

}  // namespace gaussian
}  // namespace welfare

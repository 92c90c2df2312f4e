#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "welfare/errors.hpp"
#include "welfare/levers_grid.hpp"
#include "welfare/linear_model.hpp"
#include "welfare/oracle.hpp"

namespace lin = welfare::linear;
namespace g = welfare::gaussian;
using welfare::DomainError;
using welfare::LeverDelta;
using welfare::LinearParams;
using welfare::PreconditionError;
using welfare::Probability;

namespace {

const LinearParams kFig{1.0, 10.0, 0.3};

LinearParams with_gamma(double gs) { return {1.0, 10.0, gs}; }

// V recomputed from its pieces: alpha*mu + gamma_s*|beta|*pdf(quantile(1 - alpha)).
double value_oracle(const LinearParams& p, double a) {
    return a * p.mu + p.gamma_s * p.beta_norm * g::pdf(g::quantile(1.0 - a));
}

}  // namespace

TEST(LinearThreshold, Examples) {
    EXPECT_NEAR(lin::policy_threshold(kFig, Probability(0.5 - 1e-12)), 0.0, 1e-10);
    EXPECT_EQ(lin::policy_threshold(with_gamma(0.0), Probability(0.2)), 0.0);
    EXPECT_NEAR(lin::policy_threshold(kFig, Probability(0.05)), 3.0 * g::quantile(0.95), 1e-14);
    EXPECT_THROW(lin::policy_threshold(kFig, Probability(0.5)), PreconditionError);
}

TEST(LinearValue, Examples) {
    EXPECT_DOUBLE_EQ(lin::value(with_gamma(0.0), Probability(0.3)), 0.3);
    EXPECT_NEAR(lin::value(kFig, Probability(0.5 - 1e-12)), 0.5 + 3.0 / std::sqrt(2 * M_PI), 1e-10);
    EXPECT_NEAR(lin::value(kFig, Probability(0.05)), value_oracle(kFig, 0.05), 1e-14);
}

TEST(LinearValue, MatchesMonteCarlo) {
    const auto est = welfare::oracle::simulate_linear_value(kFig, Probability(0.05), {1'000'000, 7, 0});
    EXPECT_LE(std::abs(est.mean - lin::value(kFig, Probability(0.05))), 4 * est.std_error);
}

TEST(LinearValue, RejectsInvalidParameters) {
    EXPECT_THROW(lin::value({0.0, 10.0, 0.3}, Probability(0.1)), DomainError);
    EXPECT_THROW(lin::value({1.0, 0.0, 0.3}, Probability(0.1)), DomainError);
    EXPECT_THROW(lin::value({1.0, 10.0, 1.1}, Probability(0.1)), DomainError);
    EXPECT_THROW(lin::value({1.0, 10.0, std::nan("")}, Probability(0.1)), DomainError);
    EXPECT_THROW(lin::value(kFig, Probability(0.0)), DomainError);
    EXPECT_THROW(lin::value(kFig, Probability(0.7)), PreconditionError);
}

TEST(LinearValue, Monotonicity) {
    double prev = 0.0;
    for (double a = 0.001; a < 0.5; a += 0.01) {
        const double v = lin::value(kFig, Probability(a));
        EXPECT_GT(v, prev);
        prev = v;
    }
    const Probability a(0.1);
    EXPECT_LT(lin::value(with_gamma(0.2), a), lin::value(with_gamma(0.21), a));
    EXPECT_LT(lin::value({1.0, 10.0, 0.2}, a), lin::value({1.1, 10.0, 0.2}, a));
    EXPECT_LT(lin::value({1.0, 10.0, 0.2}, a), lin::value({1.0, 10.5, 0.2}, a));
}

TEST(RandomValue, Examples) {
    EXPECT_EQ(lin::random_value({1.0, 10.0, 0.3}, Probability(0.0)), 0.0);
    EXPECT_EQ(lin::random_value({2.0, 10.0, 0.3}, Probability(0.25)), 0.5);
    for (double a : {0.01, 0.2, 0.45}) {
        EXPECT_LE(lin::random_value(kFig, Probability(a)), lin::value(kFig, Probability(a)));
    }
}

TEST(RandomToOptimal, Examples) {
    const double near_one = lin::random_to_optimal_ratio({1.0, 1e-9, 0.0}, Probability(0.1));
    EXPECT_LT(1.0 - near_one, 1e-6);
    EXPECT_LT(near_one, 1.0 + 1e-15);

    const double r = lin::random_to_optimal_ratio({1.0, 10.0, 0.3}, Probability(0.1));
    EXPECT_NEAR(r, lin::random_value(kFig, Probability(0.1)) / lin::value(with_gamma(1.0), Probability(0.1)),
                1e-15);

    const double a = 0.25, q = g::quantile(0.75);
    const double direct = 1.0 / (1.0 + std::exp(-0.5 * q * q) / std::sqrt(2 * M_PI) / a);
    EXPECT_NEAR(lin::random_to_optimal_ratio({1.0, 1.0, 0.5}, Probability(a)), direct, 1e-15);
}

TEST(LinearPar, ZeroAccessIncrementGivesZero) {
    EXPECT_EQ(lin::par_exact(kFig, Probability(0.02), {0.0, 0.01}), 0.0);
}

TEST(LinearPar, MatchesValueDifferencesAndBounds) {
    const LeverDelta d{0.01, 0.01};
    const double par = lin::par_exact(kFig, Probability(0.02), d);
    const double oracle = (value_oracle(kFig, 0.03) - value_oracle(kFig, 0.02)) /
                          (value_oracle(with_gamma(0.31), 0.02) - value_oracle(kFig, 0.02));
    EXPECT_NEAR(par, oracle, 1e-12 * oracle);
    EXPECT_TRUE(lin::par_bounds(kFig, Probability(0.02), d).contains(par));
}

TEST(LinearPar, AgreesWithMonteCarloCorners) {
    const LinearParams p = with_gamma(0.1);
    const welfare::oracle::SimConfig cfg{4'000'000, 99, 0};
    // Common random numbers: the same seed at all corners makes the differences precise.
    auto mc = [&](const LinearParams& q, double a) {
        return welfare::oracle::simulate_linear_value(q, Probability(a), cfg);
    };
    const auto base = mc(p, 0.01);
    const auto access = mc(p, 0.02);
    const auto predict = mc(with_gamma(0.11), 0.01);
    const double mc_par = (access.mean - base.mean) / (predict.mean - base.mean);
    const double exact = lin::par_exact(p, Probability(0.01), {0.01, 0.01});
    // Loose error budget: numerator SE over the (tiny) denominator dominates.
    const double num_se = std::hypot(access.std_error, base.std_error);
    const double den = predict.mean - base.mean;
    EXPECT_GT(den, 0.0);
    EXPECT_NEAR(mc_par, exact, 4.0 * num_se / den + 0.05 * exact);
}

TEST(LinearPar, DegenerateAndRegimeErrors) {
    EXPECT_THROW(lin::par_exact(kFig, Probability(0.02), {0.01, 0.0}), PreconditionError);
    EXPECT_THROW(lin::par_exact(kFig, Probability(0.45), {0.06, 0.01}), PreconditionError);
    EXPECT_THROW(lin::par_exact(with_gamma(0.995), Probability(0.02), {0.01, 0.01}), PreconditionError);
    EXPECT_THROW(lin::par_exact(kFig, Probability(0.02), {-0.01, 0.01}), DomainError);
}

TEST(LinearBounds, StructureAndScaling) {
    const auto b = lin::par_bounds(kFig, Probability(0.02), {0.01, 0.01});
    EXPECT_DOUBLE_EQ(b.upper / b.lower, 4.0);
    EXPECT_GT(b.lower, 0.0);
    const auto b2 = lin::par_bounds(kFig, Probability(0.02), {0.02, 0.01});
    EXPECT_NEAR(b2.lower / b.lower, 2.0, 1e-14);
    EXPECT_NEAR(b2.upper / b.upper, 2.0, 1e-14);
}

TEST(LinearBounds, EachHypothesisIsNamed) {
    auto message = [](auto&& f) {
        try {
            f();
        } catch (const PreconditionError& e) {
            return std::string(e.what());
        }
        return std::string("no error");
    };
    EXPECT_NE(message([] { lin::par_bounds(with_gamma(0.0), Probability(0.02), {0.01, 0.01}); })
                  .find("gamma_s in (0, 1)"),
              std::string::npos);
    EXPECT_NE(message([] { lin::par_bounds(kFig, Probability(0.02), {0.01, 1.0}); })
                  .find("delta_r2 in (0, 1)"),
              std::string::npos);
    EXPECT_NE(message([] { lin::par_bounds(kFig, Probability(0.045), {0.01, 0.01}); })
                  .find("alpha + delta_alpha < 0.05"),
              std::string::npos);
    EXPECT_NE(message([] { lin::par_bounds(kFig, Probability(0.002), {0.01, 0.01}); })
                  .find("delta_alpha in [0, 4 alpha]"),
              std::string::npos);
}

TEST(LinearBounds, ContainmentOnRandomInstances) {
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 500; ++i) {
        const double a = 1e-4 + u(rng) * (0.05 - 1e-4);
        const double da = u(rng) * std::min(4 * a, 0.05 - a) * 0.999;
        const double gs = 0.01 + 0.98 * u(rng);
        const double dr = (1.0 - gs) * (0.01 + 0.98 * u(rng));
        const LinearParams p{0.1 + 5 * u(rng), 0.5 + 20 * u(rng), gs};
        const LeverDelta d{da, dr};
        const double par = lin::par_exact(p, Probability(a), d);
        EXPECT_TRUE(lin::par_bounds(p, Probability(a), d).contains(par)) << i;
    }
}

TEST(LinearSandwiches, AccessAndPredictionGains) {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 300; ++i) {
        const double a = 1e-4 + u(rng) * 0.0449;
        const double da = u(rng) * std::min(4 * a, 0.05 - a) * 0.999;
        const LinearParams p{0.1 + 3 * u(rng), 0.5 + 20 * u(rng), 0.98 * u(rng)};
        const double q = g::upper_quantile(a);
        const double gain = lin::value(p, Probability(a + da)) - lin::value(p, Probability(a));
        const double tol = 1e-12 * std::abs(gain) + 1e-15;
        EXPECT_GE(gain + tol, da * (p.mu + 0.5 * p.gamma_s * p.beta_norm * q)) << i;
        EXPECT_LE(gain - tol, da * (p.mu + p.gamma_s * p.beta_norm * q)) << i;

        const double dr = (1.0 - p.gamma_s) * u(rng);
        const LinearParams up{p.mu, p.beta_norm, p.gamma_s + dr};
        const double pgain = lin::value(up, Probability(a)) - lin::value(p, Probability(a));
        const double lo = dr * p.beta_norm * a * q;
        const double ptol = 1e-12 * std::abs(pgain) + 1e-15;
        EXPECT_GE(pgain + ptol, lo) << i;
        EXPECT_LE(pgain - ptol, lo * (1.0 + g::phi_of_quantile_slack(a))) << i;

        const double dg = g::phi_of_quantile(a + da) - g::phi_of_quantile(a);
        EXPECT_GE(dg + 1e-15, 0.5 * q * da) << i;
        EXPECT_LE(dg - 1e-15, q * da) << i;
    }
}

TEST(QualityGain, Examples) {
    EXPECT_DOUBLE_EQ(lin::quality_gain(kFig, Probability(0.1), 1.0), 0.1);
    EXPECT_DOUBLE_EQ(lin::quality_gain(kFig, Probability(0.05), 0.2), 0.01);
    const double diff = lin::value({1.5, 10.0, 0.3}, Probability(0.1)) - lin::value(kFig, Probability(0.1));
    EXPECT_NEAR(lin::quality_gain(kFig, Probability(0.1), 0.5), diff, 1e-15);
    EXPECT_THROW(lin::quality_gain(kFig, Probability(0.1), 0.0), DomainError);
}

TEST(IndifferenceGamma, ClampsAndHasCostRatioSlope) {
    const LeverDelta d{0.01, 0.01};
    EXPECT_EQ(lin::indifference_gamma(Probability(0.02), 1e-9, d, kFig), 0.0);
    const LinearParams big{0.01, 10.0, 0.3};
    auto corr_big = [](double a) { return 0.01 / (10.0 * g::upper_quantile(a)); };
    const double t1 = lin::indifference_gamma(Probability(0.01), 5.0, d, big) + corr_big(0.01);
    const double t2 = lin::indifference_gamma(Probability(0.03), 5.0, d, big) + corr_big(0.03);
    EXPECT_NEAR((t2 - t1) / 0.02, 5.0, 1e-12);
}

TEST(IndifferenceGamma, SufficientThresholdGuaranteesLowerBoundAboveOne) {
    const LeverDelta d{0.01, 0.01};
    const LinearParams base{1.0, 10.0, 0.0};
    const double cost_ratio = 2.0;  // C_alpha / C_r2
    const welfare::grid::CostModel cm{cost_ratio, 1.0};
    const double gs = lin::sufficient_gamma(Probability(0.02), cost_ratio, d, base) + 0.05;
    const auto b = lin::par_bounds({1.0, 10.0, gs}, Probability(0.02), d);
    EXPECT_GT(welfare::grid::cost_benefit(b.lower, cm), 1.0);
}

// The leading-order threshold drops the 1/4 of the lower envelope, so the
// lower-envelope ratio at threshold + 0.05 need not exceed 1; the exact ratio does.
TEST(IndifferenceGamma, LeadingOrderThresholdVersusExactRatio) {
    const LeverDelta d{0.01, 0.01};
    const welfare::grid::CostModel cm{2.0, 1.0};
    const double gs = lin::indifference_gamma(Probability(0.02), 2.0, d, {1.0, 10.0, 0.0}) + 0.05;
    const LinearParams p{1.0, 10.0, gs};
    const double exact_cb = welfare::grid::cost_benefit(lin::par_exact(p, Probability(0.02), d), cm);
    EXPECT_GT(exact_cb, 1.0);
    const double lower_cb = welfare::grid::cost_benefit(lin::par_bounds(p, Probability(0.02), d).lower, cm);
    EXPECT_LT(lower_cb, 1.0);
}

TEST(IndifferenceGamma, DomainErrors) {
    const LeverDelta d{0.01, 0.01};
    EXPECT_THROW(lin::indifference_gamma(Probability(0.05), 2.0, d, kFig), DomainError);
    EXPECT_THROW(lin::indifference_gamma(Probability(0.02), 0.0, d, kFig), DomainError);
    EXPECT_THROW(lin::indifference_gamma(Probability(0.02), 2.0, {0.0, 0.01}, kFig), DomainError);
}

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "welfare/errors.hpp"
#include "welfare/oracle.hpp"
#include "welfare/rng.hpp"

namespace o = welfare::oracle;
namespace g = welfare::gaussian;
using welfare::DomainError;
using welfare::LinearParams;
using welfare::Probability;
using welfare::ProbitParams;

namespace {

bool within_4se(const o::Estimate& e, double target) {
    return std::abs(e.mean - target) <= 4.0 * e.std_error;
}

// Random instance with dyadic masses (multiples of 1/64) so every subset mass is exact.
o::DiscreteDistribution dyadic_instance(std::mt19937_64& rng, std::size_t n) {
    std::uniform_int_distribution<int> cut(1, 63);
    std::vector<int> cuts;
    while (cuts.size() + 1 < n) {
        const int c = cut(rng);
        if (std::find(cuts.begin(), cuts.end(), c) == cuts.end()) cuts.push_back(c);
    }
    cuts.push_back(0);
    cuts.push_back(64);
    std::sort(cuts.begin(), cuts.end());
    std::uniform_int_distribution<int> mean(-8, 40);
    std::vector<o::Atom> atoms;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        atoms.push_back({"a" + std::to_string(i), (cuts[i + 1] - cuts[i]) / 64.0, mean(rng) / 8.0});
    }
    return o::DiscreteDistribution(atoms);
}

}  // namespace

TEST(Rng, SeedsAndStreams) {
    welfare::Xoshiro256ss a(1), b(1), c(2);
    EXPECT_EQ(a.next(), b.next());
    EXPECT_NE(a.next(), c.next());
    EXPECT_EQ(welfare::Xoshiro256ss::stream(5, 0), welfare::Xoshiro256ss(5));
    EXPECT_FALSE(welfare::Xoshiro256ss::stream(5, 1) == welfare::Xoshiro256ss(5));
    welfare::Xoshiro256ss j(5);
    j.jump();
    j.jump();
    EXPECT_EQ(j, welfare::Xoshiro256ss::stream(5, 2));
}

TEST(Rng, UniformIsOpen) {
    welfare::Xoshiro256ss r(0);
    for (int i = 0; i < 100000; ++i) {
        const double u = r.uniform_open();
        ASSERT_GT(u, 0.0);
        ASSERT_LT(u, 1.0);
    }
}

TEST(SimulateLinear, Examples) {
    EXPECT_TRUE(within_4se(o::simulate_linear_value({1, 10, 0}, Probability(0.3), {200'000, 1, 0}), 0.3));
    const LinearParams p{1, 10, 0.3};
    const double v = 0.05 + 3.0 * g::phi_of_quantile(0.05);
    EXPECT_TRUE(within_4se(o::simulate_linear_value(p, Probability(0.05), {1'000'000, 7, 0}), v));
}

TEST(SimulateLinear, DeterministicAcrossThreadCounts) {
    const LinearParams p{1, 10, 0.3};
    const auto one = o::simulate_linear_value(p, Probability(0.05), {300'000, 42, 1});
    const auto four = o::simulate_linear_value(p, Probability(0.05), {300'000, 42, 4});
    const auto again = o::simulate_linear_value(p, Probability(0.05), {300'000, 42, 3});
    EXPECT_EQ(one, four);
    EXPECT_EQ(one, again);
    EXPECT_EQ(one.samples, 300'000u);
    const auto other = o::simulate_linear_value(p, Probability(0.05), {300'000, 43, 1});
    EXPECT_NE(one.mean, other.mean);
}

TEST(SimulateLinear, ConfigErrors) {
    EXPECT_THROW(o::simulate_linear_value({1, 10, 0.3}, Probability(0.05), {9'999, 1, 0}), DomainError);
    EXPECT_THROW(o::simulate_linear_value({1, 10, 0.3}, Probability(0.5), {10'000, 1, 0}), DomainError);
}

TEST(SimulateProbit, Examples) {
    EXPECT_TRUE(within_4se(o::simulate_probit_value({0.1, 0}, Probability(0.5), {500'000, 2, 0}), 0.05));
    EXPECT_TRUE(within_4se(o::simulate_probit_value({0.1, 0.7}, Probability(1.0), {500'000, 2, 0}), 0.1));
    EXPECT_THROW(o::simulate_probit_value({0.1, 0.7}, Probability(0.0), {500'000, 2, 0}), DomainError);
}

TEST(TruncatedMean, MillsAcrossThresholds) {
    for (double a : {-1.0, 0.0, 1.0, 2.0}) {
        const auto e = o::simulate_truncated_mean(0.0, 1.0, a, {1'000'000, 13, 0});
        EXPECT_TRUE(within_4se(e, g::mills_conditional_mean(0.0, 1.0, a))) << a;
        EXPECT_LT(e.samples, 1'000'000u);
    }
    const auto shifted = o::simulate_truncated_mean(3.0, 2.0, 4.0, {1'000'000, 13, 0});
    EXPECT_TRUE(within_4se(shifted, g::mills_conditional_mean(3.0, 2.0, 4.0)));
}

TEST(Distribution, Validation) {
    EXPECT_THROW(o::DiscreteDistribution({}), DomainError);
    EXPECT_THROW(o::DiscreteDistribution({{"a", 0.5, 1}, {"a", 0.5, 1}}), DomainError);
    EXPECT_THROW(o::DiscreteDistribution({{"a", 0.5, 1}, {"b", 0.4, 1}}), DomainError);
    EXPECT_THROW(o::DiscreteDistribution({{"a", 1.0, 1}, {"b", 0.0, 1}}), DomainError);
    EXPECT_THROW(o::DiscreteDistribution({{"a", 1.0, INFINITY}}), DomainError);
    EXPECT_NO_THROW(o::DiscreteDistribution({{"a", 0.1, 1}, {"b", 0.2, 1}, {"c", 0.7, 1}}));
}

TEST(Distribution, CsvParsing) {
    std::istringstream ok("label,mass,cond_mean\nx,0.25,2\ny,0.75,-1\n");
    const auto d = o::read_distribution_csv(ok);
    ASSERT_EQ(d.size(), 2u);
    EXPECT_EQ(d.atoms()[1].label, "y");
    EXPECT_EQ(d.atoms()[1].cond_mean, -1.0);

    std::istringstream bad_header("name,mass,mean\nx,1,1\n");
    EXPECT_THROW(o::read_distribution_csv(bad_header), DomainError);
    std::istringstream bad_number("label,mass,cond_mean\nx,1,abc\n");
    EXPECT_THROW(o::read_distribution_csv(bad_number), DomainError);
    std::istringstream bad_fields("label,mass,cond_mean\nx,1\n");
    EXPECT_THROW(o::read_distribution_csv(bad_fields), DomainError);
}

TEST(Allocate, Examples) {
    const o::DiscreteDistribution negative({{"a", 0.5, -1}, {"b", 0.5, -2}});
    const auto none = o::greedy_allocate(negative, Probability(1.0));
    EXPECT_EQ(none.welfare, 0.0);
    EXPECT_EQ(std::count(none.treated.begin(), none.treated.end(), true), 0);

    const o::DiscreteDistribution positive({{"a", 0.25, 1}, {"b", 0.75, 2}});
    const auto all = o::greedy_allocate(positive, Probability(1.0));
    EXPECT_EQ(all.welfare, 0.25 * 1 + 0.75 * 2);

    const o::DiscreteDistribution single({{"a", 0.5, 1}, {"b", 0.5, 0}});
    EXPECT_EQ(o::brute_force_allocate(single, Probability(0.4)).welfare, 0.0);
    EXPECT_EQ(o::brute_force_allocate(single, Probability(0.5)).welfare, 0.5);
}

TEST(Allocate, TiesFollowInputOrder) {
    const o::DiscreteDistribution d({{"a", 0.25, 1}, {"b", 0.25, 1}, {"c", 0.5, 0.5}});
    const auto r = o::greedy_allocate(d, Probability(0.25));
    EXPECT_TRUE(r.treated[0]);
    EXPECT_FALSE(r.treated[1]);
}

TEST(Allocate, BruteForceLimit) {
    std::vector<o::Atom> atoms;
    for (int i = 0; i < 20; ++i) atoms.push_back({std::to_string(i), 1.0 / 32.0, 1.0});
    atoms.push_back({"rest", 12.0 / 32.0, 1.0});
    const o::DiscreteDistribution d(atoms);
    EXPECT_THROW(o::brute_force_allocate(d, Probability(0.5)), DomainError);
    atoms.pop_back();
    atoms.back().mass += 12.0 / 32.0;
    EXPECT_NO_THROW(o::brute_force_allocate(o::DiscreteDistribution(atoms), Probability(0.5)));
}

TEST(Allocate, GreedyVersusBruteForce) {
    std::mt19937_64 rng(77);
    std::uniform_int_distribution<int> size(1, 12), budget(0, 64);
    for (int trial = 0; trial < 500; ++trial) {
        const auto dist = dyadic_instance(rng, static_cast<std::size_t>(size(rng)));
        const Probability alpha(budget(rng) / 64.0);
        const auto greedy = o::greedy_allocate(dist, alpha);
        const auto best = o::brute_force_allocate(dist, alpha);
        EXPECT_LE(greedy.treated_mass, alpha.value());
        EXPECT_LE(best.treated_mass, alpha.value());
        EXPECT_LE(greedy.welfare, best.welfare);

        double max_mean = 0, max_mass = 0;
        for (const auto& a : dist.atoms()) {
            max_mean = std::max(max_mean, a.cond_mean);
            max_mass = std::max(max_mass, a.mass);
        }
        EXPECT_LE(best.welfare - greedy.welfare, max_mean * max_mass) << trial;

        bool exhausted = true;
        for (std::size_t i = 0; i < dist.size(); ++i) {
            if (dist.atoms()[i].cond_mean > 0 && !greedy.treated[i]) exhausted = false;
        }
        if (greedy.treated_mass == alpha.value() || exhausted) {
            EXPECT_EQ(greedy.welfare, best.welfare) << trial;
        }
    }
}

#pragma once

// Verification oracles that share no code path with the closed forms beyond
// the Gaussian quantile: Monte Carlo policy simulation for both welfare models,
// rejection sampling for truncated normal means, and exact/brute-force
// allocation on discrete feature distributions.

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "welfare/gaussian.hpp"
#include "welfare/linear_model.hpp"
#include "welfare/probit_model.hpp"

namespace welfare::oracle {

inline constexpr std::uint64_t kMinSamples = 10'000;
inline constexpr std::uint64_t kBlockSize = 1u << 16;

struct SimConfig {
    std::uint64_t samples;
    std::uint64_t seed;
    unsigned threads = 0;  // 0 = hardware concurrency; never affects the result
};

struct Estimate {
    double mean;
    double std_error;  // sample standard deviation / sqrt(samples)
    std::uint64_t samples;

    bool operator==(const Estimate&) const = default;
};

/// Samples z_s, z_t ~ N(0, 1), w = gamma_s |beta| z_s + gamma_t |beta| z_t + mu and
/// averages w * 1{z_s >= Phi^{-1}(1 - alpha)}. Requires 0 < alpha < 1/2.
Estimate simulate_linear_value(const LinearParams& p, Probability alpha, const SimConfig& cfg);

/// Averages 1{gamma_s z_s + gamma_t z_t + Phi^{-1}(b) > 0} * 1{z_s >= Phi^{-1}(1 - alpha)}.
/// Requires 0 < alpha <= 1.
Estimate simulate_probit_value(const ProbitParams& p, Probability alpha, const SimConfig& cfg);

/// Mean of z ~ N(mu, sigma^2) conditioned on z > a, by rejection from cfg.samples
/// proposals. Estimate::samples is the number accepted.
Estimate simulate_truncated_mean(double mu, double sigma, double a, const SimConfig& cfg);

struct Atom {
    std::string label;
    double mass;
    double cond_mean;  // E[w | x_s = label]
};

/// Finite feature distribution: distinct labels, positive masses summing to 1
/// within 1e-12, finite conditional means.
class DiscreteDistribution {
public:
    explicit DiscreteDistribution(std::vector<Atom> atoms);

    [[nodiscard]] const std::vector<Atom>& atoms() const noexcept { return atoms_; }
    [[nodiscard]] std::size_t size() const noexcept { return atoms_.size(); }

private:
    std::vector<Atom> atoms_;
};

/// Reads `label,mass,cond_mean` rows after a header line of exactly that text.
DiscreteDistribution read_distribution_csv(std::istream& in);

struct Allocation {
    std::vector<bool> treated;  // indexed like the distribution's atoms
    double welfare;             // sum of mass * cond_mean over treated atoms
    double treated_mass;
};

/// Treats atoms in descending conditional mean (ties in input order) while the
/// treated mass stays <= alpha and the conditional mean is positive; stops at the
/// first atom that does not fit.
Allocation greedy_allocate(const DiscreteDistribution& dist, Probability alpha);

inline constexpr std::size_t kMaxBruteForceAtoms = 20;

/// Best deterministic assignment by enumerating all 2^n subsets with treated
/// mass <= alpha. Throws DomainError for more than kMaxBruteForceAtoms atoms.
Allocation brute_force_allocate(const DiscreteDistribution& dist, Probability alpha);

}  // namespace welfare::oracle

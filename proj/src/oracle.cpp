#include "welfare/oracle.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <istream>
#include <numeric>
#include <set>
#include <sstream>
#include <thread>

#include "welfare/errors.hpp"
#include "welfare/rng.hpp"

namespace welfare::oracle {
namespace {

// Running mean and sum of squared deviations (Welford).
struct Moments {
    std::uint64_t n = 0;
    double mean = 0.0;
    double m2 = 0.0;

    void add(double x) {
        ++n;
        const double delta = x - mean;
        mean += delta / static_cast<double>(n);
        m2 += delta * (x - mean);
    }
};

Moments merge(const Moments& a, const Moments& b) {
    if (a.n == 0) return b;
    if (b.n == 0) return a;
    Moments out;
    out.n = a.n + b.n;
    const double na = static_cast<double>(a.n);
    const double nb = static_cast<double>(b.n);
    const double delta = b.mean - a.mean;
    out.mean = a.mean + delta * nb / static_cast<double>(out.n);
    out.m2 = a.m2 + b.m2 + delta * delta * na * nb / static_cast<double>(out.n);
    return out;
}

// Pairwise merge in block-index order, independent of which thread ran which block.
Moments merge_range(const std::vector<Moments>& blocks, std::size_t lo, std::size_t hi) {
    if (hi - lo == 1) return blocks[lo];
    const std::size_t mid = lo + (hi - lo) / 2;
    return merge(merge_range(blocks, lo, mid), merge_range(blocks, mid, hi));
}

void check_config(const SimConfig& cfg) {
    if (cfg.samples < kMinSamples) {
        throw DomainError("simulation: samples must be >= 10000, got " +
                          std::to_string(cfg.samples));
    }
}

// Runs `kernel(rng, count, moments)` over consecutive sample blocks. Block b uses
// stream (seed, b) and has kBlockSize samples except possibly the last.
template <typename Kernel>
Moments run_blocks(const SimConfig& cfg, Kernel kernel) {
    check_config(cfg);
    const std::uint64_t block_count = (cfg.samples + kBlockSize - 1) / kBlockSize;
    std::vector<Moments> blocks(block_count);
    std::atomic<std::uint64_t> next_block{0};

    auto worker = [&] {
        for (std::uint64_t b = next_block++; b < block_count; b = next_block++) {
            const std::uint64_t begin = b * kBlockSize;
            const std::uint64_t count = std::min(kBlockSize, cfg.samples - begin);
            Xoshiro256ss rng = Xoshiro256ss::stream(cfg.seed, b);
            Moments m;
            kernel(rng, count, m);
            blocks[b] = m;
        }
    };

    unsigned threads = cfg.threads == 0 ? std::thread::hardware_concurrency() : cfg.threads;
    threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(block_count)));
    if (threads == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(threads);
        for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    }
    return merge_range(blocks, 0, blocks.size());
}

Estimate to_estimate(const Moments& m) {
    if (m.n < 2) {
        throw NumericalError("simulation: fewer than two usable samples");
    }
    const double n = static_cast<double>(m.n);
    const double variance = m.m2 / (n - 1.0);
    return {m.mean, std::sqrt(variance / n), m.n};
}

}  // namespace

Estimate simulate_linear_value(const LinearParams& p, Probability alpha, const SimConfig& cfg) {
    validate(p);
    const double a = alpha.value();
    if (!(a > 0.0 && a < 0.5)) {
        throw DomainError("simulate_linear_value: alpha must lie in (0, 1/2)");
    }
    const double q = gaussian::upper_quantile(a);
    const double observed = p.gamma_s * p.beta_norm;
    const double unobserved = std::sqrt((1.0 - p.gamma_s) * (1.0 + p.gamma_s)) * p.beta_norm;
    const double mu = p.mu;

    const Moments m = run_blocks(cfg, [=](Xoshiro256ss& rng, std::uint64_t count, Moments& acc) {
        for (std::uint64_t i = 0; i < count; ++i) {
            const double zs = gaussian::quantile(rng.uniform_open());
            const double u_t = rng.uniform_open();
            double x = 0.0;
            if (zs >= q) {
                const double zt = gaussian::quantile(u_t);
                x = observed * zs + unobserved * zt + mu;
            }
            acc.add(x);
        }
    });
    return to_estimate(m);
}

Estimate simulate_probit_value(const ProbitParams& p, Probability alpha, const SimConfig& cfg) {
    validate(p);
    const double a = alpha.value();
    if (!(a > 0.0)) {
        throw DomainError("simulate_probit_value: alpha must be > 0");
    }
    // alpha = 1 treats everyone; -inf admits every draw.
    const double q = a >= 1.0 ? -std::numeric_limits<double>::infinity()
                              : gaussian::upper_quantile(a);
    const double gs = p.gamma_s;
    const double gt = std::sqrt((1.0 - gs) * (1.0 + gs));
    const double m = gaussian::quantile(p.base_rate);

    const Moments moments =
        run_blocks(cfg, [=](Xoshiro256ss& rng, std::uint64_t count, Moments& acc) {
            for (std::uint64_t i = 0; i < count; ++i) {
                const double zs = gaussian::quantile(rng.uniform_open());
                const double u_t = rng.uniform_open();
                double x = 0.0;
                if (zs >= q) {
                    const double zt = gaussian::quantile(u_t);
                    x = (gs * zs + gt * zt + m > 0.0) ? 1.0 : 0.0;
                }
                acc.add(x);
            }
        });
    return to_estimate(moments);
}

Estimate simulate_truncated_mean(double mu, double sigma, double a, const SimConfig& cfg) {
    if (!std::isfinite(mu) || !std::isfinite(sigma) || !(sigma > 0.0) || std::isnan(a)) {
        throw DomainError("simulate_truncated_mean: need finite mu, sigma > 0 and non-NaN a");
    }
    const Moments m = run_blocks(cfg, [=](Xoshiro256ss& rng, std::uint64_t count, Moments& acc) {
        for (std::uint64_t i = 0; i < count; ++i) {
            const double z = mu + sigma * gaussian::quantile(rng.uniform_open());
            if (z > a) acc.add(z);
        }
    });
    return to_estimate(m);
}

DiscreteDistribution::DiscreteDistribution(std::vector<Atom> atoms) : atoms_(std::move(atoms)) {
    if (atoms_.empty()) throw DomainError("distribution: no atoms");
    std::set<std::string> labels;
    double total = 0.0;
    for (const Atom& atom : atoms_) {
        if (!labels.insert(atom.label).second) {
            throw DomainError("distribution: duplicate label '" + atom.label + "'");
        }
        if (!std::isfinite(atom.mass) || !(atom.mass > 0.0)) {
            throw DomainError("distribution: mass of '" + atom.label + "' must be > 0");
        }
        if (!std::isfinite(atom.cond_mean)) {
            throw DomainError("distribution: cond_mean of '" + atom.label + "' must be finite");
        }
        total += atom.mass;
    }
    if (std::abs(total - 1.0) > 1e-12) {
        std::ostringstream msg;
        msg.precision(17);
        msg << "distribution: masses sum to " << total << ", not 1";
        throw DomainError(msg.str());
    }
}

namespace {

double parse_number(const std::string& field, std::size_t line, const char* column) {
    std::size_t used = 0;
    double value = 0.0;
    try {
        value = std::stod(field, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used == 0 || used != field.size()) {
        throw DomainError("distribution csv line " + std::to_string(line) + ": malformed " +
                          column + " '" + field + "'");
    }
    return value;
}

std::string strip(std::string s) {
    while (!s.empty() && (s.back() == '\r' || s.back() == ' ')) s.pop_back();
    std::size_t start = 0;
    while (start < s.size() && s[start] == ' ') ++start;
    return s.substr(start);
}

}  // namespace

DiscreteDistribution read_distribution_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || strip(line) != "label,mass,cond_mean") {
        throw DomainError("distribution csv: expected header 'label,mass,cond_mean'");
    }
    std::vector<Atom> atoms;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        line = strip(line);
        if (line.empty()) continue;
        std::vector<std::string> fields;
        std::stringstream row(line);
        std::string field;
        while (std::getline(row, field, ',')) fields.push_back(strip(field));
        if (fields.size() != 3) {
            throw DomainError("distribution csv line " + std::to_string(line_no) +
                              ": expected 3 fields");
        }
        atoms.push_back({fields[0], parse_number(fields[1], line_no, "mass"),
                         parse_number(fields[2], line_no, "cond_mean")});
    }
    return DiscreteDistribution(std::move(atoms));
}

namespace {

// Both allocators sum in input order so equal assignments compare bitwise equal.
Allocation summarize(const DiscreteDistribution& dist, std::vector<bool> treated) {
    double welfare = 0.0;
    double mass = 0.0;
    const auto& atoms = dist.atoms();
    for (std::size_t i = 0; i < atoms.size(); ++i) {
        if (treated[i]) {
            welfare += atoms[i].mass * atoms[i].cond_mean;
            mass += atoms[i].mass;
        }
    }
    return {std::move(treated), welfare, mass};
}

double treated_mass(const DiscreteDistribution& dist, const std::vector<bool>& treated) {
    double mass = 0.0;
    for (std::size_t i = 0; i < dist.size(); ++i) {
        if (treated[i]) mass += dist.atoms()[i].mass;
    }
    return mass;
}

}  // namespace

Allocation greedy_allocate(const DiscreteDistribution& dist, Probability alpha) {
    const auto& atoms = dist.atoms();
    std::vector<std::size_t> order(atoms.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t lhs, std::size_t rhs) {
        return atoms[lhs].cond_mean > atoms[rhs].cond_mean;
    });

    std::vector<bool> treated(atoms.size(), false);
    for (std::size_t idx : order) {
        if (!(atoms[idx].cond_mean > 0.0)) break;
        treated[idx] = true;
        if (treated_mass(dist, treated) > alpha.value()) {
            treated[idx] = false;
            break;
        }
    }
    return summarize(dist, std::move(treated));
}

Allocation brute_force_allocate(const DiscreteDistribution& dist, Probability alpha) {
    const std::size_t n = dist.size();
    if (n > kMaxBruteForceAtoms) {
        throw DomainError("brute_force_allocate: " + std::to_string(n) +
                          " atoms exceeds the limit of 20");
    }
    const auto& atoms = dist.atoms();
    std::uint32_t best_mask = 0;
    double best_welfare = 0.0;
    for (std::uint32_t mask = 1; mask < (std::uint32_t{1} << n); ++mask) {
        double mass = 0.0;
        double welfare = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            if (mask & (std::uint32_t{1} << i)) {
                welfare += atoms[i].mass * atoms[i].cond_mean;
                mass += atoms[i].mass;
            }
        }
        if (mass <= alpha.value() && welfare > best_welfare) {
            best_welfare = welfare;
            best_mask = mask;
        }
    }
    std::vector<bool> treated(n);
    for (std::size_t i = 0; i < n; ++i) treated[i] = (best_mask >> i) & 1u;
    return summarize(dist, std::move(treated));
}

}  // namespace welfare::oracle

#include "welfare/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <ostream>
#include <sstream>
#include <utility>
#include <variant>

#include <CLI11.hpp>

#include "welfare/errors.hpp"
#include "welfare/json_writer.hpp"
#include "welfare/levers_grid.hpp"
#include "welfare/linear_model.hpp"
#include "welfare/oracle.hpp"
#include "welfare/probit_model.hpp"

namespace welfare::cli {
namespace {

enum class OutputFormat { human, json };

// Ordered key/value output, rendered either as "key: value" lines or one JSON object.
class Report {
public:
    using Value = std::variant<double, std::uint64_t, bool, std::string, std::vector<std::string>>;

    Report& add(std::string key, Value v) {
        rows_.emplace_back(std::move(key), std::move(v));
        return *this;
    }

    void print(std::ostream& out, OutputFormat format) const {
        if (format == OutputFormat::json) {
            JsonWriter w(out);
            w.begin_object();
            for (const auto& [key, v] : rows_) {
                w.key(key);
                std::visit([&](const auto& x) { write_json(w, x); }, v);
            }
            w.end_object();
            out << '\n';
            return;
        }
        for (const auto& [key, v] : rows_) {
            out << key << ": " << std::visit([](const auto& x) { return human(x); }, v) << '\n';
        }
    }

private:
    static void write_json(JsonWriter& w, double x) { w.value(x); }
    static void write_json(JsonWriter& w, std::uint64_t x) { w.value(x); }
    static void write_json(JsonWriter& w, bool x) { w.value(x); }
    static void write_json(JsonWriter& w, const std::string& x) { w.value(x); }
    static void write_json(JsonWriter& w, const std::vector<std::string>& xs) {
        w.begin_array();
        for (const auto& x : xs) w.value(x);
        w.end_array();
    }

    static std::string human(double x) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.6g", x);
        return buf;
    }
    static std::string human(std::uint64_t x) { return std::to_string(x); }
    static std::string human(bool x) { return x ? "true" : "false"; }
    static std::string human(const std::string& x) { return x; }
    static std::string human(const std::vector<std::string>& xs) {
        std::string s = "[";
        for (std::size_t i = 0; i < xs.size(); ++i) s += (i ? ", " : "") + xs[i];
        return s + "]";
    }

    std::vector<std::pair<std::string, Value>> rows_;
};

OutputFormat parse_output_format(const std::string& s) {
    if (s == "human") return OutputFormat::human;
    if (s == "json") return OutputFormat::json;
    throw DomainError("--format must be human or json, got '" + s + "'");
}

// Model selection and parameters shared by value, par, bounds and verify.
struct ModelArgs {
    std::string model;
    double mu = 0.0;
    double beta_norm = 0.0;
    double base_rate = 0.0;
    double gamma_s = 0.0;
    double alpha = 0.0;
    CLI::Option* mu_opt = nullptr;
    CLI::Option* beta_opt = nullptr;
    CLI::Option* base_opt = nullptr;

    void attach(CLI::App& app) {
        app.add_option("--model", model, "linear or probit")->required();
        mu_opt = app.add_option("--mu", mu, "mean improvement (linear)");
        beta_opt = app.add_option("--beta-norm", beta_norm, "coefficient norm (linear)");
        base_opt = app.add_option("--base-rate", base_rate, "Pr[w = 1] (probit)");
        app.add_option("--gamma-s", gamma_s, "prediction level in [0, 1]")->required();
        app.add_option("--alpha", alpha, "access level")->required();
    }

    [[nodiscard]] grid::Model resolve() const {
        const grid::Model m = grid::parse_model(model);
        if (m == grid::Model::linear) {
            if (base_opt->count()) throw DomainError("--base-rate is only valid with --model probit");
            if (!mu_opt->count()) throw DomainError("--model linear requires --mu");
            if (!beta_opt->count()) throw DomainError("--model linear requires --beta-norm");
        } else {
            if (mu_opt->count()) throw DomainError("--mu is only valid with --model linear");
            if (beta_opt->count()) throw DomainError("--beta-norm is only valid with --model linear");
            if (!base_opt->count()) throw DomainError("--model probit requires --base-rate");
        }
        return m;
    }

    [[nodiscard]] LinearParams linear() const { return {mu, beta_norm, gamma_s}; }
    [[nodiscard]] ProbitParams probit() const { return {base_rate, gamma_s}; }
};

struct DeltaArgs {
    double delta_alpha = 0.0;
    double delta_r2 = 0.0;

    void attach(CLI::App& app) {
        app.add_option("--delta-alpha", delta_alpha, "access increment")->required();
        app.add_option("--delta-r2", delta_r2, "prediction increment")->required();
    }
    [[nodiscard]] LeverDelta get() const { return {delta_alpha, delta_r2}; }
};

Report cmd_value(const ModelArgs& m) {
    const grid::Model model = m.resolve();
    const Probability alpha(m.alpha);
    const double v = model == grid::Model::linear ? linear::value(m.linear(), alpha)
                                                  : probit::value(m.probit(), alpha);
    return Report().add("value", v);
}

double exact_par(grid::Model model, const ModelArgs& m, const LeverDelta& d) {
    const Probability alpha(m.alpha);
    return model == grid::Model::linear ? linear::par_exact(m.linear(), alpha, d)
                                        : probit::par_exact(m.probit(), alpha, d);
}

Report cmd_par(const ModelArgs& m, const DeltaArgs& d) {
    const grid::Model model = m.resolve();
    return Report().add("par", exact_par(model, m, d.get()));
}

Report cmd_bounds(const ModelArgs& m, const DeltaArgs& d, const CLI::Option* eps_opt, double eps,
                  double smallness) {
    const grid::Model model = m.resolve();
    const Probability alpha(m.alpha);
    Report r;
    BoundPair b{};
    if (model == grid::Model::linear) {
        if (eps_opt->count()) throw DomainError("--eps is only valid with --model probit");
        b = linear::par_bounds(m.linear(), alpha, d.get());
    } else {
        b = probit::par_bounds(m.probit(), alpha, d.get(), probit::BoundsConfig{eps, smallness});
    }
    const double par = exact_par(model, m, d.get());
    r.add("lower", b.lower).add("upper", b.upper).add("par", par).add("contained", b.contains(par));
    if (model == grid::Model::probit) {
        const auto diag =
            probit::bounds_diagnostics(m.probit(), alpha, d.get(), probit::BoundsConfig{eps, smallness});
        r.add("access_regime", diag.access_regime)
            .add("argument_slack", diag.argument_slack)
            .add("density_slack", diag.density_slack);
    }
    return r;
}

struct VerifyOutcome {
    Report report;
    bool pass;
};

VerifyOutcome cmd_verify(const ModelArgs& m, std::uint64_t samples, std::uint64_t seed,
                         unsigned threads) {
    const grid::Model model = m.resolve();
    const Probability alpha(m.alpha);
    const oracle::SimConfig cfg{samples, seed, threads};
    double closed = 0.0;
    oracle::Estimate est{};
    if (model == grid::Model::linear) {
        closed = linear::value(m.linear(), alpha);
        est = oracle::simulate_linear_value(m.linear(), alpha, cfg);
    } else {
        closed = probit::value(m.probit(), alpha);
        est = oracle::simulate_probit_value(m.probit(), alpha, cfg);
    }
    const double diff = est.mean - closed;
    double z = 0.0;
    if (est.std_error > 0.0) {
        z = diff / est.std_error;
    } else if (diff != 0.0) {
        z = std::copysign(std::numeric_limits<double>::infinity(), diff);
    }
    const bool pass = std::abs(z) <= 4.0;
    Report r;
    r.add("closed_form", closed)
        .add("mc_mean", est.mean)
        .add("mc_std_error", est.std_error)
        .add("samples", est.samples)
        .add("z", z)
        .add("pass", pass);
    return {std::move(r), pass};
}

// Flags that override fields of the grid spec; only options actually given apply.
struct GridArgs {
    std::string spec_path;
    std::string model;
    std::string format;
    std::string out_path;
    unsigned threads = 0;
    grid::GridSpec s;  // scratch for flag values
    std::string alpha_spacing;
    double cost_ratio = 0.0;

    CLI::Option* model_opt = nullptr;
    std::vector<std::pair<CLI::Option*, std::function<void(grid::GridSpec&)>>> overrides;

    template <typename T, typename Set>
    void flag(CLI::App& app, const std::string& name, T& store, const std::string& help, Set set) {
        CLI::Option* opt = app.add_option(name, store, help);
        overrides.emplace_back(opt, [&store, set](grid::GridSpec& spec) { set(spec, store); });
    }

    void attach(CLI::App& app) {
        app.add_option("--spec", spec_path, "JSON grid spec file");
        model_opt = app.add_option("--model", model, "linear or probit");
        app.add_option("--format", format, "csv or json")->required();
        app.add_option("--out", out_path, "output path (default: stdout)");
        app.add_option("--threads", threads, "worker threads (0 = all cores)");
        flag(app, "--mu", s.mu, "mean improvement (linear)",
             [](grid::GridSpec& g, double v) { g.mu = v; });
        flag(app, "--beta-norm", s.beta_norm, "coefficient norm (linear)",
             [](grid::GridSpec& g, double v) { g.beta_norm = v; });
        flag(app, "--base-rate", s.base_rate, "Pr[w = 1] (probit)",
             [](grid::GridSpec& g, double v) { g.base_rate = v; });
        flag(app, "--delta-alpha", s.deltas.delta_alpha, "access increment",
             [](grid::GridSpec& g, double v) { g.deltas.delta_alpha = v; });
        flag(app, "--delta-r2", s.deltas.delta_r2, "prediction increment",
             [](grid::GridSpec& g, double v) { g.deltas.delta_r2 = v; });
        flag(app, "--alpha-min", s.alpha.lo, "smallest alpha",
             [](grid::GridSpec& g, double v) { g.alpha.lo = v; });
        flag(app, "--alpha-max", s.alpha.hi, "largest alpha",
             [](grid::GridSpec& g, double v) { g.alpha.hi = v; });
        flag(app, "--alpha-count", s.alpha.count, "alpha cells",
             [](grid::GridSpec& g, std::size_t v) { g.alpha.count = v; });
        flag(app, "--alpha-spacing", alpha_spacing, "log or linear",
             [](grid::GridSpec& g, const std::string& v) { g.alpha.spacing = grid::parse_spacing(v); });
        flag(app, "--gamma-min", s.gamma_s.lo, "smallest gamma_s",
             [](grid::GridSpec& g, double v) { g.gamma_s.lo = v; });
        flag(app, "--gamma-max", s.gamma_s.hi, "largest gamma_s",
             [](grid::GridSpec& g, double v) { g.gamma_s.hi = v; });
        flag(app, "--gamma-count", s.gamma_s.count, "gamma_s cells",
             [](grid::GridSpec& g, std::size_t v) { g.gamma_s.count = v; });
        flag(app, "--cost-access", s.costs.cost_access, "marginal cost of access",
             [](grid::GridSpec& g, double v) { g.costs.cost_access = v; });
        flag(app, "--cost-prediction", s.costs.cost_prediction, "marginal cost of prediction",
             [](grid::GridSpec& g, double v) { g.costs.cost_prediction = v; });
        flag(app, "--cost-ratio", cost_ratio, "cost_prediction / cost_access (sets both)",
             [](grid::GridSpec& g, double v) { g.costs = {1.0, v}; });
        flag(app, "--clip-lo", s.clip_lo, "lower clip",
             [](grid::GridSpec& g, double v) { g.clip_lo = v; });
        flag(app, "--clip-hi", s.clip_hi, "upper clip",
             [](grid::GridSpec& g, double v) { g.clip_hi = v; });
    }

    [[nodiscard]] bool given(const std::string& name) const {
        return std::any_of(overrides.begin(), overrides.end(), [&](const auto& o) {
            return o.first->get_name() == name && o.first->count() > 0;
        });
    }

    [[nodiscard]] grid::GridSpec build() const {
        grid::GridSpec spec;
        if (!spec_path.empty()) {
            std::ifstream in(spec_path);
            if (!in) throw DomainError("cannot open spec file '" + spec_path + "'");
            spec = grid::spec_from_json(in);
            if (model_opt->count() && grid::parse_model(model) != spec.model) {
                throw DomainError("--model disagrees with the model in '" + spec_path + "'");
            }
        } else {
            const grid::Model m = model_opt->count() ? grid::parse_model(model) : grid::Model::linear;
            spec = m == grid::Model::linear ? grid::linear_figure_spec() : grid::probit_figure_spec();
        }
        if (spec.model == grid::Model::linear && given("--base-rate")) {
            throw DomainError("--base-rate is only valid with --model probit");
        }
        if (spec.model == grid::Model::probit && (given("--mu") || given("--beta-norm"))) {
            throw DomainError("--mu and --beta-norm are only valid with --model linear");
        }
        if (given("--cost-ratio") && (given("--cost-access") || given("--cost-prediction"))) {
            throw DomainError("--cost-ratio cannot be combined with --cost-access/--cost-prediction");
        }
        for (const auto& [opt, set] : overrides) {
            if (opt->count()) set(spec);
        }
        grid::validate(spec);
        return spec;
    }
};

void cmd_grid(const GridArgs& a, std::ostream& out) {
    const grid::Format format = grid::parse_format(a.format);
    const grid::GridSpec spec = a.build();
    grid::GridResult result = grid::sweep_grid(spec, a.threads);
    result.contour = grid::extract_indifference_contour(result);
    if (a.out_path.empty()) {
        grid::serialize_grid(result, format, out);
        return;
    }
    std::ofstream file(a.out_path, std::ios::binary);
    if (!file) throw DomainError("cannot open output file '" + a.out_path + "'");
    grid::serialize_grid(result, format, file);
    file.close();
    if (!file) throw std::runtime_error("failed writing '" + a.out_path + "'");
}

void add_allocation(Report& r, const std::string& prefix, const oracle::DiscreteDistribution& dist,
                    const oracle::Allocation& a) {
    std::vector<std::string> labels;
    for (std::size_t i = 0; i < dist.size(); ++i) {
        if (a.treated[i]) labels.push_back(dist.atoms()[i].label);
    }
    r.add(prefix + "_treated", labels)
        .add(prefix + "_welfare", a.welfare)
        .add(prefix + "_treated_mass", a.treated_mass);
}

Report cmd_allocate(const std::string& path, double alpha_value, bool brute_force) {
    std::ifstream in(path);
    if (!in) throw DomainError("cannot open distribution file '" + path + "'");
    const oracle::DiscreteDistribution dist = oracle::read_distribution_csv(in);
    const Probability alpha(alpha_value);
    Report r;
    add_allocation(r, "greedy", dist, oracle::greedy_allocate(dist, alpha));
    if (brute_force) add_allocation(r, "optimal", dist, oracle::brute_force_allocate(dist, alpha));
    return r;
}

std::string one_line(std::string s) {
    std::replace(s.begin(), s.end(), '\n', ' ');
    while (!s.empty() && s.back() == ' ') s.pop_back();
    return s;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Prediction versus access trade-offs in welfare targeting", "welfare"};
    app.require_subcommand(1);

    std::string format = "human";
    auto add_format = [&](CLI::App* sub) {
        sub->add_option("--format", format, "human or json");
    };

    ModelArgs model_args;
    DeltaArgs delta_args;

    CLI::App* value = app.add_subcommand("value", "optimal policy value");
    model_args.attach(*value);
    add_format(value);

    ModelArgs par_model;
    CLI::App* par = app.add_subcommand("par", "exact prediction-access ratio");
    par_model.attach(*par);
    delta_args.attach(*par);
    add_format(par);

    ModelArgs bounds_model;
    DeltaArgs bounds_delta;
    double eps = probit::BoundsConfig{}.eps;
    double smallness = probit::BoundsConfig{}.smallness;
    CLI::App* bounds = app.add_subcommand("bounds", "analytic envelope and containment of the exact ratio");
    bounds_model.attach(*bounds);
    bounds_delta.attach(*bounds);
    CLI::Option* eps_opt = bounds->add_option("--eps", eps, "slack parameter (probit)");
    bounds->add_option("--smallness", smallness, "threshold on alpha and delta_r2 (probit)");
    add_format(bounds);

    GridArgs grid_args;
    CLI::App* grid_cmd = app.add_subcommand("grid", "cost-benefit heatmap and indifference contour");
    grid_args.attach(*grid_cmd);

    ModelArgs verify_model;
    std::uint64_t samples = 0;
    std::uint64_t seed = 0;
    unsigned threads = 0;
    CLI::App* verify = app.add_subcommand("verify", "closed form versus Monte Carlo");
    verify_model.attach(*verify);
    verify->add_option("--samples", samples, "Monte Carlo draws")->required();
    verify->add_option("--seed", seed, "random seed")->required();
    verify->add_option("--threads", threads, "worker threads (0 = all cores)");
    add_format(verify);

    std::string dist_path;
    double alloc_alpha = 0.0;
    bool brute_force = false;
    CLI::App* allocate = app.add_subcommand("allocate", "budgeted allocation on a discrete distribution");
    allocate->add_option("--dist", dist_path, "CSV with header label,mass,cond_mean")->required();
    allocate->add_option("--alpha", alloc_alpha, "budget")->required();
    allocate->add_flag("--brute-force", brute_force, "also enumerate all subsets (<= 20 atoms)");
    add_format(allocate);

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << (app.get_subcommands().empty() ? app.help() : app.get_subcommands().front()->help());
        return kExitOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << one_line(e.what()) << '\n';
        return kExitUsage;
    }

    try {
        if (grid_cmd->parsed()) {
            cmd_grid(grid_args, out);
            return kExitOk;
        }
        const OutputFormat fmt = parse_output_format(format);
        if (value->parsed()) {
            cmd_value(model_args).print(out, fmt);
        } else if (par->parsed()) {
            cmd_par(par_model, delta_args).print(out, fmt);
        } else if (bounds->parsed()) {
            cmd_bounds(bounds_model, bounds_delta, eps_opt, eps, smallness).print(out, fmt);
        } else if (verify->parsed()) {
            VerifyOutcome v = cmd_verify(verify_model, samples, seed, threads);
            v.report.print(out, fmt);
            return v.pass ? kExitOk : kExitNumerical;
        } else if (allocate->parsed()) {
            cmd_allocate(dist_path, alloc_alpha, brute_force).print(out, fmt);
        }
        return kExitOk;
    } catch (const DomainError& e) {
        err << "error: " << one_line(e.what()) << '\n';
        return kExitUsage;
    } catch (const NumericalError& e) {
        err << "numerical failure: " << one_line(e.what()) << '\n';
        return kExitNumerical;
    } catch (const std::exception& e) {
        err << "internal error: " << one_line(e.what()) << '\n';
        return kExitNumerical;
    }
}

}  // namespace welfare::cli

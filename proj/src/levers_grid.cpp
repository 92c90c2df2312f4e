#include "welfare/levers_grid.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <istream>
#include <ostream>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "welfare/errors.hpp"
#include "welfare/json_writer.hpp"

namespace welfare::grid {

using nlohmann::json;

void validate(const CostModel& cm) {
    if (!std::isfinite(cm.cost_access) || !(cm.cost_access > 0.0)) {
        throw DomainError("cost model: cost_access must be finite and > 0");
    }
    if (!std::isfinite(cm.cost_prediction) || !(cm.cost_prediction > 0.0)) {
        throw DomainError("cost model: cost_prediction must be finite and > 0");
    }
}

double cost_benefit(double par, const CostModel& cm) {
    validate(cm);
    if (!std::isfinite(par) || !(par > 0.0)) {
        throw DomainError("cost_benefit: par must be finite and > 0");
    }
    return par * cm.cost_prediction / cm.cost_access;
}

std::string to_string(Model m) { return m == Model::linear ? "linear" : "probit"; }
std::string to_string(Spacing s) { return s == Spacing::log ? "log" : "linear"; }

std::string to_string(Status s) {
    switch (s) {
        case Status::ok: return "ok";
        case Status::skipped_degenerate: return "skipped-degenerate";
        case Status::skipped_regime: return "skipped-regime";
    }
    return "?";
}

Model parse_model(const std::string& s) {
    if (s == "linear") return Model::linear;
    if (s == "probit") return Model::probit;
    throw DomainError("unknown model '" + s + "' (expected linear or probit)");
}

Spacing parse_spacing(const std::string& s) {
    if (s == "log") return Spacing::log;
    if (s == "linear") return Spacing::linear;
    throw DomainError("unknown spacing '" + s + "' (expected log or linear)");
}

Status parse_status(const std::string& s) {
    if (s == "ok") return Status::ok;
    if (s == "skipped-degenerate") return Status::skipped_degenerate;
    if (s == "skipped-regime") return Status::skipped_regime;
    throw DomainError("unknown cell status '" + s + "'");
}

Format parse_format(const std::string& s) {
    if (s == "csv") return Format::csv;
    if (s == "json") return Format::json;
    throw DomainError("unknown format '" + s + "' (expected csv or json)");
}

std::vector<double> Axis::points() const {
    std::vector<double> out(count);
    if (count == 0) return out;
    out.front() = lo;
    if (count == 1) return out;
    const double steps = static_cast<double>(count - 1);
    for (std::size_t i = 1; i + 1 < count; ++i) {
        const double t = static_cast<double>(i) / steps;
        out[i] = spacing == Spacing::log ? std::exp(std::log(lo) + t * (std::log(hi) - std::log(lo)))
                                         : lo + t * (hi - lo);
    }
    out.back() = hi;
    return out;
}

GridSpec linear_figure_spec() {
    GridSpec s;
    s.model = Model::linear;
    s.alpha = {0.001, 0.2, 60, Spacing::log};
    s.gamma_s = {0.01, 0.99, 50, Spacing::linear};
    s.deltas = {0.01, 0.01};
    return s;
}

GridSpec probit_figure_spec() {
    GridSpec s;
    s.model = Model::probit;
    s.alpha = {1e-4, 0.5, 60, Spacing::log};
    s.gamma_s = {0.01, 0.99, 50, Spacing::linear};
    s.deltas = {1e-3, 1e-3};
    return s;
}

namespace {

void validate_axis(const Axis& a, const char* name, double lo_excl, double hi_max, bool hi_excl) {
    const std::string n(name);
    if (!std::isfinite(a.lo) || !std::isfinite(a.hi) || !(a.lo < a.hi)) {
        throw DomainError("grid spec: " + n + " range needs finite lo < hi");
    }
    if (a.count < 2) throw DomainError("grid spec: " + n + " count must be >= 2");
    if (a.spacing == Spacing::log && !(a.lo > 0.0)) {
        throw DomainError("grid spec: " + n + " log spacing needs lo > 0");
    }
    if (std::isnan(lo_excl) ? a.lo < 0.0 : !(a.lo > lo_excl)) {
        throw DomainError("grid spec: " + n + " lo is outside the model's domain");
    }
    if (hi_excl ? !(a.hi < hi_max) : a.hi > hi_max) {
        throw DomainError("grid spec: " + n + " hi is outside the model's domain");
    }
}

}  // namespace

void validate(const GridSpec& spec) {
    if (spec.model == Model::linear) {
        validate(LinearParams{spec.mu, spec.beta_norm, 0.0});
        validate_axis(spec.alpha, "alpha", 0.0, 0.5, true);
    } else {
        validate(ProbitParams{spec.base_rate, 0.0});
        validate_axis(spec.alpha, "alpha", 0.0, 1.0, false);
    }
    validate_axis(spec.gamma_s, "gamma_s", std::nan(""), 1.0, false);
    validate(spec.deltas);
    validate(spec.costs);
    if (!std::isfinite(spec.clip_lo) || !std::isfinite(spec.clip_hi) ||
        !(spec.clip_lo < spec.clip_hi)) {
        throw DomainError("grid spec: clip range needs finite clip_lo < clip_hi");
    }
}

namespace {

Cell evaluate_cell(const GridSpec& spec, double alpha, double gamma_s) {
    Cell cell{alpha, gamma_s, std::nullopt, std::nullopt, std::nullopt, Status::ok};
    const LeverDelta& d = spec.deltas;
    const double alpha_cap = spec.model == Model::linear ? 0.5 : 1.0;
    const bool alpha_fits =
        spec.model == Model::linear ? alpha + d.delta_alpha < alpha_cap
                                    : alpha + d.delta_alpha <= alpha_cap;
    if (!alpha_fits || gamma_s + d.delta_r2 > 1.0) {
        cell.status = Status::skipped_regime;
        return cell;
    }

    double par = 0.0;
    try {
        if (spec.model == Model::linear) {
            par = linear::par_exact(LinearParams{spec.mu, spec.beta_norm, gamma_s},
                                    Probability(alpha), d);
        } else {
            par = probit::par_exact(ProbitParams{spec.base_rate, gamma_s}, Probability(alpha), d);
        }
    } catch (const PreconditionError&) {
        cell.status = Status::skipped_degenerate;
        return cell;
    } catch (const NumericalError&) {
        cell.status = Status::skipped_degenerate;
        return cell;
    }
    if (!std::isfinite(par) || !(par > 0.0)) {
        cell.status = Status::skipped_degenerate;
        return cell;
    }
    const double cb = cost_benefit(par, spec.costs);
    cell.par = par;
    cell.cost_benefit = cb;
    cell.cost_benefit_clipped = std::clamp(cb, spec.clip_lo, spec.clip_hi);
    return cell;
}

}  // namespace

GridResult sweep_grid(const GridSpec& spec, unsigned threads) {
    validate(spec);
    const std::vector<double> alphas = spec.alpha.points();
    const std::vector<double> gammas = spec.gamma_s.points();
    const std::size_t total = alphas.size() * gammas.size();

    GridResult result{spec, std::vector<Cell>(total), {}};
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < total; i = next++) {
            result.cells[i] = evaluate_cell(spec, alphas[i / gammas.size()], gammas[i % gammas.size()]);
        }
    };

    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, total));
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(threads);
        for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    }

    const bool any_ok = std::any_of(result.cells.begin(), result.cells.end(),
                                    [](const Cell& c) { return c.status == Status::ok; });
    if (!any_ok) {
        throw DomainError("grid spec: no cell can be evaluated (every cell is outside the "
                          "model's regime or degenerate)");
    }
    return result;
}

std::vector<ContourPoint> extract_indifference_contour(const GridResult& g) {
    std::vector<ContourPoint> contour;
    const std::size_t na = g.spec.alpha.count;
    const std::size_t ng = g.spec.gamma_s.count;
    if (na < 2 || ng < 2 || g.cells.size() != na * ng) return contour;

    for (std::size_t i = 0; i < na; ++i) {
        for (std::size_t j = 0; j < ng; ++j) {
            const Cell& c0 = g.at(i, j);
            if (c0.status != Status::ok) continue;
            const double f0 = *c0.cost_benefit - 1.0;
            if (f0 == 0.0) {
                contour.push_back({c0.alpha, c0.gamma_s});
                continue;
            }
            if (j + 1 == ng) continue;
            const Cell& c1 = g.at(i, j + 1);
            if (c1.status != Status::ok) continue;
            const double f1 = *c1.cost_benefit - 1.0;
            if ((f0 < 0.0) != (f1 < 0.0) && f1 != 0.0) {
                const double t = f0 / (f0 - f1);
                contour.push_back({c0.alpha, c0.gamma_s + t * (c1.gamma_s - c0.gamma_s)});
            }
        }
    }
    return contour;
}

GridResult clip(GridResult g) {
    for (Cell& c : g.cells) {
        if (c.cost_benefit_clipped) {
            c.cost_benefit_clipped = std::clamp(*c.cost_benefit_clipped, g.spec.clip_lo,
                                                g.spec.clip_hi);
        }
    }
    return g;
}

// ---- serialization ----------------------------------------------------------

namespace {

constexpr const char* kCsvHeader = "alpha,gamma_s,par,cost_benefit,cost_benefit_clipped,status";

std::string format_double(double x) { return format_double17(x); }

std::string format_optional(const std::optional<double>& x) {
    return x ? format_double(*x) : std::string();
}

double parse_double(const std::string& field, std::size_t line) {
    const char* begin = field.c_str();
    char* end = nullptr;
    const double x = std::strtod(begin, &end);
    if (field.empty() || end != begin + field.size()) {
        throw DomainError("grid csv line " + std::to_string(line) + ": malformed number '" +
                          field + "'");
    }
    return x;
}

std::optional<double> parse_optional(const std::string& field, std::size_t line) {
    if (field.empty()) return std::nullopt;
    return parse_double(field, line);
}

void write_axis(JsonWriter& w, const Axis& a) {
    w.begin_object()
        .field("lo", a.lo)
        .field("hi", a.hi)
        .field("count", std::uint64_t{a.count})
        .field("spacing", to_string(a.spacing))
        .end_object();
}

void write_spec(JsonWriter& w, const GridSpec& s) {
    w.begin_object().field("model", to_string(s.model)).key("params").begin_object();
    if (s.model == Model::linear) {
        w.field("mu", s.mu).field("beta_norm", s.beta_norm);
    } else {
        w.field("base_rate", s.base_rate);
    }
    w.end_object().key("alpha");
    write_axis(w, s.alpha);
    w.key("gamma_s");
    write_axis(w, s.gamma_s);
    w.key("deltas")
        .begin_object()
        .field("delta_alpha", s.deltas.delta_alpha)
        .field("delta_r2", s.deltas.delta_r2)
        .end_object();
    w.key("costs")
        .begin_object()
        .field("cost_access", s.costs.cost_access)
        .field("cost_prediction", s.costs.cost_prediction)
        .end_object();
    w.key("clip").begin_array().value(s.clip_lo).value(s.clip_hi).end_array();
    w.end_object();
}

void require_known_keys(const json& obj, std::initializer_list<const char*> keys,
                        const std::string& where) {
    if (!obj.is_object()) throw DomainError("grid spec: '" + where + "' must be an object");
    for (const auto& [key, unused] : obj.items()) {
        if (std::none_of(keys.begin(), keys.end(), [&](const char* k) { return key == k; })) {
            throw DomainError("grid spec: unknown key '" + key + "' in " + where);
        }
    }
}

template <typename T>
void read_if(const json& obj, const char* key, T& out, const std::string& where) {
    if (!obj.contains(key)) return;
    try {
        out = obj.at(key).get<T>();
    } catch (const json::exception&) {
        throw DomainError("grid spec: bad value for '" + std::string(key) + "' in " + where);
    }
}

void axis_from_json(const json& j, Axis& a, const std::string& where) {
    require_known_keys(j, {"lo", "hi", "count", "spacing"}, where);
    read_if(j, "lo", a.lo, where);
    read_if(j, "hi", a.hi, where);
    read_if(j, "count", a.count, where);
    if (j.contains("spacing")) {
        std::string s;
        read_if(j, "spacing", s, where);
        a.spacing = parse_spacing(s);
    }
}

GridSpec spec_from_json_value(const json& j) {
    require_known_keys(j, {"model", "params", "alpha", "gamma_s", "deltas", "costs", "clip"},
                       "spec");
    std::string model = "linear";
    read_if(j, "model", model, "spec");
    GridSpec s = parse_model(model) == Model::linear ? linear_figure_spec() : probit_figure_spec();

    if (j.contains("params")) {
        const json& p = j.at("params");
        if (s.model == Model::linear) {
            require_known_keys(p, {"mu", "beta_norm"}, "params (linear)");
            read_if(p, "mu", s.mu, "params");
            read_if(p, "beta_norm", s.beta_norm, "params");
        } else {
            require_known_keys(p, {"base_rate"}, "params (probit)");
            read_if(p, "base_rate", s.base_rate, "params");
        }
    }
    if (j.contains("alpha")) axis_from_json(j.at("alpha"), s.alpha, "alpha");
    if (j.contains("gamma_s")) axis_from_json(j.at("gamma_s"), s.gamma_s, "gamma_s");
    if (j.contains("deltas")) {
        require_known_keys(j.at("deltas"), {"delta_alpha", "delta_r2"}, "deltas");
        read_if(j.at("deltas"), "delta_alpha", s.deltas.delta_alpha, "deltas");
        read_if(j.at("deltas"), "delta_r2", s.deltas.delta_r2, "deltas");
    }
    if (j.contains("costs")) {
        require_known_keys(j.at("costs"), {"cost_access", "cost_prediction"}, "costs");
        read_if(j.at("costs"), "cost_access", s.costs.cost_access, "costs");
        read_if(j.at("costs"), "cost_prediction", s.costs.cost_prediction, "costs");
    }
    if (j.contains("clip")) {
        const json& c = j.at("clip");
        if (!c.is_array() || c.size() != 2 || !c[0].is_number() || !c[1].is_number()) {
            throw DomainError("grid spec: clip must be a two-element numeric array");
        }
        s.clip_lo = c[0].get<double>();
        s.clip_hi = c[1].get<double>();
    }
    validate(s);
    return s;
}

json parse_json_stream(std::istream& in, const char* what) {
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw DomainError(std::string(what) + ": invalid JSON (" + e.what() + ")");
    }
}

std::optional<double> optional_from_json(const json& j) {
    if (j.is_null()) return std::nullopt;
    return j.get<double>();
}

}  // namespace

std::string spec_to_json(const GridSpec& spec) {
    std::ostringstream out;
    JsonWriter w(out);
    write_spec(w, spec);
    return out.str();
}

GridSpec spec_from_json(std::istream& in) {
    return spec_from_json_value(parse_json_stream(in, "grid spec"));
}

void serialize_grid(const GridResult& g, Format format, std::ostream& out) {
    if (format == Format::csv) {
        out << kCsvHeader << '\n';
        for (const Cell& c : g.cells) {
            out << format_double(c.alpha) << ',' << format_double(c.gamma_s) << ','
                << format_optional(c.par) << ',' << format_optional(c.cost_benefit) << ','
                << format_optional(c.cost_benefit_clipped) << ',' << to_string(c.status) << '\n';
        }
    } else {
        JsonWriter w(out);
        w.begin_object().key("spec");
        write_spec(w, g.spec);
        w.key("cells").begin_array(true);
        for (const Cell& c : g.cells) {
            w.begin_object()
                .field("alpha", c.alpha)
                .field("gamma_s", c.gamma_s)
                .field("par", c.par)
                .field("cost_benefit", c.cost_benefit)
                .field("cost_benefit_clipped", c.cost_benefit_clipped)
                .field("status", to_string(c.status))
                .end_object();
        }
        w.end_array().key("contour").begin_array(true);
        for (const ContourPoint& p : g.contour) {
            w.begin_object().field("alpha", p.alpha).field("gamma_s", p.gamma_s).end_object();
        }
        w.end_array().end_object();
        out << '\n';
    }
    if (!out) throw std::runtime_error("serialize_grid: write failed");
}

std::vector<Cell> parse_grid_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || line != kCsvHeader) {
        throw DomainError(std::string("grid csv: expected header '") + kCsvHeader + "'");
    }
    std::vector<Cell> cells;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::vector<std::string> f;
        std::size_t start = 0;
        for (std::size_t pos; (pos = line.find(',', start)) != std::string::npos; start = pos + 1) {
            f.push_back(line.substr(start, pos - start));
        }
        f.push_back(line.substr(start));
        if (f.size() != 6) {
            throw DomainError("grid csv line " + std::to_string(line_no) + ": expected 6 fields");
        }
        cells.push_back({parse_double(f[0], line_no), parse_double(f[1], line_no),
                         parse_optional(f[2], line_no), parse_optional(f[3], line_no),
                         parse_optional(f[4], line_no), parse_status(f[5])});
    }
    return cells;
}

GridResult parse_grid_json(std::istream& in) {
    const json doc = parse_json_stream(in, "grid json");
    try {
        GridResult g{spec_from_json_value(doc.at("spec")), {}, {}};
        for (const json& c : doc.at("cells")) {
            g.cells.push_back({c.at("alpha").get<double>(), c.at("gamma_s").get<double>(),
                               optional_from_json(c.at("par")),
                               optional_from_json(c.at("cost_benefit")),
                               optional_from_json(c.at("cost_benefit_clipped")),
                               parse_status(c.at("status").get<std::string>())});
        }
        for (const json& p : doc.at("contour")) {
            g.contour.push_back({p.at("alpha").get<double>(), p.at("gamma_s").get<double>()});
        }
        return g;
    } catch (const json::exception& e) {
        throw DomainError(std::string("grid json: unexpected structure (") + e.what() + ")");
    }
}

}  // namespace welfare::grid

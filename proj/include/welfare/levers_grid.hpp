#pragma once

// Cost-benefit sweeps over (alpha, gamma_s) and extraction of the curve where
// expanding access and improving prediction are equally cost-efficient.

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "welfare/linear_model.hpp"
#include "welfare/probit_model.hpp"

namespace welfare::grid {

struct CostModel {
    double cost_access;      // marginal cost of raising alpha by delta_alpha
    double cost_prediction;  // marginal cost of raising gamma_s by delta_r2
};

void validate(const CostModel& cm);

/// par * cost_prediction / cost_access. Requires par > 0.
double cost_benefit(double par, const CostModel& cm);

enum class Model { linear, probit };
enum class Spacing { log, linear };
enum class Status { ok, skipped_degenerate, skipped_regime };

std::string to_string(Model m);
std::string to_string(Spacing s);
std::string to_string(Status s);
Model parse_model(const std::string& s);
Spacing parse_spacing(const std::string& s);
Status parse_status(const std::string& s);

struct Axis {
    double lo;
    double hi;
    std::size_t count;
    Spacing spacing;

    /// Endpoints are exact; log spacing interpolates log(lo)..log(hi).
    [[nodiscard]] std::vector<double> points() const;
};

struct GridSpec {
    Model model = Model::linear;
    double mu = 1.0;          // linear only
    double beta_norm = 10.0;  // linear only
    double base_rate = 0.1;   // probit only
    Axis alpha{0.001, 0.2, 60, Spacing::log};
    Axis gamma_s{0.01, 0.99, 50, Spacing::linear};
    LeverDelta deltas{0.01, 0.01};
    CostModel costs{1.0, 0.25};
    double clip_lo = 0.5;
    double clip_hi = 2.0;
};

/// Default heatmap settings per model; ranges and deltas differ.
GridSpec linear_figure_spec();
GridSpec probit_figure_spec();

/// Throws DomainError naming the first violated constraint.
void validate(const GridSpec& spec);

struct Cell {
    double alpha;
    double gamma_s;
    std::optional<double> par;  // absent unless status == ok
    std::optional<double> cost_benefit;
    std::optional<double> cost_benefit_clipped;
    Status status;

    bool operator==(const Cell&) const = default;
};

struct ContourPoint {
    double alpha;
    double gamma_s;
    bool operator==(const ContourPoint&) const = default;
};

struct GridResult {
    GridSpec spec;
    std::vector<Cell> cells;  // row-major, alpha outer
    std::vector<ContourPoint> contour;

    [[nodiscard]] const Cell& at(std::size_t alpha_index, std::size_t gamma_index) const {
        return cells[alpha_index * spec.gamma_s.count + gamma_index];
    }
};

/// Exact finite-difference PAR at every cell, then cost-benefit and clipping.
/// Cells are written to fixed slots, so the result does not depend on `threads`
/// (0 = hardware concurrency). Throws DomainError if no cell is ok. The contour
/// field is left empty; see extract_indifference_contour.
GridResult sweep_grid(const GridSpec& spec, unsigned threads = 0);

/// Per alpha column, linear interpolation in gamma_s between adjacent ok cells
/// whose unclipped cost-benefit brackets 1. Ordered by alpha, then gamma_s.
std::vector<ContourPoint> extract_indifference_contour(const GridResult& g);

/// Clamps every ok cell's clipped value into the spec's clip range.
GridResult clip(GridResult g);

enum class Format { csv, json };
Format parse_format(const std::string& s);

void serialize_grid(const GridResult& g, Format format, std::ostream& out);

/// Reads cells back from CSV output; the spec and contour are not part of CSV.
std::vector<Cell> parse_grid_csv(std::istream& in);
/// Reads a full result back from JSON output.
GridResult parse_grid_json(std::istream& in);

/// GridSpec in the JSON shape echoed by serialize_grid. Parsing starts from the
/// figure defaults of the named model, so omitted keys keep those defaults.
std::string spec_to_json(const GridSpec& spec);
GridSpec spec_from_json(std::istream& in);

}  // namespace welfare::grid

#pragma once

#include <functional>

namespace welfare::quadrature {

struct Options {
    double rel_tol = 1e-12;
    double abs_tol = 0.0;
    int max_intervals = 4000;
};

struct Result {
    double value;
    double abs_error;  // Kronrod-minus-Gauss estimate summed over panels
    int intervals;
};

/// Globally adaptive 10/21-point Gauss-Kronrod integration of f over [a, b].
/// The panel with the largest error estimate is bisected until the summed
/// estimate is below max(abs_tol, rel_tol * |value|). Throws NumericalError with
/// the achieved tolerance if the panel budget runs out first.
Result integrate(const std::function<double(double)>& f, double a, double b,
                 const Options& options = {});

}  // namespace welfare::quadrature

#include "welfare/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <sstream>
#include <vector>

#include "welfare/errors.hpp"

namespace welfare::quadrature {
namespace {

// Kronrod abscissae (positive half, descending) and weights; the Gauss nodes are
// the odd-indexed abscissae.
constexpr double kXgk[11] = {
    0.995657163025808080735527280689003, 0.973906528517171720077964012084452,
    0.930157491355708226001207180059508, 0.865063366688984510732096688423493,
    0.780817726586416897063717578345042, 0.679409568299024406234327365114874,
    0.562757134668604683339000099272694, 0.433395394129247190799265943165784,
    0.294392862701460198131126603103866, 0.148874338981631210884826001129720,
    0.000000000000000000000000000000000};
constexpr double kWgk[11] = {
    0.011694638867371874278064396062192, 0.032558162307964727478818972459390,
    0.054755896574351996031381300244580, 0.075039674810919952767043140916190,
    0.093125454583697605535065465083366, 0.109387158802297641899210590325805,
    0.123491976262065851077208467311250, 0.134709217311473325928054001771707,
    0.142775938577060080797094273138717, 0.147739104901338491374841515972068,
    0.149445554002916905664936468389821};
constexpr double kWg[5] = {
    0.066671344308688137593568809893332, 0.149451349150580593145776339657697,
    0.219086362515982043995534934228163, 0.269266719309996355091226921569469,
    0.295524224714752870173892994651338};

struct Panel {
    double a;
    double b;
    double value;
    double error;
};

struct ByError {
    bool operator()(const Panel& lhs, const Panel& rhs) const { return lhs.error < rhs.error; }
};

Panel gauss_kronrod_21(const std::function<double(double)>& f, double a, double b) {
    const double center = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    const double fc = f(center);
    double kronrod = kWgk[10] * fc;
    double gauss = 0.0;
    for (int j = 0; j < 10; ++j) {
        const double dx = half * kXgk[j];
        const double sum = f(center - dx) + f(center + dx);
        kronrod += kWgk[j] * sum;
        if (j % 2 == 1) gauss += kWg[j / 2] * sum;
    }
    return {a, b, kronrod * half, std::abs((kronrod - gauss) * half)};
}

}  // namespace

Result integrate(const std::function<double(double)>& f, double a, double b,
                 const Options& options) {
    if (!std::isfinite(a) || !std::isfinite(b) || !(a <= b)) {
        throw DomainError("integrate: need finite a <= b");
    }
    if (a == b) return {0.0, 0.0, 0};

    std::priority_queue<Panel, std::vector<Panel>, ByError> heap;
    heap.push(gauss_kronrod_21(f, a, b));
    double value = heap.top().value;
    double error = heap.top().error;
    int intervals = 1;

    auto target = [&] { return std::max(options.abs_tol, options.rel_tol * std::abs(value)); };

    while (error > target()) {
        const Panel worst = heap.top();
        const double mid = 0.5 * (worst.a + worst.b);
        if (intervals >= options.max_intervals || !(mid > worst.a && mid < worst.b)) {
            std::ostringstream msg;
            msg.precision(3);
            msg << "integrate: no convergence on [" << a << ", " << b << "] after " << intervals
                << " panels; achieved absolute error " << error << ", requested " << target();
            throw NumericalError(msg.str());
        }
        heap.pop();
        const Panel left = gauss_kronrod_21(f, worst.a, mid);
        const Panel right = gauss_kronrod_21(f, mid, worst.b);
        value += left.value + right.value - worst.value;
        error += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
        ++intervals;
    }

    // Re-sum in left-to-right order so the result does not depend on the
    // running-update history.
    std::vector<Panel> panels;
    panels.reserve(heap.size());
    while (!heap.empty()) {
        panels.push_back(heap.top());
        heap.pop();
    }
    std::sort(panels.begin(), panels.end(),
              [](const Panel& lhs, const Panel& rhs) { return lhs.a < rhs.a; });
    double total = 0.0;
    double total_error = 0.0;
    for (const Panel& p : panels) {
        total += p.value;
        total_error += p.error;
    }
    return {total, total_error, intervals};
}

}  // namespace welfare::quadrature

#include "txaccel/quadrature.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "txaccel/error.hpp"

namespace txaccel {

namespace {

constexpr double kNewtonTolerance = 1e-15;
constexpr int kNewtonMaxIterations = 100;

struct LegendreValue {
    double p;      // P_n(x)
    double dp;     // P_n'(x)
};

LegendreValue legendre(int n, double x) {
    double p0 = 1.0;
    double p1 = x;
    for (int k = 2; k <= n; ++k) {
        const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = pk;
    }
    return {p1, n * (x * p1 - p0) / (x * x - 1.0)};
}

}  // namespace

QuadratureSet gauss_legendre(int order) {
    if (order < kMinQuadratureOrder || order > kMaxQuadratureOrder || order % 2 != 0) {
        throw InvalidArgument("quadrature order must be even and in [2, 64], got " +
                              std::to_string(order));
    }
    QuadratureSet set;
    set.order = order;
    set.nodes.resize(order);
    set.weights.resize(order);

    const int half = order / 2;
    for (int m = 1; m <= half; ++m) {
        // Largest root first.
        double x = std::cos(std::numbers::pi * (m - 0.25) / (order + 0.5));
        LegendreValue v = legendre(order, x);
        for (int it = 0; it < kNewtonMaxIterations; ++it) {
            const double step = v.p / v.dp;
            x -= step;
            v = legendre(order, x);
            if (std::abs(step) <= kNewtonTolerance) break;
        }
        const double w = 2.0 / ((1.0 - x * x) * v.dp * v.dp);
        set.nodes[order - m] = x;
        set.nodes[m - 1] = -x;
        set.weights[order - m] = w;
        set.weights[m - 1] = w;
    }
    return set;
}

}  // namespace txaccel

#pragma once

// Independent reference computations used by the unit and acceptance tests.
// None of these call into the code paths they are compared against.

#include <cmath>
#include <vector>

#include "txaccel/quadrature.hpp"
#include "txaccel/transport.hpp"

namespace txaccel::oracle {

/// Pure absorber: each ordinate solves mu psi' + sigma psi = Q/2 with vacuum inflow, so
/// psi_m(L/2) = Q/(2 sigma) (1 - exp(-sigma (L/2) / |mu_m|)).
inline double pure_absorber_center_flux(const SlabProblem& p, int order) {
    const QuadratureSet q = gauss_legendre(order);
    const double half = 0.5 * p.width / p.sigma_t;
    double phi = 0.0;
    for (int m = 0; m < order; ++m) {
        phi += q.weights[m] * (p.source / (2.0 * p.sigma_t)) *
               (1.0 - std::exp(-p.sigma_t * half / std::abs(q.nodes[m])));
    }
    return phi;
}

/// Diamond-difference S_N with source iteration on a uniform mesh of `cells` cells
/// (even, so the slab center is a cell edge). Returns the center edge scalar flux.
inline double diamond_difference_center_flux(const SlabProblem& p, int order, int cells,
                                             double tolerance = 1e-14, int max_iterations = 200000) {
    const QuadratureSet q = gauss_legendre(order);
    const double st = p.sigma_t;
    const double ss = p.scattering_ratio * st;
    const double h = p.width / st / cells;
    const int mid = cells / 2;

    std::vector<double> phi(cells, 0.0);
    std::vector<double> next(cells);
    double center = 0.0;
    for (int it = 0; it < max_iterations; ++it) {
        std::fill(next.begin(), next.end(), 0.0);
        double center_next = 0.0;
        for (int m = 0; m < order; ++m) {
            const double a = std::abs(q.nodes[m]) / h;
            const double w = q.weights[m];
            double psi_in = 0.0;
            if (q.nodes[m] > 0.0) {
                for (int i = 0; i < cells; ++i) {
                    const double src = 0.5 * ss * phi[i] + 0.5 * p.source;
                    const double psi_out = ((a - 0.5 * st) * psi_in + src) / (a + 0.5 * st);
                    next[i] += w * 0.5 * (psi_in + psi_out);
                    psi_in = psi_out;
                    if (i + 1 == mid) center_next += w * psi_out;
                }
            } else {
                for (int i = cells - 1; i >= 0; --i) {
                    const double src = 0.5 * ss * phi[i] + 0.5 * p.source;
                    const double psi_out = ((a - 0.5 * st) * psi_in + src) / (a + 0.5 * st);
                    next[i] += w * 0.5 * (psi_in + psi_out);
                    psi_in = psi_out;
                    if (i == mid) center_next += w * psi_out;
                }
            }
        }
        double change = 0.0;
        for (int i = 0; i < cells; ++i) change = std::max(change, std::abs(next[i] - phi[i]) / std::abs(next[i]));
        change = std::max(change, std::abs(center_next - center) / std::abs(center_next));
        phi.swap(next);
        center = center_next;
        if (change < tolerance) break;
    }
    return center;
}

/// Diamond difference at h, h/2, h/4 followed by two Richardson levels (h^2, h^4).
/// The coarse mesh resolves the shallowest direction with h <= mu_min / resolution.
inline double refined_finite_difference_center_flux(const SlabProblem& p, int order, double resolution = 4.0) {
    const QuadratureSet q = gauss_legendre(order);
    const double mu_min = q.nodes[order / 2];
    const double length = p.width / p.sigma_t;
    int cells = static_cast<int>(std::ceil(length * resolution * p.sigma_t / mu_min));
    cells = std::max(cells + (cells % 2), 8);
    const double f1 = diamond_difference_center_flux(p, order, cells);
    const double f2 = diamond_difference_center_flux(p, order, 2 * cells);
    const double f4 = diamond_difference_center_flux(p, order, 4 * cells);
    const double r1 = (4.0 * f2 - f1) / 3.0;
    const double r2 = (4.0 * f4 - f2) / 3.0;
    return (16.0 * r2 - r1) / 15.0;
}

}  // namespace txaccel::oracle

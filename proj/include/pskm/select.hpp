#pragma once

#include <span>
#include <vector>

#include "pskm/smooth.hpp"

namespace pskm {

// Trace of the fit/roughness trade-off along a lambda grid. v[k] is the
// distance between adjacent (psi, phi) points, attached to the interval
// [lambdas[k], lambdas[k+1]]; lambda_star is the geometric mean of the
// interval achieving the smallest v.
struct VCurveTrace {
    std::vector<double> lambdas;
    std::vector<double> psi;  // log fit_ss per grid point
    std::vector<double> phi;  // log roughness per grid point
    std::vector<double> v;    // length lambdas.size() - 1
    int argmin_index = -1;
    double lambda_star = 0.0;
};

// Geometric grid of `count` points from lo to hi inclusive.
std::vector<double> lambda_grid(double lo = 1e-5, double hi = 1e8, int count = 100);

// Assembles v, argmin_index and lambda_star from per-grid-point logs.
// Ties go to the smaller-lambda interval.
VCurveTrace vcurve_from_logs(std::vector<double> lambdas, std::vector<double> psi,
                             std::vector<double> phi);

VCurveTrace vcurve_trace(const Series& series, const KnotGrid& grid, int penalty_order,
                         std::span<const double> lambdas);

// Same computation against an already-built solver (saves the basis and
// normal-equation setup when the caller needs further solves).
VCurveTrace vcurve_trace_with(const PenalizedSolver& solver, std::span<const double> lambdas);

double select_lambda(const Series& series, const KnotGrid& grid, int penalty_order,
                     std::span<const double> lambdas);

}  // namespace pskm

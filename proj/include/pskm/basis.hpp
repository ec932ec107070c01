#pragma once

#include <span>
#include <vector>

#include <Eigen/Dense>

namespace pskm {

// Equidistant knot layout for a B-spline basis of a given degree over
// [domain_lo, domain_hi]. The sequence extends `degree` spacings past
// each domain end so every basis function is a shifted copy of the same
// shape; with n_segments domain intervals the basis has
// n_segments + degree functions.
struct KnotGrid {
    double domain_lo = 0.0;
    double domain_hi = 1.0;
    int n_segments = 1;
    int degree = 3;
    std::vector<double> knots;  // n_segments + 2*degree + 1 values

    double spacing() const { return (domain_hi - domain_lo) / n_segments; }
    int n_basis() const { return n_segments + degree; }
};

KnotGrid make_knots(double domain_lo, double domain_hi, int n_segments, int degree);

// Index in [0, n_segments) of the domain interval containing x. The top
// interval is closed on the right; x may stray a relative 1e-12 past
// either domain end before PointOutsideDomain is thrown.
int find_segment(const KnotGrid& grid, double x);

// Dense basis evaluations: values(i, j) is basis function j at
// eval_points[i]. spans[i] is the first column supported at that point;
// only degree + 1 consecutive columns starting there are nonzero.
struct BasisMatrix {
    Eigen::MatrixXd values;
    KnotGrid grid;
    std::vector<double> eval_points;
    std::vector<int> spans;
};

BasisMatrix eval_basis(const KnotGrid& grid, std::span<const double> x);

}  // namespace pskm

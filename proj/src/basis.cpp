#include "pskm/basis.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "pskm/errors.hpp"

namespace pskm {

namespace {

constexpr int kMaxDegree = 10;

double domain_tolerance(const KnotGrid& grid) {
    return 1e-12 * std::max({1.0, std::abs(grid.domain_lo), std::abs(grid.domain_hi)});
}

// Cox-de Boor recursion producing the degree+1 basis values with support
// at x. `span` is the knot index with knots[span] <= x <= knots[span+1];
// out[r] is the value of basis function (span - degree + r).
void nonzero_basis(const KnotGrid& grid, int span, double x, double* out) {
    const int q = grid.degree;
    const auto& t = grid.knots;
    double left[kMaxDegree + 1];
    double right[kMaxDegree + 1];
    out[0] = 1.0;
    for (int j = 1; j <= q; ++j) {
        left[j] = x - t[span + 1 - j];
        right[j] = t[span + j] - x;
        double saved = 0.0;
        for (int r = 0; r < j; ++r) {
            const double tmp = out[r] / (right[r + 1] + left[j - r]);
            out[r] = saved + right[r + 1] * tmp;
            saved = left[j - r] * tmp;
        }
        out[j] = saved;
    }
}

}  // namespace

KnotGrid make_knots(double domain_lo, double domain_hi, int n_segments, int degree) {
    if (!(domain_lo < domain_hi))
        throw InvalidArgument("make_knots: domain [" + std::to_string(domain_lo) + ", " +
                              std::to_string(domain_hi) + "] is not increasing");
    if (n_segments < 1)
        throw InvalidArgument("make_knots: n_segments must be >= 1, got " +
                              std::to_string(n_segments));
    if (degree < 0 || degree > kMaxDegree)
        throw InvalidArgument("make_knots: degree must lie in [0, " + std::to_string(kMaxDegree) +
                              "], got " + std::to_string(degree));

    KnotGrid grid;
    grid.domain_lo = domain_lo;
    grid.domain_hi = domain_hi;
    grid.n_segments = n_segments;
    grid.degree = degree;
    const double h = (domain_hi - domain_lo) / n_segments;
    grid.knots.resize(static_cast<std::size_t>(n_segments) + 2 * degree + 1);
    for (std::size_t j = 0; j < grid.knots.size(); ++j)
        grid.knots[j] = domain_lo + (static_cast<double>(j) - degree) * h;
    return grid;
}

int find_segment(const KnotGrid& grid, double x) {
    const double tol = domain_tolerance(grid);
    if (x < grid.domain_lo - tol || x > grid.domain_hi + tol)
        throw PointOutsideDomain("point " + std::to_string(x) + " outside domain [" +
                                 std::to_string(grid.domain_lo) + ", " +
                                 std::to_string(grid.domain_hi) + "]");
    const double t = (x - grid.domain_lo) / grid.spacing();
    const int seg = static_cast<int>(std::floor(t));
    // The top interval is right-closed, so x == domain_hi maps to the
    // last segment; the clamp also absorbs the boundary tolerance.
    return std::clamp(seg, 0, grid.n_segments - 1);
}

BasisMatrix eval_basis(const KnotGrid& grid, std::span<const double> x) {
    BasisMatrix basis;
    basis.grid = grid;
    basis.eval_points.assign(x.begin(), x.end());
    basis.spans.resize(x.size());
    basis.values = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(x.size()), grid.n_basis());

    double window[kMaxDegree + 1];
    for (std::size_t i = 0; i < x.size(); ++i) {
        const int seg = find_segment(grid, x[i]);
        // Clamp within-tolerance boundary strays onto the domain so the
        // recursion never produces values below zero.
        const double xc = std::clamp(x[i], grid.domain_lo, grid.domain_hi);
        nonzero_basis(grid, seg + grid.degree, xc, window);
        basis.spans[i] = seg;
        for (int r = 0; r <= grid.degree; ++r)
            basis.values(static_cast<Eigen::Index>(i), seg + r) = window[r];
    }
    return basis;
}

}  // namespace pskm

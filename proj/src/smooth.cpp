#include "pskm/smooth.hpp"

#include <cmath>
#include <string>
#include <utility>

#include "pskm/errors.hpp"

namespace pskm {

int Series::n_observed() const {
    if (observed.empty()) return static_cast<int>(x.size());
    int n = 0;
    for (std::uint8_t o : observed) n += (o != 0);
    return n;
}

void Series::validate() const {
    if (x.empty()) throw InvalidArgument("series has no points");
    if (x.size() != y.size())
        throw InvalidArgument("series x/y lengths differ: " + std::to_string(x.size()) + " vs " +
                              std::to_string(y.size()));
    if (!observed.empty() && observed.size() != x.size())
        throw InvalidArgument("series mask length " + std::to_string(observed.size()) +
                              " does not match " + std::to_string(x.size()) + " points");
    for (std::size_t i = 1; i < x.size(); ++i)
        if (!(x[i] > x[i - 1]))
            throw InvalidArgument("series time points must increase strictly; violation at index " +
                                  std::to_string(i));
}

PenaltyOp difference_matrix(int size, int order) {
    if (order < 1)
        throw InvalidArgument("difference order must be >= 1, got " + std::to_string(order));
    if (order >= size)
        throw InvalidArgument("difference order " + std::to_string(order) +
                              " too large for coefficient count " + std::to_string(size));

    PenaltyOp op;
    op.order = order;
    op.size = size;
    op.matrix = Eigen::MatrixXd::Zero(size - order, size);
    // Signed binomial pattern of the d-th forward difference:
    // coefficient k gets (-1)^(d-k) * C(d, k).
    std::vector<double> pattern(static_cast<std::size_t>(order) + 1);
    double binom = 1.0;
    for (int k = 0; k <= order; ++k) {
        pattern[static_cast<std::size_t>(k)] = ((order - k) % 2 == 0) ? binom : -binom;
        binom = binom * (order - k) / (k + 1);
    }
    for (int r = 0; r < size - order; ++r)
        for (int k = 0; k <= order; ++k)
            op.matrix(r, r + k) = pattern[static_cast<std::size_t>(k)];
    return op;
}

PenalizedSolver::PenalizedSolver(const Series& series, const KnotGrid& grid, int penalty_order)
    : grid_(grid), penalty_order_(penalty_order) {
    series.validate();
    const int p = grid.n_basis();
    if (penalty_order < 1 || penalty_order >= p)
        throw InvalidArgument("penalty order " + std::to_string(penalty_order) +
                              " invalid for " + std::to_string(p) + " basis functions");

    std::vector<double> x_obs;
    std::vector<double> y_obs;
    x_obs.reserve(series.x.size());
    y_obs.reserve(series.x.size());
    for (std::size_t i = 0; i < series.x.size(); ++i) {
        if (!series.observed.empty() && series.observed[i] == 0) continue;
        x_obs.push_back(series.x[i]);
        y_obs.push_back(series.y[i]);
    }
    const int n_obs = static_cast<int>(x_obs.size());
    if (n_obs < penalty_order + 1)
        throw InsufficientData("series has " + std::to_string(n_obs) +
                               " observed points; penalty order " + std::to_string(penalty_order) +
                               " needs at least " + std::to_string(penalty_order + 1));

    BasisMatrix basis = eval_basis(grid_, x_obs);
    basis_obs_ = std::move(basis.values);
    spans_ = std::move(basis.spans);
    y_obs_ = Eigen::Map<const Eigen::VectorXd>(y_obs.data(), n_obs);

    // Accumulate the Gram and moment terms over the local support window
    // only; each basis row has degree+1 nonzeros starting at its span.
    gram_ = Eigen::MatrixXd::Zero(p, p);
    moment_ = Eigen::VectorXd::Zero(p);
    const int width = grid_.degree + 1;
    for (int i = 0; i < n_obs; ++i) {
        const int s = spans_[static_cast<std::size_t>(i)];
        for (int r = 0; r < width; ++r) {
            const double br = basis_obs_(i, s + r);
            moment_(s + r) += br * y_obs_(i);
            for (int c = 0; c <= r; ++c) gram_(s + r, s + c) += br * basis_obs_(i, s + c);
        }
    }
    gram_ = gram_.selfadjointView<Eigen::Lower>();

    PenaltyOp diff = difference_matrix(p, penalty_order_);
    diff_ = std::move(diff.matrix);
    penalty_gram_.noalias() = diff_.transpose() * diff_;
}

bool PenalizedSolver::constant_observations() const {
    return y_obs_.maxCoeff() == y_obs_.minCoeff();
}

SplineFit PenalizedSolver::solve(double lambda) const {
    if (!std::isfinite(lambda) || lambda < 0.0)
        throw InvalidArgument("lambda must be finite and nonnegative, got " +
                              std::to_string(lambda));

    const int p = grid_.n_basis();
    Eigen::VectorXd coef(p);
    if (lambda == 0.0) {
        // Unpenalized mode: refuse rank-deficient bases instead of
        // silently regularizing them.
        Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(basis_obs_);
        if (qr.rank() < p)
            throw SingularSystem("unpenalized basis has rank " + std::to_string(qr.rank()) +
                                 " of " + std::to_string(p) + "; a positive lambda is required");
        coef = qr.solve(y_obs_);
    } else {
        Eigen::MatrixXd system = gram_ + lambda * penalty_gram_;
        Eigen::LDLT<Eigen::MatrixXd> ldlt(system);
        coef = ldlt.solve(moment_);
        // Backward-error test: a stable solve keeps the residual tiny
        // relative to |A||x| + |b| no matter how stiff the system is.
        const double scale = system.norm() * coef.norm() + moment_.norm();
        const double residual = (system * coef - moment_).norm();
        if (ldlt.info() != Eigen::Success || !coef.allFinite() ||
            (scale > 0.0 && residual > 1e-10 * scale))
            throw SingularSystem("penalized system is numerically singular at lambda = " +
                                 std::to_string(lambda));
    }

    SplineFit fit;
    fit.coefficients = std::move(coef);
    fit.lambda = lambda;
    fit.grid = grid_;
    fit.penalty_order = penalty_order_;

    // Residual sum over observed rows, accumulated through the local
    // support window to avoid touching the zero blocks.
    double ss = 0.0;
    const int width = grid_.degree + 1;
    for (int i = 0; i < static_cast<int>(y_obs_.size()); ++i) {
        const int s = spans_[static_cast<std::size_t>(i)];
        double yhat = 0.0;
        for (int r = 0; r < width; ++r) yhat += basis_obs_(i, s + r) * fit.coefficients(s + r);
        const double res = y_obs_(i) - yhat;
        ss += res * res;
    }
    fit.fit_ss = ss;
    fit.roughness = (diff_ * fit.coefficients).squaredNorm();
    return fit;
}

SplineFit fit_pspline(const Series& series, const KnotGrid& grid, double lambda,
                      int penalty_order) {
    return PenalizedSolver(series, grid, penalty_order).solve(lambda);
}

std::vector<double> predict(const SplineFit& fit, std::span<const double> x_new) {
    const BasisMatrix basis = eval_basis(fit.grid, x_new);
    const Eigen::VectorXd yhat = basis.values * fit.coefficients;
    return std::vector<double>(yhat.data(), yhat.data() + yhat.size());
}

}  // namespace pskm

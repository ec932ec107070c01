#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "pskm/basis.hpp"

namespace pskm {

// One observed series: strictly increasing time points with aligned
// values. An empty `observed` mask means fully observed; otherwise
// observed[i] == 0 marks a gap at x[i] and y[i] is ignored.
struct Series {
    std::vector<double> x;
    std::vector<double> y;
    std::vector<std::uint8_t> observed;

    int n_observed() const;
    void validate() const;  // throws InvalidArgument on shape violations
};

// d-th order difference operator on coefficient vectors: row r of
// `matrix` holds the signed binomial pattern of the d-th forward
// difference starting at coefficient r.
struct PenaltyOp {
    int order = 0;
    int size = 0;
    Eigen::MatrixXd matrix;  // (size - order) x size
};

PenaltyOp difference_matrix(int size, int order);

struct SplineFit {
    Eigen::VectorXd coefficients;
    double lambda = 0.0;
    double fit_ss = 0.0;     // residual sum of squares over observed points
    double roughness = 0.0;  // squared norm of the differenced coefficients
    KnotGrid grid;
    int penalty_order = 0;
};

// Normal equations of one series, assembled once and solvable at any
// lambda; shared read-only across threads after construction. Keeping
// the Gram/moment blocks here lets a lambda sweep reuse one assembly.
class PenalizedSolver {
  public:
    PenalizedSolver(const Series& series, const KnotGrid& grid, int penalty_order);

    SplineFit solve(double lambda) const;

    int n_observed() const { return static_cast<int>(y_obs_.size()); }
    // True when every observed value is identical; such a series lies in
    // the penalty null space, so its roughness vanishes at any lambda.
    bool constant_observations() const;

  private:
    KnotGrid grid_;
    int penalty_order_;
    Eigen::MatrixXd basis_obs_;    // basis rows at observed points
    std::vector<int> spans_;
    Eigen::VectorXd y_obs_;
    Eigen::MatrixXd gram_;         // basis' * basis over observed rows
    Eigen::VectorXd moment_;       // basis' * y
    Eigen::MatrixXd diff_;         // difference operator
    Eigen::MatrixXd penalty_gram_; // diff' * diff
};

// One-shot convenience wrapper around PenalizedSolver.
SplineFit fit_pspline(const Series& series, const KnotGrid& grid, double lambda,
                      int penalty_order);

// Fitted values at new points inside the fit's domain.
std::vector<double> predict(const SplineFit& fit, std::span<const double> x_new);

}  // namespace pskm

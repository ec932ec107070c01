#include "pskm/select.hpp"

#include <cmath>
#include <string>
#include <utility>

#include "pskm/errors.hpp"

namespace pskm {

namespace {

void check_grid(std::span<const double> lambdas) {
    if (lambdas.size() < 3)
        throw InvalidArgument("lambda grid needs at least 3 points, got " +
                              std::to_string(lambdas.size()));
    for (std::size_t i = 0; i < lambdas.size(); ++i) {
        if (!(lambdas[i] > 0.0) || !std::isfinite(lambdas[i]))
            throw InvalidArgument("lambda grid entries must be positive and finite");
        if (i > 0 && !(lambdas[i] > lambdas[i - 1]))
            throw InvalidArgument("lambda grid must increase strictly; violation at index " +
                                  std::to_string(i));
    }
}

}  // namespace

std::vector<double> lambda_grid(double lo, double hi, int count) {
    if (!(lo > 0.0) || !std::isfinite(hi) || !(hi > lo))
        throw InvalidArgument("lambda grid bounds must satisfy 0 < lo < hi");
    if (count < 3)
        throw InvalidArgument("lambda grid needs at least 3 points, got " + std::to_string(count));
    std::vector<double> grid(static_cast<std::size_t>(count));
    const double step = std::log(hi / lo) / (count - 1);
    for (int i = 0; i < count; ++i) grid[static_cast<std::size_t>(i)] = lo * std::exp(step * i);
    grid.front() = lo;
    grid.back() = hi;
    return grid;
}

VCurveTrace vcurve_from_logs(std::vector<double> lambdas, std::vector<double> psi,
                             std::vector<double> phi) {
    check_grid(lambdas);
    if (psi.size() != lambdas.size() || phi.size() != lambdas.size())
        throw InvalidArgument("psi/phi lengths must match the lambda grid");

    VCurveTrace trace;
    trace.lambdas = std::move(lambdas);
    trace.psi = std::move(psi);
    trace.phi = std::move(phi);
    const std::size_t n = trace.lambdas.size();
    trace.v.resize(n - 1);
    for (std::size_t k = 0; k + 1 < n; ++k) {
        const double dpsi = trace.psi[k + 1] - trace.psi[k];
        const double dphi = trace.phi[k + 1] - trace.phi[k];
        trace.v[k] = std::sqrt(dpsi * dpsi + dphi * dphi);
    }
    // Strict < keeps the smallest-lambda interval on ties.
    std::size_t best = 0;
    for (std::size_t k = 1; k < trace.v.size(); ++k)
        if (trace.v[k] < trace.v[best]) best = k;
    trace.argmin_index = static_cast<int>(best);
    trace.lambda_star = std::sqrt(trace.lambdas[best]) * std::sqrt(trace.lambdas[best + 1]);
    return trace;
}

VCurveTrace vcurve_trace(const Series& series, const KnotGrid& grid, int penalty_order,
                         std::span<const double> lambdas) {
    const PenalizedSolver solver(series, grid, penalty_order);
    return vcurve_trace_with(solver, lambdas);
}

VCurveTrace vcurve_trace_with(const PenalizedSolver& solver, std::span<const double> lambdas) {
    check_grid(lambdas);
    if (solver.constant_observations())
        throw DegenerateRoughness(
            "all observed values are equal, so roughness vanishes at every lambda");

    std::vector<double> psi(lambdas.size());
    std::vector<double> phi(lambdas.size());
    for (std::size_t i = 0; i < lambdas.size(); ++i) {
        const SplineFit fit = solver.solve(lambdas[i]);
        if (!(fit.fit_ss > 0.0) || !(fit.roughness > 0.0))
            throw DegenerateRoughness("log of fit/roughness undefined at lambda = " +
                                      std::to_string(lambdas[i]));
        psi[i] = std::log(fit.fit_ss);
        phi[i] = std::log(fit.roughness);
    }
    return vcurve_from_logs(std::vector<double>(lambdas.begin(), lambdas.end()), std::move(psi),
                            std::move(phi));
}

double select_lambda(const Series& series, const KnotGrid& grid, int penalty_order,
                     std::span<const double> lambdas) {
    return vcurve_trace(series, grid, penalty_order, lambdas).lambda_star;
}

}  // namespace pskm

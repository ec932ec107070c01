#include <doctest.h>

#include <cmath>
#include <vector>

#include "pskm/basis.hpp"
#include "pskm/errors.hpp"
#include "pskm/rng.hpp"
#include "pskm/select.hpp"
#include "pskm/smooth.hpp"

using pskm::KnotGrid;
using pskm::lambda_grid;
using pskm::make_knots;
using pskm::Series;
using pskm::vcurve_from_logs;
using pskm::vcurve_trace;
using pskm::VCurveTrace;

namespace {

Series sinusoid_series(std::uint64_t seed, int n, double sd) {
    pskm::Rng rng(seed);
    Series s;
    for (int i = 0; i < n; ++i) {
        const double x = static_cast<double>(i) / (n - 1);
        s.x.push_back(x);
        s.y.push_back(std::sin(2.0 * M_PI * x) + sd * rng.normal());
    }
    return s;
}

double rmse_vs_signal(const pskm::SplineFit& fit) {
    double ss = 0.0;
    const int m = 400;
    std::vector<double> xs(m);
    for (int i = 0; i < m; ++i) xs[static_cast<std::size_t>(i)] = static_cast<double>(i) / (m - 1);
    const auto yhat = pskm::predict(fit, xs);
    for (int i = 0; i < m; ++i) {
        const double d = yhat[static_cast<std::size_t>(i)] -
                         std::sin(2.0 * M_PI * xs[static_cast<std::size_t>(i)]);
        ss += d * d;
    }
    return std::sqrt(ss / m);
}

}  // namespace

TEST_CASE("lambda grid is geometric with exact endpoints") {
    const auto grid = lambda_grid(1e-5, 1e8, 100);
    REQUIRE(grid.size() == 100);
    CHECK(grid.front() == 1e-5);
    CHECK(grid.back() == 1e8);
    const double ratio = grid[1] / grid[0];
    for (std::size_t i = 1; i < grid.size(); ++i)
        CHECK(grid[i] / grid[i - 1] == doctest::Approx(ratio).epsilon(1e-10));
    CHECK_THROWS_AS(lambda_grid(0.0, 1e8, 100), pskm::InvalidArgument);
    CHECK_THROWS_AS(lambda_grid(1.0, 0.5, 100), pskm::InvalidArgument);
    CHECK_THROWS_AS(lambda_grid(1e-5, 1e8, 2), pskm::InvalidArgument);
}

TEST_CASE("curve assembly computes segment lengths and the argmin") {
    const std::vector<double> lambdas{1.0, 10.0, 100.0, 1000.0};
    const std::vector<double> psi{0.0, 3.0, 3.1, 7.1};
    const std::vector<double> phi{0.0, 4.0, 4.1, 1.1};
    const auto trace = vcurve_from_logs(lambdas, psi, phi);
    REQUIRE(trace.v.size() == 3);
    CHECK(trace.v[0] == doctest::Approx(5.0));
    CHECK(trace.v[1] == doctest::Approx(std::sqrt(0.02)));
    CHECK(trace.v[2] == doctest::Approx(std::sqrt(16.0 + 9.0)));
    CHECK(trace.argmin_index == 1);
    CHECK(trace.lambda_star == doctest::Approx(std::sqrt(10.0 * 100.0)));
}

TEST_CASE("ties resolve toward the smaller lambda interval") {
    const std::vector<double> lambdas{1.0, 10.0, 100.0, 1000.0};
    const std::vector<double> psi{0.0, 1.0, 2.0, 3.0};
    const std::vector<double> phi{0.0, 0.0, 0.0, 0.0};  // all v equal
    const auto trace = vcurve_from_logs(lambdas, psi, phi);
    CHECK(trace.argmin_index == 0);
    CHECK(trace.lambda_star == doctest::Approx(std::sqrt(10.0)));
}

TEST_CASE("assembly validates its inputs") {
    CHECK_THROWS_AS(vcurve_from_logs({1.0, 2.0}, {0.0, 0.0}, {0.0, 0.0}),
                    pskm::InvalidArgument);
    CHECK_THROWS_AS(vcurve_from_logs({1.0, 2.0, 2.0}, {0.0, 0.0, 0.0}, {0.0, 0.0, 0.0}),
                    pskm::InvalidArgument);
    CHECK_THROWS_AS(vcurve_from_logs({1.0, 2.0, 3.0}, {0.0, 0.0}, {0.0, 0.0, 0.0}),
                    pskm::InvalidArgument);
}

TEST_CASE("selected lambda beats both grid endpoints on a noisy sinusoid") {
    const Series s = sinusoid_series(99, 50, 0.2);
    const KnotGrid grid = make_knots(0.0, 1.0, 40, 3);
    const auto lambdas = lambda_grid(1e-5, 1e8, 100);
    const auto trace = vcurve_trace(s, grid, 3, lambdas);

    const pskm::PenalizedSolver solver(s, grid, 3);
    const double rmse_star = rmse_vs_signal(solver.solve(trace.lambda_star));
    const double rmse_lo = rmse_vs_signal(solver.solve(lambdas.front()));
    const double rmse_hi = rmse_vs_signal(solver.solve(lambdas.back()));
    CHECK(rmse_star <= 0.5 * rmse_lo);
    CHECK(rmse_star <= 0.5 * rmse_hi);
}

TEST_CASE("correlated noise does not drive the choice to interpolation") {
    pskm::Rng rng(4);
    Series s;
    const int n = 80;
    const double rho = 0.9, sd = 0.3;
    double e = sd * rng.normal();
    double noise_energy = 0.0;
    for (int i = 0; i < n; ++i) {
        const double x = static_cast<double>(i) / (n - 1);
        if (i > 0) e = rho * e + sd * std::sqrt(1.0 - rho * rho) * rng.normal();
        s.x.push_back(x);
        s.y.push_back(std::sin(2.0 * M_PI * x) + e);
        noise_energy += e * e;
    }
    const KnotGrid grid = make_knots(0.0, 1.0, 40, 3);
    const auto lambdas = lambda_grid(1e-2, 1e8, 100);
    const auto trace = vcurve_trace(s, grid, 3, lambdas);
    const pskm::PenalizedSolver solver(s, grid, 3);
    const pskm::SplineFit fit = solver.solve(trace.lambda_star);
    // Residuals keep most of the noise energy instead of chasing it...
    CHECK(fit.fit_ss > 0.5 * noise_energy);
    // ...and sit far above the near-interpolating small-lambda extreme.
    CHECK(fit.fit_ss > 4.0 * solver.solve(lambdas.front()).fit_ss);
}

TEST_CASE("doubling the grid density barely moves the selection") {
    const Series s = sinusoid_series(99, 60, 0.25);
    const KnotGrid grid = make_knots(0.0, 1.0, 40, 3);
    const auto coarse = lambda_grid(1e-5, 1e8, 100);
    const auto fine = lambda_grid(1e-5, 1e8, 200);
    const double l_coarse = pskm::select_lambda(s, grid, 3, coarse);
    const double l_fine = pskm::select_lambda(s, grid, 3, fine);
    const double coarse_step = std::log10(coarse[1] / coarse[0]);
    CHECK(std::abs(std::log10(l_fine / l_coarse)) < coarse_step);
}

TEST_CASE("the reported curve reproduces under reassembly") {
    const Series s = sinusoid_series(4321, 50, 0.2);
    const KnotGrid grid = make_knots(0.0, 1.0, 20, 3);
    const auto lambdas = lambda_grid(1e-4, 1e6, 60);
    const auto trace = vcurve_trace(s, grid, 2, lambdas);
    const auto rebuilt = vcurve_from_logs(trace.lambdas, trace.psi, trace.phi);
    REQUIRE(rebuilt.v.size() == trace.v.size());
    for (std::size_t k = 0; k < trace.v.size(); ++k)
        CHECK(rebuilt.v[k] == doctest::Approx(trace.v[k]).epsilon(1e-10));
    CHECK(rebuilt.argmin_index == trace.argmin_index);
    CHECK(rebuilt.lambda_star == doctest::Approx(trace.lambda_star).epsilon(1e-12));
}

TEST_CASE("selection is deterministic") {
    const Series s = sinusoid_series(7, 50, 0.2);
    const KnotGrid grid = make_knots(0.0, 1.0, 30, 3);
    const auto lambdas = lambda_grid(1e-5, 1e8, 100);
    const auto a = vcurve_trace(s, grid, 3, lambdas);
    const auto b = vcurve_trace(s, grid, 3, lambdas);
    CHECK(a.lambda_star == b.lambda_star);
    CHECK(a.argmin_index == b.argmin_index);
}

TEST_CASE("constant series cannot be selected for") {
    Series flat;
    for (int i = 0; i < 30; ++i) {
        flat.x.push_back(static_cast<double>(i));
        flat.y.push_back(1.0);
    }
    const KnotGrid grid = make_knots(0.0, 29.0, 10, 3);
    const auto lambdas = lambda_grid(1e-5, 1e8, 50);
    CHECK_THROWS_AS(vcurve_trace(flat, grid, 3, lambdas), pskm::DegenerateRoughness);
}

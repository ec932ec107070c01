#include <doctest.h>

#include <cmath>
#include <numeric>
#include <vector>

#include "pskm/errors.hpp"
#include "pskm/simgen.hpp"

using pskm::class_signal;
using pskm::generate_dataset;
using pskm::MissingSpec;
using pskm::NoiseScenario;
using pskm::SimConfig;
using pskm::SimDataset;

TEST_CASE("mean curves evaluate to externally computed values") {
    const double alpha = 1.3, beta = -0.4, x = 0.25;
    CHECK(class_signal(0, alpha, beta, x) == doctest::Approx(-0.4).epsilon(1e-12));
    CHECK(class_signal(1, alpha, beta, x) == doctest::Approx(0.8235496).epsilon(1e-12));
    CHECK(class_signal(2, alpha, beta, x) ==
          doctest::Approx(1.6014809331907027).epsilon(1e-12));
    CHECK(class_signal(3, alpha, beta, x) == doctest::Approx(-0.4).epsilon(1e-12));
    CHECK(class_signal(4, alpha, beta, x) ==
          doctest::Approx(-0.10993079180704122).epsilon(1e-12));
    CHECK(class_signal(5, alpha, beta, x) == doctest::Approx(-0.075).epsilon(1e-12));

    CHECK_THROWS_AS(class_signal(6, 1.0, 0.0, 0.5), pskm::InvalidArgument);
    CHECK_THROWS_AS(class_signal(-1, 1.0, 0.0, 0.5), pskm::InvalidArgument);
    CHECK_THROWS_AS(class_signal(0, 1.0, 0.0, 1.5), pskm::InvalidArgument);
}

TEST_CASE("dataset dimensions and label blocks follow the configuration") {
    SimConfig config;
    config.seed = 5;
    const SimDataset ds = generate_dataset(config);
    CHECK(ds.n_series() == 360);
    CHECK(ds.y.rows() == 100);
    CHECK(ds.x.size() == 100);
    CHECK(ds.x(0) == doctest::Approx(0.0));
    CHECK(ds.x(99) == doctest::Approx(1.0));
    CHECK(ds.x(1) - ds.x(0) == doctest::Approx(1.0 / 99));

    const int expected_sizes[6] = {90, 50, 100, 25, 60, 35};
    std::vector<int> counts(6, 0);
    for (int lab : ds.true_labels) ++counts[static_cast<std::size_t>(lab)];
    for (int c = 0; c < 6; ++c) CHECK(counts[static_cast<std::size_t>(c)] == expected_sizes[c]);

    // Complete data: everything observed.
    CHECK(static_cast<int>(ds.observed.cast<int>().sum()) == 100 * 360);
    CHECK(ds.sigma_alpha >= 0.3);
    CHECK(ds.sigma_alpha < 1.0);
    CHECK(ds.sigma_beta >= 0.3);
    CHECK(ds.sigma_beta < 1.0);
    for (const auto& d : ds.draws) {
        CHECK(d.sigma_eps >= 0.0);
        CHECK(d.sigma_eps < 0.5);
    }
}

TEST_CASE("generation is reproducible and seed-sensitive") {
    SimConfig config;
    config.scenario = NoiseScenario::Ar05;
    config.missing = MissingSpec{};
    config.seed = 31;
    const SimDataset a = generate_dataset(config);
    const SimDataset b = generate_dataset(config);
    CHECK((a.y - b.y).cwiseAbs().maxCoeff() == 0.0);
    CHECK((a.observed == b.observed).all());

    config.seed = 32;
    const SimDataset c = generate_dataset(config);
    CHECK((a.y - c.y).cwiseAbs().maxCoeff() > 0.0);
}

TEST_CASE("missing fractions stay inside the configured band") {
    SimConfig config;
    config.missing = MissingSpec{0.10, 0.50};
    config.seed = 77;
    const SimDataset ds = generate_dataset(config);
    CHECK(ds.n_clamped_missing == 0);
    int total_missing = 0;
    for (int j = 0; j < ds.n_series(); ++j) {
        int miss = 0;
        for (int i = 0; i < 100; ++i) miss += (ds.observed(i, j) == 0);
        total_missing += miss;
        CHECK(miss >= 10);
        CHECK(miss <= 50);
    }
    CHECK(total_missing > 0);
}

TEST_CASE("observation floor holds even under extreme missingness") {
    SimConfig config;
    config.n_points = 10;
    config.class_sizes = {20, 0, 0, 0, 0, 0};
    config.missing = MissingSpec{0.90, 0.99};
    config.seed = 3;
    const SimDataset ds = generate_dataset(config);
    CHECK(ds.n_clamped_missing > 0);
    for (int j = 0; j < ds.n_series(); ++j) {
        int obs = 0;
        for (int i = 0; i < 10; ++i) obs += (ds.observed(i, j) != 0);
        CHECK(obs >= 4);
    }
}

TEST_CASE("noise processes match their nominal autocorrelation and scale") {
    // One long series per scenario; the signal is subtracted exactly, so
    // what remains is the raw noise path.
    for (const auto [scenario, rho] :
         {std::pair{NoiseScenario::Iid, 0.0}, std::pair{NoiseScenario::Ar05, 0.5},
          std::pair{NoiseScenario::Ar09, 0.9}}) {
        SimConfig config;
        config.n_points = 100000;
        config.class_sizes = {0, 0, 0, 0, 0, 1};  // one linear series
        config.scenario = scenario;
        config.seed = 11;
        const SimDataset ds = generate_dataset(config);
        const auto& d = ds.draws[0];
        std::vector<double> noise(100000);
        for (int i = 0; i < 100000; ++i)
            noise[static_cast<std::size_t>(i)] =
                ds.y(i, 0) - pskm::class_signal(5, d.alpha, d.beta, ds.x(i));

        const double mean =
            std::accumulate(noise.begin(), noise.end(), 0.0) / static_cast<double>(noise.size());
        double var = 0.0, cov = 0.0;
        for (std::size_t i = 0; i < noise.size(); ++i) {
            var += (noise[i] - mean) * (noise[i] - mean);
            if (i > 0) cov += (noise[i] - mean) * (noise[i - 1] - mean);
        }
        var /= static_cast<double>(noise.size());
        cov /= static_cast<double>(noise.size() - 1);

        CHECK(std::abs(cov / var - rho) < 0.02);
        // Marginal scale equals sigma_eps in every scenario.
        CHECK(std::sqrt(var) == doctest::Approx(d.sigma_eps).epsilon(0.03));
    }
}

TEST_CASE("per-series spread redraw leaves the dataset fields unset") {
    SimConfig config;
    config.redraw_sigmas_per_series = true;
    config.seed = 9;
    const SimDataset ds = generate_dataset(config);
    CHECK(std::isnan(ds.sigma_alpha));
    CHECK(std::isnan(ds.sigma_beta));
    CHECK(ds.n_series() == 360);
}

TEST_CASE("configuration validation") {
    SimConfig config;
    config.n_points = 3;
    CHECK_THROWS_AS(generate_dataset(config), pskm::InvalidArgument);
    config.n_points = 100;
    config.class_sizes = {0, 0, 0, 0, 0, 0};
    CHECK_THROWS_AS(generate_dataset(config), pskm::InvalidArgument);
    config.class_sizes = {1, 1, 1, 1, 1, 1};
    config.missing = MissingSpec{0.5, 0.2};
    CHECK_THROWS_AS(generate_dataset(config), pskm::InvalidArgument);
    config.missing = MissingSpec{0.2, 1.0};
    CHECK_THROWS_AS(generate_dataset(config), pskm::InvalidArgument);
}

#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include <Eigen/Dense>

namespace pskm {

// Noise processes for the synthetic benchmark: independent draws, or an
// AR(1) process with the given lag-1 correlation. The marginal standard
// deviation equals sigma_eps in all three cases (the AR(1) innovations
// are scaled by sqrt(1 - rho^2) and the chain starts stationary).
enum class NoiseScenario { Iid, Ar05, Ar09 };

double noise_autocorrelation(NoiseScenario scenario);

inline constexpr int kNumClasses = 6;

// Mean curve for class `cls` (0..5) at x in [0, 1], with per-series
// amplitude alpha and offset beta.
double class_signal(int cls, double alpha, double beta, double x);

struct MissingSpec {
    double min_fraction = 0.10;
    double max_fraction = 0.50;
};

struct SimConfig {
    int n_points = 100;
    std::array<int, kNumClasses> class_sizes{90, 50, 100, 25, 60, 35};
    NoiseScenario scenario = NoiseScenario::Iid;
    std::optional<MissingSpec> missing;  // nullopt: fully observed
    std::uint64_t seed = 0;
    // When set, the amplitude/offset spreads are redrawn for every series
    // instead of once per dataset.
    bool redraw_sigmas_per_series = false;
};

struct SeriesDraws {
    double alpha = 0.0;
    double beta = 0.0;
    double sigma_eps = 0.0;
};

struct SimDataset {
    Eigen::VectorXd x;                                  // shared time grid
    Eigen::MatrixXd y;                                  // n_points x n_series
    Eigen::Array<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic> observed;
    std::vector<int> true_labels;                       // class per column
    std::vector<SeriesDraws> draws;                     // per column
    double sigma_alpha = 0.0;                           // NaN when redrawn per series
    double sigma_beta = 0.0;
    int n_clamped_missing = 0;  // series whose missing count was capped

    int n_series() const { return static_cast<int>(y.cols()); }
};

SimDataset generate_dataset(const SimConfig& config);

}  // namespace pskm

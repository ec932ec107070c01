#include "pskm/simgen.hpp"

#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "pskm/errors.hpp"
#include "pskm/rng.hpp"

namespace pskm {

double noise_autocorrelation(NoiseScenario scenario) {
    switch (scenario) {
        case NoiseScenario::Iid: return 0.0;
        case NoiseScenario::Ar05: return 0.5;
        case NoiseScenario::Ar09: return 0.9;
    }
    throw InvalidArgument("unknown noise scenario");
}

double class_signal(int cls, double alpha, double beta, double x) {
    if (!(x >= 0.0 && x <= 1.0))
        throw InvalidArgument("signal abscissa must lie in [0, 1], got " + std::to_string(x));
    constexpr double pi = 3.14159265358979323846;
    switch (cls) {
        case 0: return alpha * std::sin(4.0 * pi * x) + beta;
        case 1: return alpha * std::pow(x + 0.73, 3) + beta;
        case 2: return alpha * std::pow(x + 0.5, -1.5) + beta;
        case 3: return alpha * std::cos(2.0 * pi * x) + beta;
        case 4: return alpha * std::exp(-6.0 * x) + beta;
        case 5: return -alpha * (x - 0.5) + beta;
        default:
            throw InvalidArgument("class index must lie in [0, " +
                                  std::to_string(kNumClasses - 1) + "], got " +
                                  std::to_string(cls));
    }
}

namespace {

void validate_config(const SimConfig& config) {
    if (config.n_points < 4)
        throw InvalidArgument("need at least 4 time points, got " +
                              std::to_string(config.n_points));
    for (int size : config.class_sizes)
        if (size < 0) throw InvalidArgument("class sizes must be nonnegative");
    const int total = std::accumulate(config.class_sizes.begin(), config.class_sizes.end(), 0);
    if (total < 1) throw InvalidArgument("dataset must contain at least one series");
    if (config.missing) {
        const auto& m = *config.missing;
        if (!(m.min_fraction >= 0.0 && m.max_fraction < 1.0 &&
              m.min_fraction <= m.max_fraction))
            throw InvalidArgument("missing fractions must satisfy 0 <= min <= max < 1");
    }
}

}  // namespace

SimDataset generate_dataset(const SimConfig& config) {
    validate_config(config);
    const int n = config.n_points;
    const int n_series =
        std::accumulate(config.class_sizes.begin(), config.class_sizes.end(), 0);
    Rng rng(config.seed);

    SimDataset out;
    out.x = Eigen::VectorXd::LinSpaced(n, 0.0, 1.0);
    out.y.resize(n, n_series);
    out.observed = Eigen::Array<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic>::Constant(
        n, n_series, 1);
    out.true_labels.reserve(static_cast<std::size_t>(n_series));
    out.draws.reserve(static_cast<std::size_t>(n_series));

    double sigma_alpha = std::numeric_limits<double>::quiet_NaN();
    double sigma_beta = std::numeric_limits<double>::quiet_NaN();
    if (!config.redraw_sigmas_per_series) {
        sigma_alpha = rng.uniform(0.3, 1.0);
        sigma_beta = rng.uniform(0.3, 1.0);
    }
    out.sigma_alpha = sigma_alpha;
    out.sigma_beta = sigma_beta;

    const double rho = noise_autocorrelation(config.scenario);
    const double innovation_scale = std::sqrt(1.0 - rho * rho);

    int col = 0;
    for (int cls = 0; cls < kNumClasses; ++cls) {
        for (int s = 0; s < config.class_sizes[static_cast<std::size_t>(cls)]; ++s, ++col) {
            double sa = sigma_alpha;
            double sb = sigma_beta;
            if (config.redraw_sigmas_per_series) {
                sa = rng.uniform(0.3, 1.0);
                sb = rng.uniform(0.3, 1.0);
            }
            SeriesDraws d;
            d.alpha = rng.normal(4.0, sa);
            d.beta = rng.normal(0.0, sb);
            d.sigma_eps = rng.uniform(0.0, 0.5);

            double noise = d.sigma_eps * rng.normal();
            for (int j = 0; j < n; ++j) {
                if (j > 0) {
                    noise = (rho == 0.0)
                                ? d.sigma_eps * rng.normal()
                                : rho * noise + d.sigma_eps * innovation_scale * rng.normal();
                }
                out.y(j, col) = class_signal(cls, d.alpha, d.beta, out.x(j)) + noise;
            }
            out.true_labels.push_back(cls);
            out.draws.push_back(d);
        }
    }

    if (config.missing) {
        for (int c = 0; c < n_series; ++c) {
            const double frac =
                rng.uniform(config.missing->min_fraction, config.missing->max_fraction);
            auto n_miss = static_cast<int>(std::llround(frac * n));
            if (n_miss > n - 4) {
                n_miss = n - 4;
                ++out.n_clamped_missing;
            }
            if (n_miss <= 0) continue;
            // Partial Fisher-Yates: the first n_miss entries of a shuffled
            // index vector give the missing positions.
            std::vector<int> idx(static_cast<std::size_t>(n));
            std::iota(idx.begin(), idx.end(), 0);
            for (int j = 0; j < n_miss; ++j) {
                const auto pick =
                    j + static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(n - j)));
                std::swap(idx[static_cast<std::size_t>(j)], idx[static_cast<std::size_t>(pick)]);
                out.observed(idx[static_cast<std::size_t>(j)], c) = 0;
            }
        }
    }

    return out;
}

}  // namespace pskm

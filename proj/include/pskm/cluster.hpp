#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace pskm {

// Spline-coefficient vectors to cluster, one column per series.
struct CoefficientMatrix {
    Eigen::MatrixXd values;  // n_coef x n_series
    std::vector<std::string> series_ids;

    int n_series() const { return static_cast<int>(values.cols()); }
    int n_coef() const { return static_cast<int>(values.rows()); }
};

enum class Distance { SqEuclid, Pearson };

struct Partition {
    std::vector<int> labels;     // cluster per series, in [0, k)
    Eigen::MatrixXd centroids;   // n_coef x k, coordinatewise means
    double objective = 0.0;      // sum of distances to assigned centroids
    int n_iterations = 0;
    int restart_index = 0;       // which restart produced this partition
    std::uint64_t seed = 0;      // that restart's seed
    // Correlation evaluations that fell back to the maximal distance 2
    // because one side was constant.
    std::int64_t n_degenerate_distances = 0;
};

struct KMeansOptions {
    int k = 2;
    Distance distance = Distance::SqEuclid;
    int restarts = 50;
    int max_iter = 300;
    std::uint64_t seed = 0;
    // Default start assigns columns to clusters uniformly at random;
    // this switches to distance-weighted seeding of initial centroids.
    bool plus_plus_init = false;
};

// Seed of restart r under a base seed; kmeans() derives its runs from
// this, so kmeans_single(data, opts, r, restart_seed(opts.seed, r))
// reproduces restart r exactly.
std::uint64_t restart_seed(std::uint64_t base_seed, int restart);

double dist_sq_euclid(std::span<const double> a, std::span<const double> b);

// 1 - correlation(a, b), in [0, 2]. Throws ZeroVariance when either
// vector is constant (relative tolerance 1e-14).
double dist_pearson(std::span<const double> a, std::span<const double> b);

// Coordinatewise means of the columns assigned to each cluster; an empty
// cluster keeps a zero column.
Eigen::MatrixXd update_centroids(const Eigen::MatrixXd& data, std::span<const int> labels, int k);

// One seeded run. When objective_trace is non-null it receives the
// objective after every assignment/update round (a nonincreasing
// sequence). Exposed for tests; kmeans() is the normal entry point.
Partition kmeans_single(const CoefficientMatrix& data, const KMeansOptions& opts,
                        int restart_index, std::uint64_t restart_seed,
                        std::vector<double>* objective_trace = nullptr);

// Best of opts.restarts seeded runs by lowest objective (ties to the
// lower restart index). Restarts run in parallel when OpenMP is enabled;
// the result is identical to kmeans_ref for equal inputs.
Partition kmeans(const CoefficientMatrix& data, const KMeansOptions& opts);

// Serial reference: same restarts, one after another.
Partition kmeans_ref(const CoefficientMatrix& data, const KMeansOptions& opts);

}  // namespace pskm

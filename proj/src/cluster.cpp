#include "pskm/cluster.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "pskm/errors.hpp"
#include "pskm/rng.hpp"

namespace pskm {

namespace {

// Stream tag separating restart seeds from other consumers of a base seed.
constexpr std::uint64_t kRestartStream = 0x6b6d65616e73ULL;  // "kmeans"

constexpr double kVarianceTol = 1e-14;

}  // namespace

std::uint64_t restart_seed(std::uint64_t base_seed, int restart) {
    return split_seed(base_seed, kRestartStream, static_cast<std::uint64_t>(restart));
}

namespace {

bool effectively_constant(const Eigen::VectorXd& centered, double max_abs, Eigen::Index n) {
    const double scale = std::max(1.0, max_abs);
    return centered.squaredNorm() <= kVarianceTol * kVarianceTol * scale * scale *
                                        static_cast<double>(n);
}

// Standardized copies of the columns: centered and scaled to unit norm.
// degenerate[j] marks columns that are constant up to tolerance; their
// z-column is left zero and every distance involving them is 2.
struct StandardizedColumns {
    Eigen::MatrixXd z;
    std::vector<std::uint8_t> degenerate;
};

StandardizedColumns standardize_columns(const Eigen::MatrixXd& data) {
    StandardizedColumns out;
    out.z = Eigen::MatrixXd::Zero(data.rows(), data.cols());
    out.degenerate.assign(static_cast<std::size_t>(data.cols()), 0);
    for (Eigen::Index j = 0; j < data.cols(); ++j) {
        const Eigen::VectorXd centered = data.col(j).array() - data.col(j).mean();
        if (effectively_constant(centered, data.col(j).cwiseAbs().maxCoeff(), data.rows())) {
            out.degenerate[static_cast<std::size_t>(j)] = 1;
            continue;
        }
        out.z.col(j) = centered / centered.norm();
    }
    return out;
}

struct KMeansProblem {
    const Eigen::MatrixXd& data;
    Distance distance;
    StandardizedColumns z;  // populated for Pearson only
};

// Distances from every column to every centroid; counts fallback
// evaluations against degenerate columns or centroids.
void distance_matrix(const KMeansProblem& problem, const Eigen::MatrixXd& centroids,
                     Eigen::MatrixXd& dists, std::int64_t& n_degenerate) {
    const Eigen::Index n = problem.data.cols();
    const Eigen::Index k = centroids.cols();
    dists.resize(n, k);
    if (problem.distance == Distance::SqEuclid) {
        // ||a - c||^2 = ||a||^2 - 2 a.c + ||c||^2 column by column.
        const Eigen::VectorXd data_sq = problem.data.colwise().squaredNorm();
        const Eigen::VectorXd cent_sq = centroids.colwise().squaredNorm();
        dists.noalias() = -2.0 * problem.data.transpose() * centroids;
        dists.colwise() += data_sq;
        dists.rowwise() += cent_sq.transpose();
        dists = dists.cwiseMax(0.0);
        return;
    }
    Eigen::MatrixXd cz = Eigen::MatrixXd::Zero(centroids.rows(), k);
    std::vector<std::uint8_t> cent_degenerate(static_cast<std::size_t>(k), 0);
    for (Eigen::Index c = 0; c < k; ++c) {
        const Eigen::VectorXd centered = centroids.col(c).array() - centroids.col(c).mean();
        if (effectively_constant(centered, centroids.col(c).cwiseAbs().maxCoeff(),
                                 centroids.rows())) {
            cent_degenerate[static_cast<std::size_t>(c)] = 1;
            continue;
        }
        cz.col(c) = centered / centered.norm();
    }
    dists.noalias() = -problem.z.z.transpose() * cz;
    dists.array() += 1.0;
    dists = dists.cwiseMax(0.0).cwiseMin(2.0);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index c = 0; c < k; ++c)
            if (problem.z.degenerate[static_cast<std::size_t>(i)] ||
                cent_degenerate[static_cast<std::size_t>(c)]) {
                dists(i, c) = 2.0;
                ++n_degenerate;
            }
}

// Uniform random cluster per column, then fix empty clusters by stealing
// a random member of the currently largest cluster.
std::vector<int> random_partition(int n, int k, Rng& rng) {
    std::vector<int> labels(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) labels[static_cast<std::size_t>(i)] = static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(k)));
    std::vector<int> sizes(static_cast<std::size_t>(k), 0);
    for (int lab : labels) ++sizes[static_cast<std::size_t>(lab)];
    for (int c = 0; c < k; ++c) {
        if (sizes[static_cast<std::size_t>(c)] > 0) continue;
        const int donor = static_cast<int>(
            std::max_element(sizes.begin(), sizes.end()) - sizes.begin());
        std::vector<int> members;
        for (int i = 0; i < n; ++i)
            if (labels[static_cast<std::size_t>(i)] == donor) members.push_back(i);
        const int pick = members[static_cast<std::size_t>(rng.uniform_int(members.size()))];
        labels[static_cast<std::size_t>(pick)] = c;
        --sizes[static_cast<std::size_t>(donor)];
        ++sizes[static_cast<std::size_t>(c)] ;
    }
    return labels;
}

// Distance-weighted seeding: pick k columns as provisional centroids,
// each subsequent one with probability proportional to its distance from
// the nearest centroid so far, then label columns by nearest centroid.
std::vector<int> plus_plus_partition(const KMeansProblem& problem, int k, Rng& rng,
                                     std::int64_t& n_degenerate) {
    const Eigen::Index n = problem.data.cols();
    std::vector<Eigen::Index> picked;
    picked.push_back(static_cast<Eigen::Index>(rng.uniform_int(static_cast<std::uint64_t>(n))));
    Eigen::MatrixXd dists;
    while (static_cast<int>(picked.size()) < k) {
        Eigen::MatrixXd centroids(problem.data.rows(), static_cast<Eigen::Index>(picked.size()));
        for (std::size_t c = 0; c < picked.size(); ++c) centroids.col(static_cast<Eigen::Index>(c)) = problem.data.col(picked[c]);
        distance_matrix(problem, centroids, dists, n_degenerate);
        const Eigen::VectorXd nearest = dists.rowwise().minCoeff();
        const double total = nearest.sum();
        Eigen::Index next;
        if (total > 0.0) {
            double target = rng.uniform() * total;
            next = n - 1;
            for (Eigen::Index i = 0; i < n; ++i) {
                target -= nearest(i);
                if (target <= 0.0) {
                    next = i;
                    break;
                }
            }
        } else {
            next = static_cast<Eigen::Index>(rng.uniform_int(static_cast<std::uint64_t>(n)));
        }
        picked.push_back(next);
    }
    Eigen::MatrixXd centroids(problem.data.rows(), k);
    for (int c = 0; c < k; ++c) centroids.col(c) = problem.data.col(picked[static_cast<std::size_t>(c)]);
    distance_matrix(problem, centroids, dists, n_degenerate);
    std::vector<int> labels(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) {
        Eigen::Index best;
        dists.row(i).minCoeff(&best);
        labels[static_cast<std::size_t>(i)] = static_cast<int>(best);
    }
    return labels;
}

void validate_inputs(const CoefficientMatrix& data, const KMeansOptions& opts) {
    const int n = data.n_series();
    if (n == 0 || data.n_coef() == 0) throw InvalidArgument("clustering input is empty");
    if (!data.series_ids.empty() && static_cast<int>(data.series_ids.size()) != n)
        throw InvalidArgument("series id count does not match column count");
    if (!(opts.k > 1 && opts.k < n))
        throw InvalidArgument("cluster count must satisfy 1 < k < " + std::to_string(n) +
                              ", got " + std::to_string(opts.k));
    if (opts.restarts < 1)
        throw InvalidArgument("restarts must be >= 1, got " + std::to_string(opts.restarts));
    if (opts.max_iter < 1)
        throw InvalidArgument("max_iter must be >= 1, got " + std::to_string(opts.max_iter));
    if (opts.distance == Distance::Pearson && data.n_coef() < 2)
        throw InvalidArgument("correlation distance needs at least 2 coefficients per series");
    if (!data.values.allFinite())
        throw InvalidArgument("clustering input contains non-finite values");
}

}  // namespace

double dist_sq_euclid(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size())
        throw InvalidArgument("vector lengths differ: " + std::to_string(a.size()) + " vs " +
                              std::to_string(b.size()));
    if (a.empty()) throw InvalidArgument("empty vectors have no distance");
    double sum = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double diff = a[i] - b[i];
        sum += diff * diff;
    }
    return sum;
}

double dist_pearson(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size())
        throw InvalidArgument("vector lengths differ: " + std::to_string(a.size()) + " vs " +
                              std::to_string(b.size()));
    if (a.size() < 2) throw InvalidArgument("correlation needs at least 2 entries");

    const auto n = static_cast<Eigen::Index>(a.size());
    const Eigen::Map<const Eigen::VectorXd> va(a.data(), n);
    const Eigen::Map<const Eigen::VectorXd> vb(b.data(), n);
    const Eigen::VectorXd ca = va.array() - va.mean();
    const Eigen::VectorXd cb = vb.array() - vb.mean();
    if (effectively_constant(ca, va.cwiseAbs().maxCoeff(), n) ||
        effectively_constant(cb, vb.cwiseAbs().maxCoeff(), n))
        throw ZeroVariance("correlation against a constant vector is undefined");
    const double rho = ca.dot(cb) / (ca.norm() * cb.norm());
    return 1.0 - std::clamp(rho, -1.0, 1.0);
}

Eigen::MatrixXd update_centroids(const Eigen::MatrixXd& data, std::span<const int> labels,
                                 int k) {
    if (static_cast<Eigen::Index>(labels.size()) != data.cols())
        throw InvalidArgument("label count does not match column count");
    if (k < 1) throw InvalidArgument("k must be >= 1");
    Eigen::MatrixXd centroids = Eigen::MatrixXd::Zero(data.rows(), k);
    std::vector<std::int64_t> sizes(static_cast<std::size_t>(k), 0);
    for (Eigen::Index j = 0; j < data.cols(); ++j) {
        const int lab = labels[static_cast<std::size_t>(j)];
        if (lab < 0 || lab >= k)
            throw InvalidArgument("label " + std::to_string(lab) + " outside [0, " +
                                  std::to_string(k) + ")");
        centroids.col(lab) += data.col(j);
        ++sizes[static_cast<std::size_t>(lab)];
    }
    for (int c = 0; c < k; ++c)
        if (sizes[static_cast<std::size_t>(c)] > 0)
            centroids.col(c) /= static_cast<double>(sizes[static_cast<std::size_t>(c)]);
    return centroids;
}

Partition kmeans_single(const CoefficientMatrix& data, const KMeansOptions& opts,
                        int restart_index, std::uint64_t restart_seed,
                        std::vector<double>* objective_trace) {
    validate_inputs(data, opts);
    const int n = data.n_series();
    const int k = opts.k;
    Rng rng(restart_seed);

    KMeansProblem problem{data.values, opts.distance, {}};
    if (opts.distance == Distance::Pearson) problem.z = standardize_columns(data.values);

    std::int64_t n_degenerate = 0;
    std::vector<int> labels = opts.plus_plus_init
                                  ? plus_plus_partition(problem, k, rng, n_degenerate)
                                  : random_partition(n, k, rng);

    Eigen::MatrixXd centroids = update_centroids(data.values, labels, k);
    Eigen::MatrixXd dists;
    int iterations = 0;
    for (int iter = 1; iter <= opts.max_iter; ++iter) {
        iterations = iter;
        distance_matrix(problem, centroids, dists, n_degenerate);

        bool changed = false;
        std::vector<double> assigned(static_cast<std::size_t>(n));
        std::vector<int> sizes(static_cast<std::size_t>(k), 0);
        for (int i = 0; i < n; ++i) {
            Eigen::Index best;
            dists.row(i).minCoeff(&best);
            if (static_cast<int>(best) != labels[static_cast<std::size_t>(i)]) changed = true;
            labels[static_cast<std::size_t>(i)] = static_cast<int>(best);
            assigned[static_cast<std::size_t>(i)] = dists(i, best);
            ++sizes[static_cast<std::size_t>(best)];
        }

        // Reseed empty clusters with the column farthest from its
        // assigned centroid; donors must keep at least one member, which
        // guarantees the repair never cascades into a new empty cluster.
        for (int c = 0; c < k; ++c) {
            if (sizes[static_cast<std::size_t>(c)] > 0) continue;
            int far = -1;
            double far_dist = -1.0;
            for (int i = 0; i < n; ++i) {
                if (sizes[static_cast<std::size_t>(labels[static_cast<std::size_t>(i)])] < 2)
                    continue;
                if (assigned[static_cast<std::size_t>(i)] > far_dist) {
                    far_dist = assigned[static_cast<std::size_t>(i)];
                    far = i;
                }
            }
            if (far < 0) break;  // k >= n would be required; guarded against upstream
            --sizes[static_cast<std::size_t>(labels[static_cast<std::size_t>(far)])];
            labels[static_cast<std::size_t>(far)] = c;
            ++sizes[static_cast<std::size_t>(c)];
            assigned[static_cast<std::size_t>(far)] = 0.0;
            changed = true;
        }

        centroids = update_centroids(data.values, labels, k);
        if (objective_trace) {
            Eigen::MatrixXd final_dists;
            std::int64_t scratch = 0;
            distance_matrix(problem, centroids, final_dists, scratch);
            double objective = 0.0;
            for (int i = 0; i < n; ++i)
                objective += final_dists(i, labels[static_cast<std::size_t>(i)]);
            objective_trace->push_back(objective);
        }
        if (!changed) break;
    }

    distance_matrix(problem, centroids, dists, n_degenerate);
    double objective = 0.0;
    for (int i = 0; i < n; ++i) objective += dists(i, labels[static_cast<std::size_t>(i)]);

    Partition part;
    part.labels = std::move(labels);
    part.centroids = std::move(centroids);
    part.objective = objective;
    part.n_iterations = iterations;
    part.restart_index = restart_index;
    part.seed = restart_seed;
    part.n_degenerate_distances = n_degenerate;
    return part;
}

namespace {

Partition kmeans_impl(const CoefficientMatrix& data, const KMeansOptions& opts, bool parallel) {
    validate_inputs(data, opts);
    std::vector<Partition> runs(static_cast<std::size_t>(opts.restarts));
#pragma omp parallel for schedule(dynamic) if (parallel)
    for (int r = 0; r < opts.restarts; ++r)
        runs[static_cast<std::size_t>(r)] =
            kmeans_single(data, opts, r, restart_seed(opts.seed, r));
    // Ascending scan with strict < keeps the lowest restart index on ties.
    std::size_t best = 0;
    for (std::size_t r = 1; r < runs.size(); ++r)
        if (runs[r].objective < runs[best].objective) best = r;
    return std::move(runs[best]);
}

}  // namespace

Partition kmeans(const CoefficientMatrix& data, const KMeansOptions& opts) {
    return kmeans_impl(data, opts, true);
}

Partition kmeans_ref(const CoefficientMatrix& data, const KMeansOptions& opts) {
    return kmeans_impl(data, opts, false);
}

}  // namespace pskm

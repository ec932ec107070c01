#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "pskm/cluster.hpp"
#include "pskm/errors.hpp"
#include "pskm/metrics.hpp"
#include "pskm/rng.hpp"

using pskm::CoefficientMatrix;
using pskm::dist_pearson;
using pskm::dist_sq_euclid;
using pskm::Distance;
using pskm::kmeans;
using pskm::kmeans_ref;
using pskm::kmeans_single;
using pskm::KMeansOptions;
using pskm::Partition;
using pskm::update_centroids;

namespace {

// Three well-separated blobs in 5 dimensions, 20 columns each.
CoefficientMatrix make_blobs(std::uint64_t seed, double spread = 0.1) {
    pskm::Rng rng(seed);
    CoefficientMatrix data;
    data.values.resize(5, 60);
    const double centers[3][5] = {{5, 0, 0, 2, -1}, {0, 5, -3, 0, 1}, {-4, -4, 2, 1, 3}};
    for (int j = 0; j < 60; ++j) {
        const int cls = j / 20;
        for (int r = 0; r < 5; ++r)
            data.values(r, j) = centers[cls][r] + spread * rng.normal();
    }
    return data;
}

std::vector<int> blob_truth() {
    std::vector<int> t(60);
    for (int j = 0; j < 60; ++j) t[static_cast<std::size_t>(j)] = j / 20;
    return t;
}

}  // namespace

TEST_CASE("squared euclidean distance") {
    const std::vector<double> a{1.0, 2.0, 3.0};
    const std::vector<double> b{2.0, 0.0, 3.0};
    CHECK(dist_sq_euclid(a, b) == doctest::Approx(5.0));
    CHECK(dist_sq_euclid(a, a) == doctest::Approx(0.0));
    const std::vector<double> shorter{1.0};
    CHECK_THROWS_AS(dist_sq_euclid(a, shorter), pskm::InvalidArgument);
}

TEST_CASE("correlation distance is shift and scale invariant") {
    const std::vector<double> a{1.0, 2.0, 4.0, 3.0};
    std::vector<double> b(4);
    for (int i = 0; i < 4; ++i) b[static_cast<std::size_t>(i)] = 7.0 * a[static_cast<std::size_t>(i)] - 3.0;
    CHECK(dist_pearson(a, b) == doctest::Approx(0.0).epsilon(1e-12));

    std::vector<double> c(4);
    for (int i = 0; i < 4; ++i) c[static_cast<std::size_t>(i)] = -2.0 * a[static_cast<std::size_t>(i)] + 1.0;
    CHECK(dist_pearson(a, c) == doctest::Approx(2.0).epsilon(1e-12));

    const std::vector<double> flat{3.0, 3.0, 3.0, 3.0};
    CHECK_THROWS_AS(dist_pearson(a, flat), pskm::ZeroVariance);
    const std::vector<double> shorter{1.0, 2.0};
    CHECK_THROWS_AS(dist_pearson(a, shorter), pskm::InvalidArgument);
}

TEST_CASE("centroid update averages each cluster") {
    Eigen::MatrixXd data(2, 4);
    data << 1, 3, 10, 20, 2, 4, 10, 30;
    const std::vector<int> labels{0, 0, 2, 2};
    const auto centroids = update_centroids(data, labels, 3);
    CHECK(centroids(0, 0) == doctest::Approx(2.0));
    CHECK(centroids(1, 0) == doctest::Approx(3.0));
    CHECK(centroids(0, 1) == doctest::Approx(0.0));  // empty cluster stays zero
    CHECK(centroids(0, 2) == doctest::Approx(15.0));
    CHECK(centroids(1, 2) == doctest::Approx(20.0));

    const std::vector<int> bad{0, 0, 3, 2};
    CHECK_THROWS_AS(update_centroids(data, bad, 3), pskm::InvalidArgument);
    const std::vector<int> wrong_len{0, 0, 1};
    CHECK_THROWS_AS(update_centroids(data, wrong_len, 3), pskm::InvalidArgument);
}

TEST_CASE("well separated blobs are recovered exactly") {
    const auto data = make_blobs(17);
    for (const Distance dist : {Distance::SqEuclid, Distance::Pearson}) {
        KMeansOptions opts;
        opts.k = 3;
        opts.distance = dist;
        opts.restarts = 20;
        opts.seed = 3;
        const Partition part = kmeans(data, opts);
        CHECK(pskm::adjusted_rand_index(blob_truth(), part.labels) == doctest::Approx(1.0));
        CHECK(part.n_iterations >= 1);
        CHECK(part.objective >= 0.0);
    }
}

TEST_CASE("objective descends monotonically under the euclidean update") {
    pskm::Rng rng(909);
    CoefficientMatrix data;
    data.values.resize(8, 120);
    for (Eigen::Index j = 0; j < 120; ++j)
        for (Eigen::Index r = 0; r < 8; ++r) data.values(r, j) = rng.normal();
    KMeansOptions opts;
    opts.k = 5;
    opts.distance = Distance::SqEuclid;
    for (int restart = 0; restart < 10; ++restart) {
        std::vector<double> trace;
        const Partition part = kmeans_single(data, opts, restart,
                                             pskm::split_seed(11, 0, restart), &trace);
        REQUIRE(!trace.empty());
        for (std::size_t t = 1; t < trace.size(); ++t)
            CHECK(trace[t] <= trace[t - 1] + 1e-9 * std::max(1.0, trace[t - 1]));
        CHECK(part.objective == doctest::Approx(trace.back()).epsilon(1e-12));
    }
}

TEST_CASE("the returned partition is the best restart with lowest index on ties") {
    const auto data = make_blobs(23, 1.2);  // noisy enough for varied local minima
    KMeansOptions opts;
    opts.k = 3;
    opts.distance = Distance::SqEuclid;
    opts.restarts = 16;
    opts.seed = 99;
    const Partition best = kmeans(data, opts);
    double lowest = std::numeric_limits<double>::infinity();
    int lowest_index = -1;
    for (int r = 0; r < opts.restarts; ++r) {
        const Partition single =
            kmeans_single(data, opts, r, pskm::restart_seed(opts.seed, r));
        if (single.objective < lowest) {
            lowest = single.objective;
            lowest_index = r;
        }
    }
    CHECK(best.objective == doctest::Approx(lowest).epsilon(1e-12));
    CHECK(best.restart_index == lowest_index);
}

TEST_CASE("parallel and serial drivers agree bit for bit") {
    const auto data = make_blobs(31, 0.8);
    for (const Distance dist : {Distance::SqEuclid, Distance::Pearson}) {
        KMeansOptions opts;
        opts.k = 4;
        opts.distance = dist;
        opts.restarts = 12;
        opts.seed = 7;
        const Partition a = kmeans(data, opts);
        const Partition b = kmeans_ref(data, opts);
        CHECK(a.labels == b.labels);
        CHECK(a.objective == b.objective);
        CHECK(a.restart_index == b.restart_index);
        CHECK((a.centroids - b.centroids).cwiseAbs().maxCoeff() == 0.0);
    }
}

TEST_CASE("constant columns fall back to the maximum correlation distance") {
    auto data = make_blobs(41);
    data.values.col(5).setConstant(2.0);
    KMeansOptions opts;
    opts.k = 3;
    opts.distance = Distance::Pearson;
    opts.restarts = 8;
    opts.seed = 19;
    const Partition part = kmeans(data, opts);
    CHECK(part.n_degenerate_distances > 0);
    CHECK(part.labels.size() == 60);
    // All other columns still cluster cleanly.
    std::vector<int> truth = blob_truth(), got = part.labels;
    truth.erase(truth.begin() + 5);
    got.erase(got.begin() + 5);
    CHECK(pskm::adjusted_rand_index(truth, got) == doctest::Approx(1.0));
}

TEST_CASE("distance-weighted seeding also recovers the blobs") {
    const auto data = make_blobs(53);
    KMeansOptions opts;
    opts.k = 3;
    opts.distance = Distance::Pearson;
    opts.restarts = 8;
    opts.seed = 2;
    opts.plus_plus_init = true;
    const Partition part = kmeans(data, opts);
    CHECK(pskm::adjusted_rand_index(blob_truth(), part.labels) == doctest::Approx(1.0));
}

TEST_CASE("option validation") {
    const auto data = make_blobs(61);
    KMeansOptions opts;
    opts.k = 1;
    CHECK_THROWS_AS(kmeans(data, opts), pskm::InvalidArgument);
    opts.k = 60;
    CHECK_THROWS_AS(kmeans(data, opts), pskm::InvalidArgument);
    opts.k = 3;
    opts.restarts = 0;
    CHECK_THROWS_AS(kmeans(data, opts), pskm::InvalidArgument);
    opts.restarts = 5;
    opts.max_iter = 0;
    CHECK_THROWS_AS(kmeans(data, opts), pskm::InvalidArgument);

    CoefficientMatrix bad = make_blobs(61);
    bad.values(2, 2) = std::nan("");
    KMeansOptions ok;
    ok.k = 3;
    CHECK_THROWS_AS(kmeans(bad, ok), pskm::InvalidArgument);

    CoefficientMatrix empty;
    CHECK_THROWS_AS(kmeans(empty, ok), pskm::InvalidArgument);
}

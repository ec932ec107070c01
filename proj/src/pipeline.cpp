#include "pskm/pipeline.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>

#include "pskm/errors.hpp"
#include "pskm/metrics.hpp"
#include "pskm/rng.hpp"

namespace pskm {

namespace {

constexpr std::uint64_t kDatasetStream = 0x64617461ULL;   // "data"
constexpr std::uint64_t kClusterStream = 0x636c7573ULL;   // "clus"

}  // namespace

std::uint64_t replicate_seed(std::uint64_t base_seed, int replicate) {
    return split_seed(base_seed, kDatasetStream, static_cast<std::uint64_t>(replicate));
}

std::uint64_t cluster_seed(std::uint64_t base_seed, int replicate) {
    return split_seed(base_seed, kClusterStream, static_cast<std::uint64_t>(replicate));
}

int SmoothBatchResult::n_ok() const {
    int count = 0;
    for (const auto& fit : fits)
        if (fit) ++count;
    return count;
}

namespace {

void validate_smooth_options(const SmoothOptions& options) {
    if (options.fixed_lambda) {
        if (!(*options.fixed_lambda >= 0.0) || !std::isfinite(*options.fixed_lambda))
            throw InvalidArgument("fixed lambda must be finite and >= 0");
    } else if (options.lambdas.size() < 3) {
        throw InvalidArgument("selection grid needs at least 3 lambda values");
    }
}

SmoothBatchResult smooth_batch_impl(const SeriesTable& table, const SmoothOptions& options,
                                    bool parallel) {
    validate_smooth_options(options);
    if (table.n_points() < 1 || table.n_series() < 1)
        throw InvalidArgument("series table is empty");
    const double lo = table.time.front();
    const double hi = table.time.back();

    SmoothBatchResult result;
    result.grid = make_knots(lo, hi, options.n_segments, options.degree);
    const int n = table.n_series();
    result.fits.assign(static_cast<std::size_t>(n), std::nullopt);
    result.lambdas.assign(static_cast<std::size_t>(n),
                          std::numeric_limits<double>::quiet_NaN());
    result.used_fallback.assign(static_cast<std::size_t>(n), 0);
    std::vector<std::string> reasons(static_cast<std::size_t>(n));

#pragma omp parallel for schedule(dynamic) if (parallel)
    for (int j = 0; j < n; ++j) {
        try {
            const Series series = series_column(table, j);
            PenalizedSolver solver(series, result.grid, options.penalty_order);
            double lambda;
            if (options.fixed_lambda) {
                lambda = *options.fixed_lambda;
            } else {
                try {
                    const VCurveTrace trace =
                        vcurve_trace_with(solver, options.lambdas);
                    lambda = trace.lambda_star;
                } catch (const DegenerateRoughness&) {
                    lambda = options.lambdas.back();
                    result.used_fallback[static_cast<std::size_t>(j)] = 1;
                }
            }
            result.fits[static_cast<std::size_t>(j)] = solver.solve(lambda);
            result.lambdas[static_cast<std::size_t>(j)] = lambda;
        } catch (const Error& e) {
            reasons[static_cast<std::size_t>(j)] = e.what();
        }
    }

    for (int j = 0; j < n; ++j)
        if (!result.fits[static_cast<std::size_t>(j)])
            result.failures.push_back(
                {j, table.ids[static_cast<std::size_t>(j)], reasons[static_cast<std::size_t>(j)]});
    return result;
}

}  // namespace

SmoothBatchResult smooth_batch(const SeriesTable& table, const SmoothOptions& options) {
    return smooth_batch_impl(table, options, true);
}

SmoothBatchResult smooth_batch_ref(const SeriesTable& table, const SmoothOptions& options) {
    return smooth_batch_impl(table, options, false);
}

CoefficientMatrix coefficient_matrix(const SeriesTable& table,
                                     const SmoothBatchResult& result) {
    const int n_ok = result.n_ok();
    if (n_ok == 0) throw InvalidArgument("no series was fit successfully");
    CoefficientMatrix coef;
    coef.values.resize(result.grid.n_basis(), n_ok);
    coef.series_ids.reserve(static_cast<std::size_t>(n_ok));
    int out = 0;
    for (std::size_t j = 0; j < result.fits.size(); ++j) {
        if (!result.fits[j]) continue;
        coef.values.col(out) = result.fits[j]->coefficients;
        coef.series_ids.push_back(table.ids[j]);
        ++out;
    }
    return coef;
}

SeriesTable to_table(const SimDataset& dataset) {
    SeriesTable table;
    table.time.assign(dataset.x.data(), dataset.x.data() + dataset.x.size());
    table.values = dataset.y;
    table.observed = dataset.observed;
    table.ids.reserve(static_cast<std::size_t>(dataset.n_series()));
    for (int j = 0; j < dataset.n_series(); ++j) table.ids.push_back("s" + std::to_string(j));
    return table;
}

ReplicateSummary run_replicates(const ReplicateOptions& options,
                                const std::function<void(const ReplicateRow&)>& on_row) {
    if (options.n_replicates < 1)
        throw InvalidArgument("need at least 1 replicate");
    ReplicateSummary summary;
    summary.rows.reserve(static_cast<std::size_t>(options.n_replicates));

    for (int rep = 0; rep < options.n_replicates; ++rep) {
        const auto start = std::chrono::steady_clock::now();

        SimConfig sim = options.sim;
        sim.seed = replicate_seed(options.base_seed, rep);
        const SimDataset dataset = generate_dataset(sim);
        const SeriesTable table = to_table(dataset);

        const SmoothBatchResult smoothed = smooth_batch(table, options.smooth);

        std::vector<int> truth;
        truth.reserve(static_cast<std::size_t>(smoothed.n_ok()));
        for (std::size_t j = 0; j < smoothed.fits.size(); ++j)
            if (smoothed.fits[j]) truth.push_back(dataset.true_labels[j]);

        KMeansOptions cluster = options.cluster;
        cluster.seed = cluster_seed(options.base_seed, rep);
        const CoefficientMatrix coef = coefficient_matrix(table, smoothed);
        const Partition part = kmeans(coef, cluster);

        ReplicateRow row;
        row.replicate = rep;
        row.ari = adjusted_rand_index(truth, part.labels);
        double lambda_sum = 0.0;
        for (double lam : smoothed.lambdas)
            if (std::isfinite(lam)) lambda_sum += lam;
        row.mean_lambda = smoothed.n_ok() > 0 ? lambda_sum / smoothed.n_ok() : 0.0;
        row.n_failed_series = static_cast<int>(smoothed.failures.size());
        row.seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

        summary.rows.push_back(row);
        if (on_row) on_row(row);
    }

    double sum = 0.0;
    for (const auto& row : summary.rows) {
        sum += row.ari;
        summary.total_seconds += row.seconds;
    }
    summary.mean_ari = sum / static_cast<double>(summary.rows.size());
    double ss = 0.0;
    for (const auto& row : summary.rows) {
        const double d = row.ari - summary.mean_ari;
        ss += d * d;
    }
    summary.sd_ari = summary.rows.size() > 1
                         ? std::sqrt(ss / static_cast<double>(summary.rows.size() - 1))
                         : 0.0;
    return summary;
}

}  // namespace pskm

#include <cstdio>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#ifdef _OPENMP
#include <omp.h>
#endif

#include "pskm/cluster.hpp"
#include "pskm/errors.hpp"
#include "pskm/io.hpp"
#include "pskm/metrics.hpp"
#include "pskm/pipeline.hpp"
#include "pskm/select.hpp"
#include "pskm/simgen.hpp"

namespace {

struct GridArgs {
    int n_segments = 25;
    int degree = 3;
    int penalty_order = 3;
    double lambda_min = 1e-5;
    double lambda_max = 1e8;
    int lambda_count = 100;
    std::optional<double> fixed_lambda;
    bool baseline = false;  // unpenalized least squares (lambda = 0)
};

void add_grid_args(CLI::App* cmd, GridArgs& args) {
    cmd->add_option("--segments", args.n_segments, "Number of basis segments")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--degree", args.degree, "Spline degree")->check(CLI::Range(0, 10));
    cmd->add_option("--penalty-order", args.penalty_order, "Difference penalty order")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--lambda-min", args.lambda_min, "Smallest grid lambda");
    cmd->add_option("--lambda-max", args.lambda_max, "Largest grid lambda");
    cmd->add_option("--lambda-count", args.lambda_count, "Grid size")
        ->check(CLI::Range(3, 100000));
    auto* fixed = cmd->add_option(
        "--lambda", args.fixed_lambda,
        "Fixed penalty weight (skips selection; may be 0 for plain least squares)");
    cmd->add_flag("--baseline", args.baseline,
                  "Unpenalized least-squares fit (same as --lambda 0)")
        ->excludes(fixed);
}

pskm::SmoothOptions to_smooth_options(const GridArgs& args) {
    pskm::SmoothOptions opts;
    opts.n_segments = args.n_segments;
    opts.degree = args.degree;
    opts.penalty_order = args.penalty_order;
    opts.lambdas = pskm::lambda_grid(args.lambda_min, args.lambda_max, args.lambda_count);
    if (args.baseline)
        opts.fixed_lambda = 0.0;
    else if (args.fixed_lambda)
        opts.fixed_lambda = *args.fixed_lambda;
    return opts;
}

pskm::NoiseScenario parse_scenario(const std::string& name) {
    if (name == "iid") return pskm::NoiseScenario::Iid;
    if (name == "ar05") return pskm::NoiseScenario::Ar05;
    if (name == "ar09") return pskm::NoiseScenario::Ar09;
    throw CLI::ValidationError("--scenario", "must be one of iid, ar05, ar09");
}

pskm::Distance parse_distance(const std::string& name) {
    if (name == "euclid") return pskm::Distance::SqEuclid;
    if (name == "pearson") return pskm::Distance::Pearson;
    throw CLI::ValidationError("--distance", "must be euclid or pearson");
}

void report_failures(const pskm::SmoothBatchResult& result) {
    for (const auto& f : result.failures)
        std::fprintf(stderr, "series %s (column %d) failed: %s\n", f.id.c_str(), f.column,
                     f.reason.c_str());
}

int run_simulate(const std::string& scenario, int n_points, std::vector<int> class_sizes,
                 bool with_missing, double missing_min, double missing_max,
                 std::uint64_t seed, const std::string& out_series,
                 const std::string& out_labels) {
    pskm::SimConfig config;
    config.scenario = parse_scenario(scenario);
    config.n_points = n_points;
    if (!class_sizes.empty()) {
        if (class_sizes.size() != pskm::kNumClasses)
            throw CLI::ValidationError("--class-sizes",
                                       "expects " + std::to_string(pskm::kNumClasses) +
                                           " comma-separated counts");
        for (int c = 0; c < pskm::kNumClasses; ++c)
            config.class_sizes[static_cast<std::size_t>(c)] =
                class_sizes[static_cast<std::size_t>(c)];
    }
    if (with_missing) config.missing = pskm::MissingSpec{missing_min, missing_max};
    config.seed = seed;

    const pskm::SimDataset dataset = pskm::generate_dataset(config);
    const pskm::SeriesTable table = pskm::to_table(dataset);
    pskm::write_series_csv(table, out_series);
    if (!out_labels.empty())
        pskm::write_labels_csv(table.ids, dataset.true_labels, out_labels);
    std::printf("wrote %d series x %d points to %s\n", table.n_series(), table.n_points(),
                out_series.c_str());
    return 0;
}

int run_smooth(const std::string& input, const GridArgs& grid, const std::string& out_dir) {
    const pskm::SeriesTable table = pskm::read_series_csv(input);
    const pskm::SmoothOptions opts = to_smooth_options(grid);
    const pskm::SmoothBatchResult result = pskm::smooth_batch(table, opts);
    report_failures(result);
    if (result.n_ok() == 0) {
        std::fprintf(stderr, "no series could be fit\n");
        return 1;
    }

    const pskm::CoefficientMatrix coef = pskm::coefficient_matrix(table, result);
    std::filesystem::create_directories(out_dir);
    pskm::write_matrix_csv(coef.values, coef.series_ids,
                           std::filesystem::path(out_dir) / "coefficients.csv");

    // Fitted curves on the input grid, one column per successful series.
    Eigen::MatrixXd fitted(table.n_points(), result.n_ok());
    std::vector<double> x(table.time.begin(), table.time.end());
    int out = 0;
    for (std::size_t j = 0; j < result.fits.size(); ++j) {
        if (!result.fits[j]) continue;
        const std::vector<double> yhat = pskm::predict(*result.fits[j], x);
        for (int i = 0; i < table.n_points(); ++i)
            fitted(i, out) = yhat[static_cast<std::size_t>(i)];
        ++out;
    }
    pskm::write_matrix_csv(fitted, coef.series_ids,
                           std::filesystem::path(out_dir) / "fitted.csv");

    Eigen::MatrixXd lam(1, result.n_ok());
    out = 0;
    for (std::size_t j = 0; j < result.fits.size(); ++j) {
        if (!result.fits[j]) continue;
        lam(0, out++) = result.lambdas[j];
    }
    pskm::write_matrix_csv(lam, coef.series_ids,
                           std::filesystem::path(out_dir) / "lambda.csv");
    std::printf("smoothed %d/%d series (%d selection fallbacks) -> %s\n", result.n_ok(),
                table.n_series(),
                static_cast<int>(std::count(result.used_fallback.begin(),
                                            result.used_fallback.end(), std::uint8_t{1})),
                out_dir.c_str());
    return result.failures.empty() ? 0 : 1;
}

int run_vcurve(const std::string& input, int column, const GridArgs& grid,
               const std::string& out_file) {
    const pskm::SeriesTable table = pskm::read_series_csv(input);
    const pskm::Series series = pskm::series_column(table, column);
    const pskm::KnotGrid knots =
        pskm::make_knots(table.time.front(), table.time.back(), grid.n_segments, grid.degree);
    const auto lambdas =
        pskm::lambda_grid(grid.lambda_min, grid.lambda_max, grid.lambda_count);
    const pskm::VCurveTrace trace =
        pskm::vcurve_trace(series, knots, grid.penalty_order, lambdas);

    std::filesystem::path path(out_file);
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::FILE* f = std::fopen(out_file.c_str(), "w");
    if (!f) throw pskm::IoError("cannot open " + out_file + " for writing");
    std::fprintf(f, "lambda,psi,phi,v\n");
    for (std::size_t i = 0; i < trace.lambdas.size(); ++i)
        std::fprintf(f, "%.17g,%.17g,%.17g,%s\n", trace.lambdas[i], trace.psi[i], trace.phi[i],
                     i + 1 < trace.lambdas.size()
                         ? std::to_string(trace.v[i]).c_str()
                         : "");
    std::fclose(f);
    std::printf("lambda_star = %.6g (interval %d) -> %s\n", trace.lambda_star,
                trace.argmin_index, out_file.c_str());
    return 0;
}

int run_cluster(const std::string& input, const GridArgs& grid, int k,
                const std::string& distance, int restarts, int max_iter, bool plus_plus,
                std::uint64_t seed, const std::string& out_dir) {
    const pskm::SeriesTable table = pskm::read_series_csv(input);
    const pskm::SmoothOptions smooth_opts = to_smooth_options(grid);
    const pskm::SmoothBatchResult smoothed = pskm::smooth_batch(table, smooth_opts);
    report_failures(smoothed);
    if (smoothed.n_ok() == 0) {
        std::fprintf(stderr, "no series could be fit\n");
        return 1;
    }
    const pskm::CoefficientMatrix coef = pskm::coefficient_matrix(table, smoothed);

    pskm::KMeansOptions opts;
    opts.k = k;
    opts.distance = parse_distance(distance);
    opts.restarts = restarts;
    opts.max_iter = max_iter;
    opts.plus_plus_init = plus_plus;
    opts.seed = seed;
    const pskm::Partition part = pskm::kmeans(coef, opts);

    std::vector<double> lambdas;
    for (std::size_t j = 0; j < smoothed.fits.size(); ++j)
        if (smoothed.fits[j]) lambdas.push_back(smoothed.lambdas[j]);

    pskm::RunInfo info;
    info.seed = seed;
    info.k = k;
    info.distance = distance;
    info.restarts = restarts;
    pskm::write_results(part, coef, lambdas, info, out_dir);
    std::printf("clustered %d series into %d groups (objective %.6g, restart %d) -> %s\n",
                coef.n_series(), k, part.objective, part.restart_index, out_dir.c_str());
    return smoothed.failures.empty() ? 0 : 1;
}

int run_evaluate(const std::string& labels_a, const std::string& labels_b) {
    const auto a = pskm::read_labels_csv(labels_a);
    const auto b = pskm::read_labels_csv(labels_b);
    if (a.size() != b.size()) {
        std::fprintf(stderr, "label files disagree on length: %zu vs %zu\n", a.size(),
                     b.size());
        return 1;
    }
    std::vector<int> la, lb;
    la.reserve(a.size());
    lb.reserve(b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i].first != b[i].first) {
            std::fprintf(stderr, "series id mismatch at row %zu: %s vs %s\n", i + 2,
                         a[i].first.c_str(), b[i].first.c_str());
            return 1;
        }
        la.push_back(a[i].second);
        lb.push_back(b[i].second);
    }
    std::printf("ari = %.6f\n", pskm::adjusted_rand_index(la, lb));
    return 0;
}

int run_replicate(const std::string& scenario, bool with_missing, double missing_min,
                  double missing_max, int n_replicates, const GridArgs& grid, int k,
                  const std::string& distance, int restarts, bool plus_plus,
                  std::uint64_t seed, const std::string& out_file) {
    pskm::ReplicateOptions opts;
    opts.sim.scenario = parse_scenario(scenario);
    if (with_missing) opts.sim.missing = pskm::MissingSpec{missing_min, missing_max};
    opts.smooth = to_smooth_options(grid);
    opts.cluster.k = k;
    opts.cluster.distance = parse_distance(distance);
    opts.cluster.restarts = restarts;
    opts.cluster.plus_plus_init = plus_plus;
    opts.n_replicates = n_replicates;
    opts.base_seed = seed;

    const pskm::ReplicateSummary summary =
        pskm::run_replicates(opts, [](const pskm::ReplicateRow& row) {
            std::printf("replicate %d: ari %.4f (%.1fs, %d failed series)\n", row.replicate,
                        row.ari, row.seconds, row.n_failed_series);
            std::fflush(stdout);
        });

    std::printf("mean ari %.4f (sd %.4f) over %d replicates, %.1fs total\n", summary.mean_ari,
                summary.sd_ari, n_replicates, summary.total_seconds);
    if (!out_file.empty()) {
        std::filesystem::path path(out_file);
        if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
        std::FILE* f = std::fopen(out_file.c_str(), "w");
        if (!f) throw pskm::IoError("cannot open " + out_file + " for writing");
        std::fprintf(f, "replicate,ari,mean_lambda,n_failed_series,seconds\n");
        for (const auto& row : summary.rows)
            std::fprintf(f, "%d,%.17g,%.17g,%d,%.17g\n", row.replicate, row.ari,
                         row.mean_lambda, row.n_failed_series, row.seconds);
        std::fclose(f);
    }
    int failed = 0;
    for (const auto& row : summary.rows) failed += row.n_failed_series;
    return failed == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
#ifdef _OPENMP
    if (const char* threads = std::getenv("PSKM_THREADS")) {
        const int n = std::atoi(threads);
        if (n > 0) omp_set_num_threads(n);
    }
#endif
    CLI::App app{"Penalized-spline smoothing and k-means clustering for noisy time series"};
    app.require_subcommand(1);

    // --- simulate ---
    auto* sim = app.add_subcommand("simulate", "Generate a synthetic benchmark dataset");
    std::string sim_scenario = "iid";
    int sim_points = 100;
    std::vector<int> sim_sizes;
    bool sim_missing = false;
    double sim_miss_min = 0.10, sim_miss_max = 0.50;
    std::uint64_t sim_seed = 0;
    std::string sim_out = "series.csv", sim_labels = "";
    sim->add_option("--scenario", sim_scenario, "Noise scenario: iid, ar05, ar09");
    sim->add_option("--n-points", sim_points, "Time points per series")
        ->check(CLI::Range(4, 1000000));
    sim->add_option("--class-sizes", sim_sizes, "Series per class (6 values)")->delimiter(',');
    sim->add_flag("--missing", sim_missing, "Drop a random fraction of each series");
    sim->add_option("--missing-min", sim_miss_min, "Lower bound of the missing fraction");
    sim->add_option("--missing-max", sim_miss_max, "Upper bound of the missing fraction");
    sim->add_option("--seed", sim_seed, "RNG seed");
    sim->add_option("--out", sim_out, "Output CSV for the series");
    sim->add_option("--labels-out", sim_labels, "Optional CSV for the true labels");

    // --- smooth ---
    auto* smo = app.add_subcommand("smooth", "Fit a penalized spline to every series");
    std::string smo_in, smo_out = "smooth_out";
    GridArgs smo_grid;
    smo->add_option("--input", smo_in, "Input series CSV")->required();
    add_grid_args(smo, smo_grid);
    smo->add_option("--out-dir", smo_out, "Output directory");

    // --- vcurve ---
    auto* vcu = app.add_subcommand("vcurve", "Trace the selection curve for one series");
    std::string vcu_in, vcu_out = "vcurve.csv";
    int vcu_col = 0;
    GridArgs vcu_grid;
    vcu->add_option("--input", vcu_in, "Input series CSV")->required();
    vcu->add_option("--column", vcu_col, "Series column index (0-based)");
    add_grid_args(vcu, vcu_grid);
    vcu->add_option("--out", vcu_out, "Output CSV (lambda,psi,phi,v)");

    // --- cluster ---
    auto* clu = app.add_subcommand("cluster", "Smooth and cluster the series");
    std::string clu_in, clu_dist = "euclid", clu_out = "cluster_out";
    GridArgs clu_grid;
    int clu_k = 2, clu_restarts = 50, clu_max_iter = 300;
    bool clu_pp = false;
    std::uint64_t clu_seed = 0;
    clu->add_option("--input", clu_in, "Input series CSV")->required();
    add_grid_args(clu, clu_grid);
    clu->add_option("--k", clu_k, "Number of clusters")->required()->check(CLI::Range(2, 1000000));
    clu->add_option("--distance", clu_dist, "Distance: euclid or pearson");
    clu->add_option("--restarts", clu_restarts, "Random restarts")->check(CLI::PositiveNumber);
    clu->add_option("--max-iter", clu_max_iter, "Iteration cap per restart")
        ->check(CLI::PositiveNumber);
    clu->add_flag("--kmeanspp", clu_pp, "Distance-weighted seeding instead of random partitions");
    clu->add_option("--seed", clu_seed, "RNG seed");
    clu->add_option("--out-dir", clu_out, "Output directory");

    // --- evaluate ---
    auto* eva = app.add_subcommand("evaluate", "Adjusted Rand index between two label files");
    std::string eva_a, eva_b;
    eva->add_option("--labels", eva_a, "First label CSV")->required();
    eva->add_option("--truth", eva_b, "Second label CSV")->required();

    // --- replicate ---
    auto* rep = app.add_subcommand("replicate",
                                   "Repeat simulate/smooth/cluster/score and summarize");
    std::string rep_scenario = "iid", rep_dist = "pearson", rep_out = "";
    bool rep_missing = false, rep_pp = false;
    double rep_miss_min = 0.10, rep_miss_max = 0.50;
    int rep_n = 20, rep_k = 6, rep_restarts = 50;
    std::uint64_t rep_seed = 0;
    GridArgs rep_grid;
    rep_grid.n_segments = 10;
    rep->add_option("--scenario", rep_scenario, "Noise scenario: iid, ar05, ar09");
    rep->add_flag("--missing", rep_missing, "Drop a random fraction of each series");
    rep->add_option("--missing-min", rep_miss_min, "Lower bound of the missing fraction");
    rep->add_option("--missing-max", rep_miss_max, "Upper bound of the missing fraction");
    rep->add_option("--replicates", rep_n, "Number of replicates")->check(CLI::PositiveNumber);
    add_grid_args(rep, rep_grid);
    rep->add_option("--k", rep_k, "Number of clusters")->check(CLI::Range(2, 1000000));
    rep->add_option("--distance", rep_dist, "Distance: euclid or pearson");
    rep->add_option("--restarts", rep_restarts, "Random restarts")->check(CLI::PositiveNumber);
    rep->add_flag("--kmeanspp", rep_pp, "Distance-weighted seeding instead of random partitions");
    rep->add_option("--seed", rep_seed, "Base RNG seed");
    rep->add_option("--out", rep_out, "Optional per-replicate CSV");

    CLI11_PARSE(app, argc, argv);

    try {
        if (sim->parsed())
            return run_simulate(sim_scenario, sim_points, sim_sizes, sim_missing, sim_miss_min,
                                sim_miss_max, sim_seed, sim_out, sim_labels);
        if (smo->parsed()) return run_smooth(smo_in, smo_grid, smo_out);
        if (vcu->parsed()) return run_vcurve(vcu_in, vcu_col, vcu_grid, vcu_out);
        if (clu->parsed())
            return run_cluster(clu_in, clu_grid, clu_k, clu_dist, clu_restarts, clu_max_iter,
                               clu_pp, clu_seed, clu_out);
        if (eva->parsed()) return run_evaluate(eva_a, eva_b);
        if (rep->parsed())
            return run_replicate(rep_scenario, rep_missing, rep_miss_min, rep_miss_max, rep_n,
                                 rep_grid, rep_k, rep_dist, rep_restarts, rep_pp, rep_seed,
                                 rep_out);
    } catch (const pskm::Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "unexpected error: %s\n", e.what());
        return 3;
    }
    return 0;
}

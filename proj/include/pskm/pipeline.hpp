#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "pskm/cluster.hpp"
#include "pskm/io.hpp"
#include "pskm/select.hpp"
#include "pskm/simgen.hpp"
#include "pskm/smooth.hpp"

namespace pskm {

// Derived seeds for the replicate driver. Datasets and clustering draw
// from separate streams so that runs which differ only in smoothing
// configuration see identical data and identical k-means restarts.
std::uint64_t replicate_seed(std::uint64_t base_seed, int replicate);
std::uint64_t cluster_seed(std::uint64_t base_seed, int replicate);

struct SmoothOptions {
    int n_segments = 25;
    int degree = 3;
    int penalty_order = 3;
    std::vector<double> lambdas = lambda_grid();  // selection grid
    std::optional<double> fixed_lambda;           // bypass selection when set
};

struct SeriesFailure {
    int column = -1;
    std::string id;
    std::string reason;
};

struct SmoothBatchResult {
    KnotGrid grid;
    std::vector<std::optional<SplineFit>> fits;  // one slot per column
    std::vector<double> lambdas;                 // NaN where the fit failed
    std::vector<std::uint8_t> used_fallback;     // selection fell back to grid max
    std::vector<SeriesFailure> failures;

    int n_ok() const;
};

// Fit every column of the table: select lambda per series (unless fixed)
// and solve the penalized system. Columns that cannot be fit are recorded
// in `failures` and left empty. The two variants produce identical
// results; the first distributes columns across threads.
SmoothBatchResult smooth_batch(const SeriesTable& table, const SmoothOptions& options);
SmoothBatchResult smooth_batch_ref(const SeriesTable& table, const SmoothOptions& options);

// Stack the successful fits' coefficient vectors as columns; ids follow
// the table. Throws if no column was fit.
CoefficientMatrix coefficient_matrix(const SeriesTable& table, const SmoothBatchResult& result);

// View a simulated dataset as a SeriesTable (ids "s0", "s1", ...).
SeriesTable to_table(const SimDataset& dataset);

struct ReplicateOptions {
    SimConfig sim;           // seed field is ignored; per-replicate seeds derive
    SmoothOptions smooth;    // from base_seed below
    KMeansOptions cluster;   // seed field likewise ignored
    int n_replicates = 20;
    std::uint64_t base_seed = 0;
};

struct ReplicateRow {
    int replicate = -1;
    double ari = 0.0;
    double mean_lambda = 0.0;
    int n_failed_series = 0;
    double seconds = 0.0;
};

struct ReplicateSummary {
    std::vector<ReplicateRow> rows;
    double mean_ari = 0.0;
    double sd_ari = 0.0;
    double total_seconds = 0.0;
};

// Run the simulate -> smooth -> cluster -> score loop. The callback (when
// set) observes each finished replicate.
ReplicateSummary run_replicates(const ReplicateOptions& options,
                                const std::function<void(const ReplicateRow&)>& on_row = {});

}  // namespace pskm

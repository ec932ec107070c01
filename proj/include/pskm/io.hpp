#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "pskm/cluster.hpp"
#include "pskm/smooth.hpp"

namespace pskm {

// Wide-format collection of series on a shared time grid. Missing cells
// are written as "NA" and carry a zero in the observed mask (the matching
// value entry is NaN).
struct SeriesTable {
    std::vector<double> time;
    std::vector<std::string> ids;
    Eigen::MatrixXd values;  // n_points x n_series
    Eigen::Array<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic> observed;

    int n_points() const { return static_cast<int>(time.size()); }
    int n_series() const { return static_cast<int>(ids.size()); }
};

// CSV layout: header "time,<id>,<id>,..." then one row per time point.
// Numbers are parsed strictly (the full field must be a finite number);
// the only non-numeric token allowed in value cells is "NA".
SeriesTable read_series_csv(const std::filesystem::path& path);
void write_series_csv(const SeriesTable& table, const std::filesystem::path& path);

// Extract column j as a Series (shared x, per-column observation mask).
Series series_column(const SeriesTable& table, int j);

// Two-column file: header "series_id,cluster".
void write_labels_csv(std::span<const std::string> ids, std::span<const int> labels,
                      const std::filesystem::path& path);
std::vector<std::pair<std::string, int>> read_labels_csv(const std::filesystem::path& path);

// Dense numeric matrix with named columns, no index column.
void write_matrix_csv(const Eigen::MatrixXd& matrix, std::span<const std::string> col_names,
                      const std::filesystem::path& path);
Eigen::MatrixXd read_matrix_csv(const std::filesystem::path& path,
                                std::vector<std::string>* col_names = nullptr);

struct RunInfo {
    std::uint64_t seed = 0;
    int k = 0;
    std::string distance;
    int restarts = 0;
};

// Write labels.csv, centroids.csv, coefficients.csv, and run_meta.json
// into out_dir (created if needed). lambdas may be empty when smoothing
// was not part of the run.
void write_results(const Partition& partition, const CoefficientMatrix& coef,
                   std::span<const double> lambdas, const RunInfo& info,
                   const std::filesystem::path& out_dir);

}  // namespace pskm

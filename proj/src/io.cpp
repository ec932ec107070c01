#include "pskm/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <string_view>
#include <utility>

#include <json.hpp>

#include "pskm/errors.hpp"

namespace pskm {

namespace {

std::vector<std::string> split_fields(std::string_view line) {
    std::vector<std::string> fields;
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = line.find(',', start);
        if (comma == std::string_view::npos) {
            fields.emplace_back(line.substr(start));
            break;
        }
        fields.emplace_back(line.substr(start, comma - start));
        start = comma + 1;
    }
    return fields;
}

double parse_number(const std::string& field, int row, int col) {
    double value = 0.0;
    const char* first = field.data();
    const char* last = field.data() + field.size();
    const auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc{} || ptr != last || !std::isfinite(value))
        throw ParseError("expected a finite number, got \"" + field + "\"", row, col);
    return value;
}

std::string format_number(double value) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", value);
    return buf;
}

std::vector<std::string> read_lines(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string() + " for reading");
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        lines.push_back(line);
    }
    // Ignore trailing blank lines but reject interior ones during parsing.
    while (!lines.empty() && lines.back().empty()) lines.pop_back();
    if (lines.empty()) throw ParseError("file " + path.string() + " is empty", 1, 1);
    return lines;
}

std::ofstream open_out(const std::filesystem::path& path) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    return out;
}

constexpr std::string_view kMissingToken = "NA";

}  // namespace

SeriesTable read_series_csv(const std::filesystem::path& path) {
    const auto lines = read_lines(path);
    const auto header = split_fields(lines[0]);
    if (header.empty() || header[0] != "time")
        throw ParseError("header must start with \"time\"", 1, 1);
    if (header.size() < 2) throw ParseError("no series columns in header", 1, 1);

    SeriesTable table;
    table.ids.assign(header.begin() + 1, header.end());
    const auto n_series = static_cast<int>(table.ids.size());
    const auto n_points = static_cast<int>(lines.size()) - 1;
    if (n_points < 1) throw ParseError("no data rows", 2, 1);
    table.values.resize(n_points, n_series);
    table.observed.resize(n_points, n_series);
    table.time.reserve(static_cast<std::size_t>(n_points));

    for (int i = 0; i < n_points; ++i) {
        const int row = i + 2;  // 1-based, after the header
        const auto fields = split_fields(lines[static_cast<std::size_t>(i) + 1]);
        if (fields.size() != header.size())
            throw ParseError("expected " + std::to_string(header.size()) + " fields, got " +
                                 std::to_string(fields.size()),
                             row, 1);
        const double t = parse_number(fields[0], row, 1);
        if (!table.time.empty() && !(t > table.time.back()))
            throw ParseError("time values must be strictly increasing", row, 1);
        table.time.push_back(t);
        for (int j = 0; j < n_series; ++j) {
            const auto& field = fields[static_cast<std::size_t>(j) + 1];
            if (field == kMissingToken) {
                table.values(i, j) = std::numeric_limits<double>::quiet_NaN();
                table.observed(i, j) = 0;
            } else {
                table.values(i, j) = parse_number(field, row, j + 2);
                table.observed(i, j) = 1;
            }
        }
    }
    return table;
}

void write_series_csv(const SeriesTable& table, const std::filesystem::path& path) {
    if (static_cast<int>(table.time.size()) != table.values.rows() ||
        static_cast<int>(table.ids.size()) != table.values.cols() ||
        table.observed.rows() != table.values.rows() ||
        table.observed.cols() != table.values.cols())
        throw InvalidArgument("series table shapes are inconsistent");
    auto out = open_out(path);
    out << "time";
    for (const auto& id : table.ids) out << ',' << id;
    out << '\n';
    for (int i = 0; i < table.values.rows(); ++i) {
        out << format_number(table.time[static_cast<std::size_t>(i)]);
        for (int j = 0; j < table.values.cols(); ++j) {
            out << ',';
            if (table.observed(i, j))
                out << format_number(table.values(i, j));
            else
                out << kMissingToken;
        }
        out << '\n';
    }
    if (!out) throw IoError("failed writing " + path.string());
}

Series series_column(const SeriesTable& table, int j) {
    if (j < 0 || j >= table.n_series())
        throw InvalidArgument("column " + std::to_string(j) + " outside [0, " +
                              std::to_string(table.n_series()) + ")");
    Series s;
    s.x = table.time;
    s.y.resize(table.time.size());
    s.observed.resize(table.time.size());
    for (int i = 0; i < table.n_points(); ++i) {
        s.y[static_cast<std::size_t>(i)] = table.values(i, j);
        s.observed[static_cast<std::size_t>(i)] = table.observed(i, j);
    }
    return s;
}

void write_labels_csv(std::span<const std::string> ids, std::span<const int> labels,
                      const std::filesystem::path& path) {
    if (ids.size() != labels.size())
        throw InvalidArgument("id and label counts differ");
    auto out = open_out(path);
    out << "series_id,cluster\n";
    for (std::size_t i = 0; i < ids.size(); ++i) out << ids[i] << ',' << labels[i] << '\n';
    if (!out) throw IoError("failed writing " + path.string());
}

std::vector<std::pair<std::string, int>> read_labels_csv(const std::filesystem::path& path) {
    const auto lines = read_lines(path);
    if (split_fields(lines[0]) != std::vector<std::string>{"series_id", "cluster"})
        throw ParseError("expected header \"series_id,cluster\"", 1, 1);
    std::vector<std::pair<std::string, int>> out;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        const int row = static_cast<int>(i) + 1;
        const auto fields = split_fields(lines[i]);
        if (fields.size() != 2) throw ParseError("expected 2 fields", row, 1);
        int label = 0;
        const char* first = fields[1].data();
        const char* last = fields[1].data() + fields[1].size();
        const auto [ptr, ec] = std::from_chars(first, last, label);
        if (ec != std::errc{} || ptr != last)
            throw ParseError("expected an integer, got \"" + fields[1] + "\"", row, 2);
        out.emplace_back(fields[0], label);
    }
    return out;
}

void write_matrix_csv(const Eigen::MatrixXd& matrix, std::span<const std::string> col_names,
                      const std::filesystem::path& path) {
    if (static_cast<Eigen::Index>(col_names.size()) != matrix.cols())
        throw InvalidArgument("column name count does not match matrix width");
    auto out = open_out(path);
    for (std::size_t j = 0; j < col_names.size(); ++j) {
        if (j) out << ',';
        out << col_names[j];
    }
    out << '\n';
    for (Eigen::Index i = 0; i < matrix.rows(); ++i) {
        for (Eigen::Index j = 0; j < matrix.cols(); ++j) {
            if (j) out << ',';
            out << format_number(matrix(i, j));
        }
        out << '\n';
    }
    if (!out) throw IoError("failed writing " + path.string());
}

Eigen::MatrixXd read_matrix_csv(const std::filesystem::path& path,
                                std::vector<std::string>* col_names) {
    const auto lines = read_lines(path);
    const auto header = split_fields(lines[0]);
    if (header.empty()) throw ParseError("empty header", 1, 1);
    const auto n_cols = static_cast<int>(header.size());
    const auto n_rows = static_cast<int>(lines.size()) - 1;
    Eigen::MatrixXd matrix(n_rows, n_cols);
    for (int i = 0; i < n_rows; ++i) {
        const int row = i + 2;
        const auto fields = split_fields(lines[static_cast<std::size_t>(i) + 1]);
        if (static_cast<int>(fields.size()) != n_cols)
            throw ParseError("expected " + std::to_string(n_cols) + " fields, got " +
                                 std::to_string(fields.size()),
                             row, 1);
        for (int j = 0; j < n_cols; ++j)
            matrix(i, j) = parse_number(fields[static_cast<std::size_t>(j)], row, j + 1);
    }
    if (col_names) *col_names = header;
    return matrix;
}

void write_results(const Partition& partition, const CoefficientMatrix& coef,
                   std::span<const double> lambdas, const RunInfo& info,
                   const std::filesystem::path& out_dir) {
    const int n = coef.n_series();
    if (static_cast<int>(partition.labels.size()) != n)
        throw InvalidArgument("partition size does not match coefficient columns");
    if (!lambdas.empty() && static_cast<int>(lambdas.size()) != n)
        throw InvalidArgument("lambda count does not match coefficient columns");
    std::vector<std::string> ids = coef.series_ids;
    if (ids.empty()) {
        ids.reserve(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) ids.push_back("s" + std::to_string(i));
    }
    std::filesystem::create_directories(out_dir);
    write_labels_csv(ids, partition.labels, out_dir / "labels.csv");

    std::vector<std::string> cluster_names;
    cluster_names.reserve(static_cast<std::size_t>(partition.centroids.cols()));
    for (Eigen::Index c = 0; c < partition.centroids.cols(); ++c)
        cluster_names.push_back("cluster_" + std::to_string(c));
    write_matrix_csv(partition.centroids, cluster_names, out_dir / "centroids.csv");
    write_matrix_csv(coef.values, ids, out_dir / "coefficients.csv");

    nlohmann::json meta;
    meta["seed"] = info.seed;
    meta["k"] = info.k;
    meta["distance"] = info.distance;
    meta["restarts"] = info.restarts;
    meta["objective"] = partition.objective;
    meta["n_iterations"] = partition.n_iterations;
    meta["restart_index"] = partition.restart_index;
    meta["n_degenerate_distances"] = partition.n_degenerate_distances;
    if (!lambdas.empty()) {
        nlohmann::json per_series = nlohmann::json::object();
        for (int i = 0; i < n; ++i) {
            const double lam = lambdas[static_cast<std::size_t>(i)];
            if (std::isfinite(lam))
                per_series[ids[static_cast<std::size_t>(i)]] = lam;
            else
                per_series[ids[static_cast<std::size_t>(i)]] = nullptr;
        }
        meta["lambda_per_series"] = std::move(per_series);
    }
    auto out = open_out(out_dir / "run_meta.json");
    out << meta.dump(2) << '\n';
    if (!out) throw IoError("failed writing " + (out_dir / "run_meta.json").string());
}

}  // namespace pskm

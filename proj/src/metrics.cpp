#include "pskm/metrics.hpp"

#include <string>
#include <unordered_map>

#include "pskm/errors.hpp"

namespace pskm {

namespace {

// Maps arbitrary labels to 0..k-1 in order of first appearance.
std::vector<int> compact_labels(std::span<const int> labels, int& n_distinct) {
    std::unordered_map<int, int> ids;
    std::vector<int> out(labels.size());
    for (std::size_t i = 0; i < labels.size(); ++i) {
        auto [it, inserted] = ids.try_emplace(labels[i], static_cast<int>(ids.size()));
        out[i] = it->second;
    }
    n_distinct = static_cast<int>(ids.size());
    return out;
}

__int128 choose2(__int128 n) { return n * (n - 1) / 2; }

}  // namespace

ContingencyTable contingency_table(std::span<const int> labels_a, std::span<const int> labels_b) {
    if (labels_a.size() != labels_b.size())
        throw InvalidArgument("label sequences differ in length: " +
                              std::to_string(labels_a.size()) + " vs " +
                              std::to_string(labels_b.size()));
    if (labels_a.size() < 2)
        throw InvalidArgument("need at least 2 items to compare partitions");

    int rows = 0;
    int cols = 0;
    const std::vector<int> a = compact_labels(labels_a, rows);
    const std::vector<int> b = compact_labels(labels_b, cols);

    ContingencyTable table;
    table.counts.assign(static_cast<std::size_t>(rows),
                        std::vector<std::int64_t>(static_cast<std::size_t>(cols), 0));
    table.row_marginals.assign(static_cast<std::size_t>(rows), 0);
    table.col_marginals.assign(static_cast<std::size_t>(cols), 0);
    table.total = static_cast<std::int64_t>(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        ++table.counts[static_cast<std::size_t>(a[i])][static_cast<std::size_t>(b[i])];
        ++table.row_marginals[static_cast<std::size_t>(a[i])];
        ++table.col_marginals[static_cast<std::size_t>(b[i])];
    }
    return table;
}

double adjusted_rand_index(std::span<const int> labels_a, std::span<const int> labels_b) {
    const ContingencyTable table = contingency_table(labels_a, labels_b);

    __int128 index = 0;
    for (const auto& row : table.counts)
        for (std::int64_t cell : row) index += choose2(cell);
    __int128 sum_rows = 0;
    for (std::int64_t m : table.row_marginals) sum_rows += choose2(m);
    __int128 sum_cols = 0;
    for (std::int64_t m : table.col_marginals) sum_cols += choose2(m);
    const __int128 pairs = choose2(table.total);

    const __int128 numerator = 2 * (pairs * index - sum_rows * sum_cols);
    const __int128 denominator = pairs * (sum_rows + sum_cols) - 2 * sum_rows * sum_cols;
    if (denominator == 0) {
        // Both partitions are all-singletons or both one-block; they
        // agree exactly iff the contingency table is a permutation-like
        // diagonal (one nonzero per row and column).
        for (const auto& row : table.counts) {
            int nonzero = 0;
            for (std::int64_t cell : row) nonzero += (cell != 0);
            if (nonzero != 1) return 0.0;
        }
        for (std::size_t c = 0; c < table.col_marginals.size(); ++c) {
            int nonzero = 0;
            for (const auto& row : table.counts) nonzero += (row[c] != 0);
            if (nonzero != 1) return 0.0;
        }
        return 1.0;
    }
    return static_cast<double>(numerator) / static_cast<double>(denominator);
}

}  // namespace pskm

#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace pskm {

// Cross-tabulation of two labelings of the same items. Labels are
// compacted by first appearance, so arbitrary integer labels work.
struct ContingencyTable {
    std::vector<std::vector<std::int64_t>> counts;  // rows: labels_a, cols: labels_b
    std::vector<std::int64_t> row_marginals;
    std::vector<std::int64_t> col_marginals;
    std::int64_t total = 0;
};

ContingencyTable contingency_table(std::span<const int> labels_a, std::span<const int> labels_b);

// Hubert-Arabie adjusted Rand index: 1 for partitions identical up to
// relabeling, about 0 for independent ones, negative for agreement below
// chance. Pair counts use 128-bit integers, so the value is exact up to
// the final division.
double adjusted_rand_index(std::span<const int> labels_a, std::span<const int> labels_b);

}  // namespace pskm

#pragma once

#include <gmpxx.h>

#include <Eigen/Dense>
#include <span>
#include <vector>

#include "invcorr/error.hpp"

namespace invcorr {

inline constexpr int kPartitionCap = 12;  // Bell(12) = 4,213,597

// A partition of {1..d} into disjoint nonempty blocks, stored canonically:
// blocks sorted by smallest element, indices inside a block ascending.
struct SetPartition {
  int d = 0;
  std::vector<std::vector<int>> blocks;

  bool operator==(const SetPartition&) const = default;
};

// Validates and canonicalizes; throws on overlap, gaps or out-of-range indices.
SetPartition make_partition(int d, std::vector<std::vector<int>> blocks);

void validate_partition(const SetPartition& partition);

// All set partitions of {1..d} in restricted-growth-string lexicographic
// order. This order is the indexing contract for the V_d columns and for
// mixture-weight vectors, so it must never change.
std::vector<SetPartition> enumerate_partitions(int d, int cap = kPartitionCap);

// Exact Bell number via the Bell-triangle recurrence.
mpz_class bell_number(int d);

// 0/1 symmetric matrix whose 1-pattern is the disjoint union of the blocks.
struct CliquePoint {
  int d = 0;
  Eigen::MatrixXd entries;
};

CliquePoint clique_point(const SetPartition& partition);

// Groups indices of y by exact value equality.
SetPartition partition_of_vector(std::span<const double> y);

// Number of blocks; handy when reasoning about k-partitions.
inline int block_count(const SetPartition& partition) {
  return static_cast<int>(partition.blocks.size());
}

}  // namespace invcorr

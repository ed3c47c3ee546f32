#include "invcorr/partitions.hpp"

#include <algorithm>
#include <map>
#include <string>

namespace invcorr {

SetPartition make_partition(int d, std::vector<std::vector<int>> blocks) {
  SetPartition partition;
  partition.d = d;
  for (auto& block : blocks) {
    std::sort(block.begin(), block.end());
  }
  std::sort(blocks.begin(), blocks.end(),
            [](const auto& a, const auto& b) { return a.front() < b.front(); });
  partition.blocks = std::move(blocks);
  validate_partition(partition);
  return partition;
}

void validate_partition(const SetPartition& partition) {
  if (partition.d < 1) {
    fail(ErrorCode::dimension, "partition ground set must be nonempty");
  }
  std::vector<char> seen(static_cast<std::size_t>(partition.d), 0);
  int covered = 0;
  int previous_min = 0;
  for (const auto& block : partition.blocks) {
    if (block.empty()) {
      fail(ErrorCode::validation, "partition blocks must be nonempty");
    }
    if (block.front() <= previous_min) {
      fail(ErrorCode::validation, "blocks must be sorted by smallest element");
    }
    previous_min = block.front();
    int previous = 0;
    for (int index : block) {
      if (index < 1 || index > partition.d) {
        fail(ErrorCode::validation,
             "index " + std::to_string(index) + " outside {1.." +
                 std::to_string(partition.d) + "}");
      }
      if (index <= previous) {
        fail(ErrorCode::validation, "block indices must be strictly ascending");
      }
      previous = index;
      if (seen[static_cast<std::size_t>(index - 1)]) {
        fail(ErrorCode::validation,
             "index " + std::to_string(index) + " appears in two blocks");
      }
      seen[static_cast<std::size_t>(index - 1)] = 1;
      ++covered;
    }
  }
  if (covered != partition.d) {
    fail(ErrorCode::validation, "blocks do not cover the ground set");
  }
}

namespace {

SetPartition partition_from_rgs(std::span<const int> rgs) {
  SetPartition partition;
  partition.d = static_cast<int>(rgs.size());
  int nblocks = 0;
  for (int value : rgs) nblocks = std::max(nblocks, value + 1);
  partition.blocks.resize(static_cast<std::size_t>(nblocks));
  for (int i = 0; i < partition.d; ++i) {
    partition.blocks[static_cast<std::size_t>(rgs[static_cast<std::size_t>(i)])]
        .push_back(i + 1);
  }
  // Block labels in an RGS appear in order of first use, so the blocks are
  // already sorted by smallest element.
  return partition;
}

}  // namespace

std::vector<SetPartition> enumerate_partitions(int d, int cap) {
  if (d < 1 || d > cap) {
    fail(ErrorCode::dimension, "enumerate_partitions requires 1 <= d <= " +
                                   std::to_string(cap) + ", got " +
                                   std::to_string(d));
  }
  std::vector<SetPartition> result;
  std::vector<int> rgs(static_cast<std::size_t>(d), 0);
  std::vector<int> prefix_max(static_cast<std::size_t>(d), 0);
  // Lexicographic walk over restricted growth strings: a[0] = 0 and
  // a[i] <= 1 + max(a[0..i-1]).
  while (true) {
    result.push_back(partition_from_rgs(rgs));
    int i = d - 1;
    while (i > 0) {
      if (rgs[static_cast<std::size_t>(i)] <=
          prefix_max[static_cast<std::size_t>(i - 1)]) {
        break;
      }
      --i;
    }
    if (i == 0) break;
    ++rgs[static_cast<std::size_t>(i)];
    prefix_max[static_cast<std::size_t>(i)] =
        std::max(prefix_max[static_cast<std::size_t>(i - 1)],
                 rgs[static_cast<std::size_t>(i)]);
    for (int j = i + 1; j < d; ++j) {
      rgs[static_cast<std::size_t>(j)] = 0;
      prefix_max[static_cast<std::size_t>(j)] =
          prefix_max[static_cast<std::size_t>(j - 1)];
    }
  }
  return result;
}

mpz_class bell_number(int d) {
  if (d < 1) {
    fail(ErrorCode::dimension, "bell_number requires d >= 1");
  }
  std::vector<mpz_class> row{1};
  for (int n = 1; n < d; ++n) {
    std::vector<mpz_class> next;
    next.reserve(row.size() + 1);
    next.push_back(row.back());
    for (std::size_t i = 0; i < row.size(); ++i) {
      next.push_back(next.back() + row[i]);
    }
    row = std::move(next);
  }
  return row.back();
}

CliquePoint clique_point(const SetPartition& partition) {
  validate_partition(partition);
  CliquePoint point;
  point.d = partition.d;
  point.entries = Eigen::MatrixXd::Zero(partition.d, partition.d);
  for (const auto& block : partition.blocks) {
    for (int i : block) {
      for (int j : block) {
        point.entries(i - 1, j - 1) = 1.0;
      }
    }
  }
  return point;
}

SetPartition partition_of_vector(std::span<const double> y) {
  if (y.empty()) {
    fail(ErrorCode::dimension, "partition_of_vector requires a nonempty vector");
  }
  std::map<double, std::vector<int>> groups;
  for (std::size_t i = 0; i < y.size(); ++i) {
    groups[y[i]].push_back(static_cast<int>(i) + 1);
  }
  std::vector<std::vector<int>> blocks;
  blocks.reserve(groups.size());
  for (auto& [value, indices] : groups) {
    blocks.push_back(std::move(indices));
  }
  return make_partition(static_cast<int>(y.size()), std::move(blocks));
}

}  // namespace invcorr

#pragma once

#include <cstdint>
#include <string>

namespace test_support {

struct MetricOracleResult {
  int64_t rankings_checked = 0;   ///< (labeling, permutation) pairs compared
  int64_t mismatches = 0;
  std::string first_mismatch;     ///< description of the first disagreement, empty when none
};

/// Exhaustive comparison of average_precision, cmc and the mAP/CMC of evaluate_distances
/// against a direct enumeration of their definitions. Every gallery of size 1..max_gallery,
/// every labeling of each item as relevant, same-camera junk, distractor or irrelevant, and
/// every ranking permutation are visited; results must agree exactly.
MetricOracleResult run_metric_oracle(int max_gallery = 6);

}  // namespace test_support

#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <vector>

namespace unitystyle::eval {

using IndexSet = std::set<int64_t>;

struct ApResult {
  double ap = 0.0;
  /// False when the relevant set is empty after junk removal; such queries are skipped.
  bool valid = false;
  /// 0-based rank of the first relevant item in the junk-filtered ranking, -1 if none.
  int64_t first_hit = -1;
};

/// Average precision of one ranked gallery list. Junk entries are removed from the ranking
/// before scoring; relevant items listed as junk count as junk.
ApResult average_precision(const std::vector<int64_t>& ranking, const IndexSet& relevant, const IndexSet& junk);

/// CMC at each k in `ks` (ascending): fraction of valid queries with a relevant item within the
/// first k junk-filtered positions. Queries whose relevant set is empty after junk removal are
/// left out of the denominator, as they are for mAP.
std::vector<double> cmc(const std::vector<std::vector<int64_t>>& rankings, const std::vector<IndexSet>& relevant,
                        const std::vector<IndexSet>& junk, const std::vector<int>& ks);

/// CMC from 0-based first-hit ranks (-1 for no hit) of valid queries.
std::vector<double> cmc_from_first_hits(const std::vector<int64_t>& first_hits, const std::vector<int>& ks);

/// Marker for camera-matrix cells with no data.
using CameraMatrix = std::vector<std::vector<std::optional<double>>>;

/// Fig.-style camera accuracy grid. `per_query_hits[i][g]` is the top-1 outcome of query i
/// when retrieval is restricted to gallery camera g+1 (nullopt when that restriction leaves no
/// relevant item). Entry (q,g) averages the outcomes of queries from camera q+1; cells without
/// any outcome stay nullopt. Throws ArgumentError when C < 2 or the inputs disagree in shape.
CameraMatrix camera_accuracy_matrix(const std::vector<std::vector<std::optional<bool>>>& per_query_hits,
                                    const std::vector<int>& query_cams, int num_cameras);

}  // namespace unitystyle::eval

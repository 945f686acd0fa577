#include "unitystyle/eval/metrics.hpp"

#include <algorithm>

#include "unitystyle/errors.hpp"

namespace unitystyle::eval {

ApResult average_precision(const std::vector<int64_t>& ranking, const IndexSet& relevant, const IndexSet& junk) {
  std::size_t total_relevant = 0;
  for (auto r : relevant) total_relevant += junk.count(r) == 0 ? 1 : 0;
  ApResult result;
  if (total_relevant == 0) return result;
  result.valid = true;
  int64_t position = 0;
  std::size_t hits = 0;
  double precision_sum = 0.0;
  for (auto item : ranking) {
    if (junk.count(item)) continue;
    ++position;
    if (relevant.count(item)) {
      ++hits;
      if (result.first_hit < 0) result.first_hit = position - 1;
      precision_sum += static_cast<double>(hits) / static_cast<double>(position);
    }
  }
  result.ap = precision_sum / static_cast<double>(total_relevant);
  return result;
}

std::vector<double> cmc_from_first_hits(const std::vector<int64_t>& first_hits, const std::vector<int>& ks) {
  if (!std::is_sorted(ks.begin(), ks.end())) throw ArgumentError("CMC ranks must be sorted ascending");
  std::vector<double> out(ks.size(), 0.0);
  if (first_hits.empty()) return out;
  for (std::size_t j = 0; j < ks.size(); ++j) {
    std::size_t within = 0;
    for (auto h : first_hits) within += (h >= 0 && h < ks[j]) ? 1 : 0;
    out[j] = static_cast<double>(within) / static_cast<double>(first_hits.size());
  }
  return out;
}

std::vector<double> cmc(const std::vector<std::vector<int64_t>>& rankings, const std::vector<IndexSet>& relevant,
                        const std::vector<IndexSet>& junk, const std::vector<int>& ks) {
  if (rankings.size() != relevant.size() || rankings.size() != junk.size()) {
    throw ArgumentError("rankings, relevance and junk sets differ in length");
  }
  std::vector<int64_t> first_hits;
  for (std::size_t i = 0; i < rankings.size(); ++i) {
    auto r = average_precision(rankings[i], relevant[i], junk[i]);
    if (r.valid) first_hits.push_back(r.first_hit);
  }
  return cmc_from_first_hits(first_hits, ks);
}

CameraMatrix camera_accuracy_matrix(const std::vector<std::vector<std::optional<bool>>>& per_query_hits,
                                    const std::vector<int>& query_cams, int num_cameras) {
  if (num_cameras < 2) throw ArgumentError("camera matrix needs at least 2 cameras");
  if (per_query_hits.size() != query_cams.size()) throw ArgumentError("one camera id per query is required");
  const auto C = static_cast<std::size_t>(num_cameras);
  std::vector<std::vector<int>> hits(C, std::vector<int>(C, 0)), counts(C, std::vector<int>(C, 0));
  for (std::size_t i = 0; i < per_query_hits.size(); ++i) {
    const int q = query_cams[i];
    if (q < 1 || q > num_cameras) throw ArgumentError("query camera " + std::to_string(q) + " out of range");
    if (per_query_hits[i].size() != C) throw ArgumentError("per-query outcomes must cover every gallery camera");
    for (std::size_t g = 0; g < C; ++g) {
      const auto& outcome = per_query_hits[i][g];
      if (!outcome) continue;
      ++counts[static_cast<std::size_t>(q - 1)][g];
      hits[static_cast<std::size_t>(q - 1)][g] += *outcome ? 1 : 0;
    }
  }
  CameraMatrix m(C, std::vector<std::optional<double>>(C));
  for (std::size_t q = 0; q < C; ++q) {
    for (std::size_t g = 0; g < C; ++g) {
      if (counts[q][g] > 0) m[q][g] = static_cast<double>(hits[q][g]) / counts[q][g];
    }
  }
  return m;
}

}  // namespace unitystyle::eval

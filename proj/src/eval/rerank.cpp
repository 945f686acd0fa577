#include "unitystyle/eval/rerank.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "unitystyle/errors.hpp"
#include "unitystyle/eval/distance.hpp"

namespace unitystyle::eval {

void RerankOptions::validate() const {
  if (k2 < 1 || k1 <= k2) {
    throw ArgumentError("re-ranking needs k1 > k2 >= 1 (got k1=" + std::to_string(k1) + ", k2=" + std::to_string(k2) +
                        ")");
  }
  if (!(lambda >= 0.0 && lambda <= 1.0)) throw ArgumentError("re-ranking lambda must lie in [0, 1]");
}

void to_json(nlohmann::json& j, const RerankOptions& o) {
  j = nlohmann::json{{"k1", o.k1}, {"k2", o.k2}, {"lambda", o.lambda}};
}

void from_json(const nlohmann::json& j, RerankOptions& o) {
  RerankOptions d;
  o.k1 = j.value("k1", d.k1);
  o.k2 = j.value("k2", d.k2);
  o.lambda = j.value("lambda", d.lambda);
}

namespace {

using Index = std::vector<int64_t>;

// First `k` entries (clamped to the row length) of row `i` of the initial ranking.
Index head(const std::vector<Index>& rank, int64_t i, int64_t k) {
  const auto& row = rank[static_cast<std::size_t>(i)];
  const auto n = std::min<int64_t>(k, static_cast<int64_t>(row.size()));
  return Index(row.begin(), row.begin() + n);
}

Index k_reciprocal(const std::vector<Index>& rank, int64_t i, int64_t k) {
  Index out;
  for (auto f : head(rank, i, k + 1)) {
    const auto back = head(rank, f, k + 1);
    if (std::find(back.begin(), back.end(), i) != back.end()) out.push_back(f);
  }
  return out;
}

}  // namespace

torch::Tensor rerank(const torch::Tensor& query_gallery, const torch::Tensor& query_query,
                     const torch::Tensor& gallery_gallery, const RerankOptions& options) {
  options.validate();
  const int64_t nq = query_gallery.size(0), ng = query_gallery.size(1);
  if (query_query.size(0) != nq || query_query.size(1) != nq || gallery_gallery.size(0) != ng ||
      gallery_gallery.size(1) != ng) {
    throw ArgumentError("re-ranking distance blocks have inconsistent shapes");
  }
  const int64_t n = nq + ng;
  if (nq == 0 || ng == 0) return query_gallery.to(torch::kFloat64).clone();

  auto top = torch::cat({query_query, query_gallery}, 1);
  auto bottom = torch::cat({query_gallery.t(), gallery_gallery}, 1);
  auto original = torch::cat({top, bottom}, 0).to(torch::kFloat64).pow(2);
  original = original / original.amax(1, /*keepdim=*/true).clamp_min(1e-300);
  original = original.contiguous();
  const auto* d = original.data_ptr<double>();
  auto dist = [&](int64_t i, int64_t j) { return d[i * n + j]; };

  std::vector<Index> rank(static_cast<std::size_t>(n));
  {
    auto order = rank_rows(original).contiguous();
    const auto* o = order.data_ptr<int64_t>();
    for (int64_t i = 0; i < n; ++i) rank[static_cast<std::size_t>(i)].assign(o + i * n, o + (i + 1) * n);
  }

  const int64_t k1 = options.k1;
  const int64_t half = static_cast<int64_t>(std::lround(k1 / 2.0));
  std::vector<double> V(static_cast<std::size_t>(n * n), 0.0);
  for (int64_t i = 0; i < n; ++i) {
    const auto recip = k_reciprocal(rank, i, k1);
    Index expansion = recip;
    for (auto candidate : recip) {
      const auto cand = k_reciprocal(rank, candidate, half);
      std::size_t overlap = 0;
      for (auto c : cand) overlap += std::find(recip.begin(), recip.end(), c) != recip.end() ? 1 : 0;
      if (static_cast<double>(overlap) > 2.0 / 3.0 * static_cast<double>(cand.size())) {
        expansion.insert(expansion.end(), cand.begin(), cand.end());
      }
    }
    std::sort(expansion.begin(), expansion.end());
    expansion.erase(std::unique(expansion.begin(), expansion.end()), expansion.end());
    double total = 0.0;
    for (auto j : expansion) total += std::exp(-dist(i, j));
    for (auto j : expansion) V[static_cast<std::size_t>(i * n + j)] = std::exp(-dist(i, j)) / total;
  }

  if (options.k2 != 1) {
    std::vector<double> qe(V.size(), 0.0);
    for (int64_t i = 0; i < n; ++i) {
      const auto neighbours = head(rank, i, options.k2);
      for (auto r : neighbours) {
        for (int64_t j = 0; j < n; ++j) qe[static_cast<std::size_t>(i * n + j)] += V[static_cast<std::size_t>(r * n + j)];
      }
      for (int64_t j = 0; j < n; ++j) qe[static_cast<std::size_t>(i * n + j)] /= static_cast<double>(neighbours.size());
    }
    V.swap(qe);
  }

  // Inverted index: for each column, the rows where V is non-zero.
  std::vector<Index> inverted(static_cast<std::size_t>(n));
  for (int64_t i = 0; i < n; ++i) {
    for (int64_t j = 0; j < n; ++j) {
      if (V[static_cast<std::size_t>(i * n + j)] != 0.0) inverted[static_cast<std::size_t>(j)].push_back(i);
    }
  }

  auto result = torch::empty({nq, ng}, torch::kFloat64);
  auto out = result.accessor<double, 2>();
  std::vector<double> shared(static_cast<std::size_t>(n));
  for (int64_t i = 0; i < nq; ++i) {
    std::fill(shared.begin(), shared.end(), 0.0);
    for (int64_t col = 0; col < n; ++col) {
      const double vi = V[static_cast<std::size_t>(i * n + col)];
      if (vi == 0.0) continue;
      for (auto r : inverted[static_cast<std::size_t>(col)]) {
        shared[static_cast<std::size_t>(r)] += std::min(vi, V[static_cast<std::size_t>(r * n + col)]);
      }
    }
    for (int64_t g = 0; g < ng; ++g) {
      const double s = shared[static_cast<std::size_t>(nq + g)];
      const double jaccard = 1.0 - s / (2.0 - s);
      out[i][g] = jaccard * (1.0 - options.lambda) + dist(i, nq + g) * options.lambda;
    }
  }
  return result;
}

torch::Tensor rerank_features(const torch::Tensor& query, const torch::Tensor& gallery, const RerankOptions& options,
                              const std::string& metric) {
  return rerank(pairwise_distances(query, gallery, metric), pairwise_distances(query, query, metric),
                pairwise_distances(gallery, gallery, metric), options);
}

}  // namespace unitystyle::eval

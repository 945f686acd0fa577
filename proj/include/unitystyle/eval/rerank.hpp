#pragma once

#include <nlohmann/json.hpp>
#include <torch/torch.h>

namespace unitystyle::eval {

struct RerankOptions {
  int k1 = 20;
  int k2 = 6;
  double lambda = 0.3;

  /// Throws ArgumentError unless k1 > k2 >= 1 and lambda lies in [0, 1].
  void validate() const;
};

void to_json(nlohmann::json& j, const RerankOptions& o);
void from_json(const nlohmann::json& j, RerankOptions& o);

/// k-reciprocal re-ranking of a query-gallery distance matrix given the query-query and
/// gallery-gallery distances. Returns lambda * d_orig + (1 - lambda) * d_jaccard, where d_orig
/// is the squared distance scaled by the maximum of its row in the joint (Q+G) matrix. At
/// lambda = 1 the result orders every row as `query_gallery` does.
torch::Tensor rerank(const torch::Tensor& query_gallery, const torch::Tensor& query_query,
                     const torch::Tensor& gallery_gallery, const RerankOptions& options = {});

/// Convenience overload: distances computed from descriptors with `pairwise_distances`.
torch::Tensor rerank_features(const torch::Tensor& query, const torch::Tensor& gallery,
                              const RerankOptions& options = {}, const std::string& metric = "euclidean");

}  // namespace unitystyle::eval

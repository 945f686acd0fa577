#pragma once

#include <string>
#include <vector>

#include <torch/torch.h>

namespace unitystyle::eval {

/// Metrics accepted by `pairwise_distances`.
std::vector<std::string> distance_metrics();

/// |Q| x |G| distance matrix in double precision.
///   "euclidean"     Euclidean distance between L2-normalised rows (default)
///   "euclidean_raw" Euclidean distance between the rows as given
///   "cosine"        1 - cosine similarity
/// Throws ArgumentError on a dimension mismatch or an unknown metric.
torch::Tensor pairwise_distances(const torch::Tensor& query, const torch::Tensor& gallery,
                                 const std::string& metric = "euclidean");

/// Row-wise stable ascending argsort.
torch::Tensor rank_rows(const torch::Tensor& distances);

}  // namespace unitystyle::eval

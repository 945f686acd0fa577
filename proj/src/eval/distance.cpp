#include "unitystyle/eval/distance.hpp"

#include "unitystyle/errors.hpp"

namespace unitystyle::eval {

std::vector<std::string> distance_metrics() { return {"euclidean", "euclidean_raw", "cosine"}; }

namespace {

torch::Tensor normalise_rows(const torch::Tensor& x) {
  return x / x.norm(2, 1, /*keepdim=*/true).clamp_min(1e-12);
}

}  // namespace

torch::Tensor pairwise_distances(const torch::Tensor& query, const torch::Tensor& gallery, const std::string& metric) {
  if (query.dim() != 2 || gallery.dim() != 2) throw ArgumentError("descriptor matrices must be 2-D");
  if (query.size(1) != gallery.size(1)) {
    throw ArgumentError("descriptor dimensions differ: " + std::to_string(query.size(1)) + " vs " +
                        std::to_string(gallery.size(1)));
  }
  auto q = query.to(torch::kFloat64);
  auto g = gallery.to(torch::kFloat64);
  if (metric == "cosine") return 1.0 - normalise_rows(q).matmul(normalise_rows(g).t());
  if (metric == "euclidean") {
    q = normalise_rows(q);
    g = normalise_rows(g);
  } else if (metric != "euclidean_raw") {
    throw ArgumentError("unknown distance metric '" + metric + "'");
  }
  // Exact differences instead of the |a|^2 + |b|^2 - 2ab expansion: zero on identical rows.
  if (q.size(0) == 0 || g.size(0) == 0) return torch::zeros({q.size(0), g.size(0)}, torch::kFloat64);
  return torch::cdist(q, g, 2.0, /*compute_mode=*/2);
}

torch::Tensor rank_rows(const torch::Tensor& distances) {
  return std::get<1>(distances.sort(/*stable=*/true, /*dim=*/1, /*descending=*/false));
}

}  // namespace unitystyle::eval

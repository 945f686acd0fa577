#pragma once

#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>
#include <torch/torch.h>

#include "unitystyle/data/dataset.hpp"
#include "unitystyle/eval/metrics.hpp"
#include "unitystyle/eval/rerank.hpp"
#include "unitystyle/gan/transfer_model.hpp"
#include "unitystyle/reid/model.hpp"

namespace unitystyle::eval {

/// Retrieval protocol. The Market rule marks gallery items sharing identity and camera with
/// the query as junk; distractor identities are junk as well.
struct EvalProtocol {
  std::string name = "market1501";
  bool junk_same_camera = true;
  bool distractors_as_junk = true;
  std::string metric = "euclidean";
  std::vector<int> ks{1, 5, 10};
};

void to_json(nlohmann::json& j, const EvalProtocol& p);
void from_json(const nlohmann::json& j, EvalProtocol& p);

/// Identity, camera and sequence of one query or gallery row.
struct RowLabel {
  int person_id = 0;
  int camera_id = 0;
  int sequence_id = 0;
};

std::vector<RowLabel> row_labels(const data::DatasetIndex& dataset, data::Split split);

struct EvalReport {
  std::vector<int> ks;
  std::vector<double> cmc;
  double mAP = 0.0;
  /// AP per query in query order; nullopt for skipped queries.
  std::vector<std::optional<double>> per_query_ap;
  int skipped_queries = 0;
  CameraMatrix camera_matrix;
  nlohmann::json meta = nlohmann::json::object();

  double top(int k) const;
  bool unity_inputs() const { return meta.value("unity_inputs", false); }
};

void to_json(nlohmann::json& j, const EvalReport& r);

/// Scores a precomputed |Q| x |G| distance matrix. Throws EvaluationError when no query has
/// a relevant gallery item.
EvalReport evaluate_distances(const torch::Tensor& distances, const std::vector<RowLabel>& query,
                              const std::vector<RowLabel>& gallery, const EvalProtocol& protocol, int num_cameras);

/// Distances from descriptors under `protocol.metric`, optionally re-ranked, then scored.
EvalReport evaluate_descriptors(const torch::Tensor& query_features, const torch::Tensor& gallery_features,
                                const std::vector<RowLabel>& query, const std::vector<RowLabel>& gallery,
                                const EvalProtocol& protocol, int num_cameras,
                                const std::optional<RerankOptions>& rerank = std::nullopt);

/// Query and gallery pixels at the model's resolution; with `transfers`, each image is first
/// replaced by its unity version from the transfer of its camera.
torch::Tensor split_inputs(const data::DatasetIndex& dataset, data::Split split, int64_t height, int64_t width,
                           std::vector<gan::TransferModel>* transfers = nullptr);

/// Full evaluation of a model on the dataset's query/gallery splits. Throws ConfigError when
/// `transfers` misses a camera and EvaluationError when the splits are empty.
EvalReport evaluate(reid::ReidModel& model, const data::DatasetIndex& dataset, const EvalProtocol& protocol,
                    std::vector<gan::TransferModel>* transfers = nullptr,
                    const std::optional<RerankOptions>& rerank = std::nullopt);

}  // namespace unitystyle::eval

#include "unitystyle/eval/evaluate.hpp"

#include <map>

#include "unitystyle/data/image_io.hpp"
#include "unitystyle/errors.hpp"
#include "unitystyle/eval/distance.hpp"
#include "unitystyle/reid/trainer.hpp"

namespace unitystyle::eval {

void to_json(nlohmann::json& j, const EvalProtocol& p) {
  j = nlohmann::json{{"name", p.name},
                     {"junk_same_camera", p.junk_same_camera},
                     {"distractors_as_junk", p.distractors_as_junk},
                     {"metric", p.metric},
                     {"ks", p.ks}};
}

void from_json(const nlohmann::json& j, EvalProtocol& p) {
  EvalProtocol d;
  p.name = j.value("name", d.name);
  p.junk_same_camera = j.value("junk_same_camera", d.junk_same_camera);
  p.distractors_as_junk = j.value("distractors_as_junk", d.distractors_as_junk);
  p.metric = j.value("metric", d.metric);
  p.ks = j.value("ks", d.ks);
}

std::vector<RowLabel> row_labels(const data::DatasetIndex& dataset, data::Split split) {
  std::vector<RowLabel> rows;
  for (auto i : dataset.indices(split)) {
    const auto& im = dataset.images[i];
    rows.push_back({im.person_id, im.camera_id, im.sequence_id});
  }
  return rows;
}

double EvalReport::top(int k) const {
  for (std::size_t i = 0; i < ks.size(); ++i) {
    if (ks[i] == k) return cmc[i];
  }
  throw ArgumentError("report has no CMC value at k=" + std::to_string(k));
}

void to_json(nlohmann::json& j, const EvalReport& r) {
  nlohmann::json cmc = nlohmann::json::object();
  for (std::size_t i = 0; i < r.ks.size(); ++i) cmc["top" + std::to_string(r.ks[i])] = r.cmc[i];
  nlohmann::json ap = nlohmann::json::array();
  for (const auto& v : r.per_query_ap) ap.push_back(v ? nlohmann::json(*v) : nlohmann::json(nullptr));
  nlohmann::json grid = nlohmann::json::array();
  for (const auto& row : r.camera_matrix) {
    nlohmann::json jr = nlohmann::json::array();
    for (const auto& v : row) jr.push_back(v ? nlohmann::json(*v) : nlohmann::json(nullptr));
    grid.push_back(jr);
  }
  j = nlohmann::json{{"cmc", cmc},         {"mAP", r.mAP},       {"per_query_ap", ap},
                     {"skipped_queries", r.skipped_queries}, {"camera_matrix", grid}, {"meta", r.meta}};
}

namespace {

bool is_junk(const RowLabel& q, const RowLabel& g, const EvalProtocol& protocol) {
  if (protocol.distractors_as_junk && g.person_id == data::kDistractorId) return true;
  return protocol.junk_same_camera && g.person_id == q.person_id && g.camera_id == q.camera_id;
}

}  // namespace

EvalReport evaluate_distances(const torch::Tensor& distances, const std::vector<RowLabel>& query,
                              const std::vector<RowLabel>& gallery, const EvalProtocol& protocol, int num_cameras) {
  if (distances.dim() != 2 || distances.size(0) != static_cast<int64_t>(query.size()) ||
      distances.size(1) != static_cast<int64_t>(gallery.size())) {
    throw ArgumentError("distance matrix shape does not match the query/gallery labels");
  }
  EvalReport report;
  report.ks = protocol.ks;
  const auto order = rank_rows(distances).contiguous();
  const auto* o = order.data_ptr<int64_t>();
  const auto ng = static_cast<int64_t>(gallery.size());
  const auto C = static_cast<std::size_t>(num_cameras);

  std::vector<int64_t> first_hits;
  double ap_sum = 0.0;
  std::vector<std::vector<std::optional<bool>>> camera_hits;
  std::vector<int> query_cams;
  for (std::size_t i = 0; i < query.size(); ++i) {
    const auto& q = query[i];
    std::vector<int64_t> ranking(o + static_cast<int64_t>(i) * ng, o + (static_cast<int64_t>(i) + 1) * ng);
    IndexSet relevant, junk;
    for (int64_t g = 0; g < ng; ++g) {
      const auto& gl = gallery[static_cast<std::size_t>(g)];
      if (is_junk(q, gl, protocol)) {
        junk.insert(g);
      } else if (gl.person_id == q.person_id) {
        relevant.insert(g);
      }
    }
    const auto ap = average_precision(ranking, relevant, junk);
    if (ap.valid) {
      report.per_query_ap.push_back(ap.ap);
      ap_sum += ap.ap;
      first_hits.push_back(ap.first_hit);
    } else {
      report.per_query_ap.push_back(std::nullopt);
      ++report.skipped_queries;
    }

    // Top-1 per gallery camera. Within the query's own camera only same-sequence items of
    // the same identity are excluded.
    if (num_cameras >= 2) {
      std::vector<std::optional<bool>> row(C);
      for (std::size_t cam = 1; cam <= C; ++cam) {
        bool has_relevant = false;
        std::optional<bool> top1;
        for (auto g : ranking) {
          const auto& gl = gallery[static_cast<std::size_t>(g)];
          if (gl.camera_id != static_cast<int>(cam)) continue;
          if (protocol.distractors_as_junk && gl.person_id == data::kDistractorId) continue;
          if (gl.person_id == q.person_id && gl.camera_id == q.camera_id && gl.sequence_id == q.sequence_id) continue;
          if (!top1) top1 = gl.person_id == q.person_id;
          if (gl.person_id == q.person_id) {
            has_relevant = true;
            break;
          }
        }
        if (has_relevant) row[cam - 1] = top1;
      }
      camera_hits.push_back(std::move(row));
      query_cams.push_back(q.camera_id);
    }
  }
  if (first_hits.empty()) throw EvaluationError("no query has a relevant gallery item; nothing to evaluate");
  report.mAP = ap_sum / static_cast<double>(first_hits.size());
  report.cmc = cmc_from_first_hits(first_hits, protocol.ks);
  if (num_cameras >= 2) report.camera_matrix = camera_accuracy_matrix(camera_hits, query_cams, num_cameras);
  report.meta["protocol"] = protocol;
  report.meta["num_queries"] = query.size();
  report.meta["num_gallery"] = gallery.size();
  return report;
}

EvalReport evaluate_descriptors(const torch::Tensor& query_features, const torch::Tensor& gallery_features,
                                const std::vector<RowLabel>& query, const std::vector<RowLabel>& gallery,
                                const EvalProtocol& protocol, int num_cameras,
                                const std::optional<RerankOptions>& rerank_options) {
  torch::Tensor distances;
  if (rerank_options) {
    distances = rerank_features(query_features, gallery_features, *rerank_options, protocol.metric);
  } else {
    distances = pairwise_distances(query_features, gallery_features, protocol.metric);
  }
  auto report = evaluate_distances(distances, query, gallery, protocol, num_cameras);
  report.meta["reranked"] = rerank_options.has_value();
  if (rerank_options) report.meta["rerank"] = *rerank_options;
  return report;
}

torch::Tensor split_inputs(const data::DatasetIndex& dataset, data::Split split, int64_t height, int64_t width,
                           std::vector<gan::TransferModel>* transfers) {
  std::map<int, gan::TransferModel*> by_camera;
  if (transfers != nullptr) {
    for (auto& t : *transfers) by_camera[t.camera_id] = &t;
  }
  std::vector<torch::Tensor> images;
  for (auto i : dataset.indices(split)) {
    const auto& im = dataset.images[i];
    auto pixels = data::load_pixels(im);
    if (transfers != nullptr) {
      auto it = by_camera.find(im.camera_id);
      if (it == by_camera.end()) throw ConfigError("no transfer model for camera " + std::to_string(im.camera_id));
      pixels = gan::generate_unity(pixels, *it->second, im.camera_id);
    }
    images.push_back(data::resize(pixels, height, width));
  }
  if (images.empty()) return torch::zeros({0, 3, height, width});
  return torch::stack(images);
}

EvalReport evaluate(reid::ReidModel& model, const data::DatasetIndex& dataset, const EvalProtocol& protocol,
                    std::vector<gan::TransferModel>* transfers, const std::optional<RerankOptions>& rerank_options) {
  if (dataset.indices(data::Split::kQuery).empty() || dataset.indices(data::Split::kGallery).empty()) {
    throw EvaluationError("dataset needs non-empty query and gallery splits");
  }
  auto qf = reid::extract_features(
      model, split_inputs(dataset, data::Split::kQuery, model->height(), model->width(), transfers));
  auto gf = reid::extract_features(
      model, split_inputs(dataset, data::Split::kGallery, model->height(), model->width(), transfers));
  auto report = evaluate_descriptors(qf, gf, row_labels(dataset, data::Split::kQuery),
                                     row_labels(dataset, data::Split::kGallery), protocol, dataset.num_cameras,
                                     rerank_options);
  report.meta["unity_inputs"] = transfers != nullptr;
  report.meta["model"] = {{"backbone", model->backbone_name()},
                          {"num_classes", model->num_classes()},
                          {"descriptor_dim", model->descriptor_dim()}};
  return report;
}

}  // namespace unitystyle::eval

#pragma once

#include <cstdint>
#include <vector>

#include <nlohmann/json.hpp>

#include "unitystyle/data/camera_style.hpp"
#include "unitystyle/data/dataset.hpp"

namespace unitystyle::data {

struct SyntheticConfig {
  int num_ids = 20;
  int num_cameras = 4;
  int images_per_id_per_cam = 4;
  int height = 64;
  int width = 64;
  /// Fraction of identities assigned to the train split; the rest form query/gallery.
  double train_fraction = 0.5;
  uint64_t seed = 7;
  /// One entry per camera. Empty means default_camera_styles(num_cameras).
  std::vector<SyntheticStyleParams> styles;
};

void to_json(nlohmann::json& j, const SyntheticConfig& c);
void from_json(const nlohmann::json& j, SyntheticConfig& c);

/// Renders every identity as a procedural coloured-block figure and passes each view through its
/// camera's style. Deterministic in (config). Test identities get one query per camera; the
/// remaining views go to the gallery. Filenames follow the Market convention.
DatasetIndex make_synthetic_dataset(const SyntheticConfig& config);

/// The camera-neutral rendering of one view (before camera style). Exposed for tests.
torch::Tensor render_person(int person_id, int view, const SyntheticConfig& config);

/// JSON manifest stored next to a written corpus: seed, parameters, counts.
nlohmann::json synthetic_manifest(const SyntheticConfig& config, const DatasetIndex& dataset);

}  // namespace unitystyle::data

#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>
#include <torch/torch.h>

#include "unitystyle/data/augment.hpp"
#include "unitystyle/data/dataset.hpp"
#include "unitystyle/gan/transfer_model.hpp"
#include "unitystyle/reid/model.hpp"

namespace unitystyle::reid {

struct ReidTrainConfig {
  std::string backbone = "reduced";
  /// Optional archive of pre-trained backbone weights.
  std::string pretrained;
  int epochs = 50;
  /// Real images per batch; unity-augmented runs add the same number of unity images.
  int batch_n = 128;
  double learning_rate = 0.1;
  double momentum = 0.9;
  double weight_decay = 5e-4;
  /// Epoch at which the learning rate drops by `lr_decay_factor`; -1 selects 80% of `epochs`.
  int lr_decay_epoch = -1;
  double lr_decay_factor = 0.1;
  int height = 256;
  int width = 128;
  uint64_t seed = 0;
  data::AugmentConfig augment;

  int resolved_decay_epoch() const;
  void validate() const;
};

void to_json(nlohmann::json& j, const ReidTrainConfig& c);
void from_json(const nlohmann::json& j, ReidTrainConfig& c);

struct ReidEpochMetrics {
  int epoch = 0;
  double loss = 0.0;
  double accuracy = 0.0;  ///< training top-1 over real samples
  double learning_rate = 0.0;
  /// Images per optimisation step: batch_n, or 2 * batch_n with unity images.
  int64_t samples_per_step = 0;
};

nlohmann::json to_json_line(const ReidEpochMetrics& m);

struct ReidTrainResult {
  ReidModel model{nullptr};
  /// Person id to class label.
  std::map<int, int> label_map;
  std::vector<ReidEpochMetrics> history;
};

using ReidEpochCallback = std::function<void(const ReidEpochMetrics&)>;

/// Unity image of every training image, in `dataset.indices(kTrain)` order. Throws
/// ConfigError when a training camera has no transfer.
std::vector<torch::Tensor> pregenerate_unity(const data::DatasetIndex& dataset,
                                             std::vector<gan::TransferModel>& transfers);

/// Trains the IDE model. With `unity_train` (aligned with `dataset.indices(kTrain)`) each
/// step sees batch_n real and batch_n independently drawn unity images; without it, batch_n
/// real images. The same augmentation applies to both kinds of sample.
ReidTrainResult train_reid(const data::DatasetIndex& dataset, const std::vector<torch::Tensor>* unity_train,
                           const ReidTrainConfig& config, const ReidEpochCallback& on_epoch = {});

/// Generates unity images once with `transfers`, then trains as above.
ReidTrainResult train_reid(const data::DatasetIndex& dataset, std::vector<gan::TransferModel>& transfers,
                           const ReidTrainConfig& config, const ReidEpochCallback& on_epoch = {});

/// Loads and resizes images to the working resolution.
torch::Tensor load_resized(const data::PersonImage& image, int64_t height, int64_t width);

}  // namespace unitystyle::reid

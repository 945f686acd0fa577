#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <unordered_map>
#include <memory>
#include <random>
#include <vector>

#include <nlohmann/json.hpp>

#include "unitystyle/data/dataset.hpp"
#include "unitystyle/gan/transfer_model.hpp"

namespace unitystyle::gan {

struct TransferTrainConfig {
  int epochs = 50;
  /// Training resolution; overrides the generator spec's height/width.
  int height = 256;
  int width = 256;
  int batch_size = 1;
  double learning_rate = 2e-4;
  double beta1 = 0.5;
  double beta2 = 0.999;
  uint64_t seed = 0;
  double sln_decay = 0.99;
  GeneratorSpec generator;
  DiscriminatorSpec discriminator;
  LossWeights weights;
  /// Upper bound on decoded images held in memory.
  int cache_limit = 4096;

  /// Generator spec with the training resolution applied.
  GeneratorSpec resolved_generator() const;
  void validate() const;
};

void to_json(nlohmann::json& j, const TransferTrainConfig& c);
void from_json(const nlohmann::json& j, TransferTrainConfig& c);

/// Epoch means of the raw loss terms and of the optimised objective.
struct EpochMetrics {
  int epoch = 0;
  double gan = 0.0;
  double feature_matching = 0.0;
  double identity = 0.0;
  double cyclic = 0.0;
  double total = 0.0;
  double mean_attention = 0.0;
};

/// One JSON object per line: {epoch, L_GAN, L_FM, L_ID, L_CYC, total}.
nlohmann::json to_json_line(const EpochMetrics& m);

/// Trains the UnityGAN pair of one camera group: domain X is the camera's training images,
/// domain Y all training images. With attention enabled each step optimises the UnityStyle
/// loss against one uniformly drawn reference per camera; otherwise the plain UnityGAN loss
/// against one reference from Y. Adam, linear learning-rate decay over the final half.
class TransferTrainer {
 public:
  TransferTrainer(const data::DatasetIndex& dataset, int camera_id, TransferTrainConfig config);

  /// Continues from a per-epoch checkpoint written by `save_checkpoint`.
  void resume(const std::filesystem::path& checkpoint);

  using EpochCallback = std::function<void(const EpochMetrics&, TransferTrainer&)>;
  /// Runs the remaining epochs, or stops once `until_epoch` epochs are done. The callback
  /// fires after each epoch.
  TransferModel& run(const EpochCallback& on_epoch = {}, int until_epoch = -1);

  /// Model plus optimizer and RNG state.
  void save_checkpoint(const std::filesystem::path& path);

  TransferModel& model() { return model_; }
  const std::vector<double>& loss_trace() const { return loss_trace_; }
  int epochs_done() const { return epochs_done_; }
  int64_t steps_per_epoch() const;
  int64_t total_steps() const;

 private:
  torch::Tensor image(std::size_t dataset_index);
  double learning_rate_at(int64_t step) const;
  void step(const std::vector<std::size_t>& x_indices, EpochMetrics& accum);

  const data::DatasetIndex& dataset_;
  int camera_id_;
  TransferTrainConfig config_;
  TransferModel model_;
  std::unique_ptr<torch::optim::Adam> optim_g_;
  std::unique_ptr<torch::optim::Adam> optim_d_;
  std::mt19937_64 rng_;
  std::vector<std::size_t> domain_x_;
  std::vector<std::size_t> domain_y_;
  std::vector<std::vector<std::size_t>> per_camera_;
  std::unordered_map<std::size_t, torch::Tensor> cache_;
  std::vector<double> loss_trace_;
  int epochs_done_ = 0;
  int64_t step_ = 0;
};

/// Convenience wrapper: constructs a trainer and runs it to completion.
TransferModel train_transfer(const data::DatasetIndex& dataset, int camera_id, const TransferTrainConfig& config,
                             const TransferTrainer::EpochCallback& on_epoch = {});

}  // namespace unitystyle::gan

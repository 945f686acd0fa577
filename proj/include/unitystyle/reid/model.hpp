#pragma once

#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>
#include <torch/torch.h>

#include "unitystyle/reid/backbone.hpp"

namespace unitystyle::reid {

struct ReidOutput {
  torch::Tensor descriptor;  ///< N x D, taken before the classifier head
  torch::Tensor logits;      ///< N x num_classes
};

/// IDE model: backbone descriptor followed by two fully connected layers,
/// D -> 512 (batch norm + ReLU) -> num_classes.
class ReidModelImpl : public torch::nn::Module {
 public:
  ReidModelImpl(std::shared_ptr<Backbone> backbone, int64_t num_classes, int64_t height, int64_t width);

  ReidOutput forward(const torch::Tensor& x);
  torch::Tensor descriptor(const torch::Tensor& x);

  int64_t num_classes() const { return num_classes_; }
  int64_t descriptor_dim() const { return backbone_->descriptor_dim(); }
  int64_t height() const { return height_; }
  int64_t width() const { return width_; }
  const std::string& backbone_name() const { return backbone_name_; }
  Backbone& backbone() { return *backbone_; }

  static constexpr int64_t kHiddenWidth = 512;

 private:
  std::shared_ptr<Backbone> backbone_;
  torch::nn::Linear fc1_{nullptr}, fc2_{nullptr};
  torch::nn::BatchNorm1d bn_{nullptr};
  int64_t num_classes_;
  int64_t height_, width_;
  std::string backbone_name_;
};
TORCH_MODULE(ReidModel);

/// Throws ConfigError when num_classes < 2 or the backbone name is unknown.
ReidModel build_reid_model(int64_t num_classes, const std::string& backbone_name, int64_t height = 256,
                           int64_t width = 128, const std::filesystem::path& pretrained = {});

/// Versioned single-file archive (kind "reid"). `extra` is stored as JSON alongside the
/// architecture metadata.
void save_reid_model(ReidModel& model, const std::filesystem::path& path, const nlohmann::json& extra = {});

struct LoadedReidModel {
  ReidModel model{nullptr};
  nlohmann::json extra;
};

LoadedReidModel load_reid_model(const std::filesystem::path& path);

/// One descriptor row per image, in inference mode and without gradients. Accepts an NCHW
/// batch; an empty batch yields a 0 x D matrix. Throws ArgumentError when the resolution
/// differs from the model's.
torch::Tensor extract_features(ReidModel& model, const torch::Tensor& images, int64_t chunk = 64);
torch::Tensor extract_features(ReidModel& model, const std::vector<torch::Tensor>& images, int64_t chunk = 64);

}  // namespace unitystyle::reid

#pragma once

#include <array>
#include <random>

#include <nlohmann/json.hpp>
#include <torch/torch.h>

namespace unitystyle::data {

/// Training-time augmentations for re-ID inputs: padded random crop, horizontal flip and
/// random erasing.
struct AugmentConfig {
  bool random_crop = true;
  int crop_padding = 10;
  bool horizontal_flip = true;
  double flip_probability = 0.5;
  bool random_erasing = true;
  double erase_probability = 0.5;
  double erase_area_min = 0.02;
  double erase_area_max = 0.4;
  double erase_aspect_min = 0.3;
  double erase_aspect_max = 3.3;
  /// Fill value of erased regions, per channel.
  std::array<double, 3> erase_fill{0.4914, 0.4822, 0.4465};

  static AugmentConfig disabled();
};

void to_json(nlohmann::json& j, const AugmentConfig& c);
void from_json(const nlohmann::json& j, AugmentConfig& c);

/// Applies the enabled augmentations to a 3xHxW tensor. Output has the input resolution.
torch::Tensor augment(const torch::Tensor& image, const AugmentConfig& config, std::mt19937_64& rng);

}  // namespace unitystyle::data

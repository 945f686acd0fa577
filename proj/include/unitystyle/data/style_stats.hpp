#pragma once

#include <array>
#include <vector>

#include <torch/torch.h>

namespace unitystyle::data {

struct StyleStats {
  std::array<double, 3> channel_means{};
  std::array<double, 3> channel_stds{};
  /// Row-major 5x5 Gram matrix of the fixed shallow filter bank, when requested.
  std::vector<double> gram_summary;
};

/// Pooled per-channel mean and (population) standard deviation over every pixel of every
/// image. With `with_gram`, also the mean Gram matrix of the filter bank
/// {R, G, B, Sobel-x(luma), Sobel-y(luma)} normalised by pixel count.
/// Throws ArgumentError on an empty collection or mixed resolutions.
StyleStats style_statistics(const std::vector<torch::Tensor>& images, bool with_gram = false);

/// Mean over channels of the population standard deviation, across cameras, of per-camera
/// channel means. The scalar used to measure how far camera styles are apart.
double between_camera_spread(const std::vector<StyleStats>& per_camera);

}  // namespace unitystyle::data

#pragma once

#include <array>
#include <cstdint>

#include <nlohmann/json.hpp>
#include <torch/torch.h>

namespace unitystyle::data {

/// Photometric signature of one synthetic camera.
struct SyntheticStyleParams {
  double gamma = 1.0;
  std::array<double, 3> channel_gain{1.0, 1.0, 1.0};
  double brightness_offset = 0.0;
  /// Rotation about the grey axis of RGB space, radians.
  double hue_rotation = 0.0;
  double noise_sigma = 0.0;

  bool is_identity() const;
  /// Throws ConfigError on non-positive gamma/gains or negative sigma.
  void validate() const;
};

void to_json(nlohmann::json& j, const SyntheticStyleParams& p);
void from_json(const nlohmann::json& j, SyntheticStyleParams& p);

/// clamp(gain * hue_rotate(image)^gamma + offset + noise) on a CHW or NCHW tensor in [0,1].
/// Noise is drawn from a generator seeded with `noise_seed`. Identity parameters return the
/// input bit-for-bit.
torch::Tensor apply_camera_style(const torch::Tensor& image, const SyntheticStyleParams& params,
                                 uint64_t noise_seed = 0);

/// A spread of distinct camera styles used by the default synthetic corpus.
std::vector<SyntheticStyleParams> default_camera_styles(int num_cameras);

}  // namespace unitystyle::data

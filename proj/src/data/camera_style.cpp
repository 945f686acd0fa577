#include "unitystyle/data/camera_style.hpp"

#include <ATen/CPUGeneratorImpl.h>

#include <cmath>

#include "unitystyle/errors.hpp"

namespace unitystyle::data {

bool SyntheticStyleParams::is_identity() const {
  return gamma == 1.0 && channel_gain == std::array<double, 3>{1.0, 1.0, 1.0} && brightness_offset == 0.0 &&
         hue_rotation == 0.0 && noise_sigma == 0.0;
}

void SyntheticStyleParams::validate() const {
  if (!(gamma > 0.0)) throw ConfigError("camera style gamma must be positive");
  for (double g : channel_gain) {
    if (!(g > 0.0)) throw ConfigError("camera style channel gains must be positive");
  }
  if (!(noise_sigma >= 0.0)) throw ConfigError("camera style noise sigma must be non-negative");
}

void to_json(nlohmann::json& j, const SyntheticStyleParams& p) {
  j = nlohmann::json{{"gamma", p.gamma},
                     {"channel_gain", p.channel_gain},
                     {"brightness_offset", p.brightness_offset},
                     {"hue_rotation", p.hue_rotation},
                     {"noise_sigma", p.noise_sigma}};
}

void from_json(const nlohmann::json& j, SyntheticStyleParams& p) {
  p.gamma = j.value("gamma", 1.0);
  p.channel_gain = j.value("channel_gain", std::array<double, 3>{1.0, 1.0, 1.0});
  p.brightness_offset = j.value("brightness_offset", 0.0);
  p.hue_rotation = j.value("hue_rotation", 0.0);
  p.noise_sigma = j.value("noise_sigma", 0.0);
}

namespace {

torch::Tensor hue_rotate(const torch::Tensor& image, double theta) {
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  const double k = (1.0 - c) / 3.0;
  const double r = std::sqrt(1.0 / 3.0) * s;
  auto m = torch::tensor({c + k, k - r, k + r,  //
                          k + r, c + k, k - r,  //
                          k - r, k + r, c + k},
                         image.options())
               .view({3, 3});
  // channel dim is -3 for both CHW and NCHW
  auto moved = image.movedim(-3, -1);
  return torch::matmul(moved, m.t()).movedim(-1, -3);
}

}  // namespace

torch::Tensor apply_camera_style(const torch::Tensor& image, const SyntheticStyleParams& params, uint64_t noise_seed) {
  params.validate();
  if (params.is_identity()) {
    return image;
  }
  auto out = image;
  if (params.hue_rotation != 0.0) {
    out = hue_rotate(out, params.hue_rotation).clamp(0.0, 1.0);
  }
  if (params.gamma != 1.0) {
    out = out.pow(params.gamma);
  }
  if (params.channel_gain != std::array<double, 3>{1.0, 1.0, 1.0}) {
    auto gain = torch::tensor({params.channel_gain[0], params.channel_gain[1], params.channel_gain[2]}, out.options())
                    .view({3, 1, 1});
    out = out * gain;
  }
  if (params.brightness_offset != 0.0) {
    out = out + params.brightness_offset;
  }
  if (params.noise_sigma > 0.0) {
    auto gen = at::detail::createCPUGenerator(noise_seed);
    out = out + torch::randn(out.sizes(), gen, out.options()) * params.noise_sigma;
  }
  return out.clamp(0.0, 1.0);
}

std::vector<SyntheticStyleParams> default_camera_styles(int num_cameras) {
  // Cycled palette of clearly separated camera looks.
  static const SyntheticStyleParams palette[] = {
      {1.0, {1.0, 1.0, 1.0}, 0.0, 0.0, 0.01},
      {1.8, {1.1, 0.95, 0.8}, 0.05, 0.35, 0.01},
      {0.6, {0.8, 0.95, 1.2}, -0.05, -0.35, 0.01},
      {1.3, {0.9, 1.2, 0.9}, -0.1, 0.8, 0.01},
      {0.8, {1.2, 0.85, 1.0}, 0.08, -0.8, 0.01},
      {2.2, {1.0, 1.0, 1.25}, 0.1, 1.4, 0.01},
      {0.5, {1.15, 1.1, 0.85}, -0.12, -1.4, 0.01},
      {1.5, {0.85, 0.9, 0.9}, 0.0, 2.2, 0.01},
  };
  constexpr int kPalette = sizeof(palette) / sizeof(palette[0]);
  std::vector<SyntheticStyleParams> styles;
  for (int c = 0; c < num_cameras; ++c) styles.push_back(palette[c % kPalette]);
  return styles;
}

}  // namespace unitystyle::data

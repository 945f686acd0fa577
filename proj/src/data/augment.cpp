#include "unitystyle/data/augment.hpp"

#include <cmath>

namespace unitystyle::data {

AugmentConfig AugmentConfig::disabled() {
  AugmentConfig c;
  c.random_crop = false;
  c.horizontal_flip = false;
  c.random_erasing = false;
  return c;
}

void to_json(nlohmann::json& j, const AugmentConfig& c) {
  j = nlohmann::json{{"random_crop", c.random_crop},
                     {"crop_padding", c.crop_padding},
                     {"horizontal_flip", c.horizontal_flip},
                     {"flip_probability", c.flip_probability},
                     {"random_erasing", c.random_erasing},
                     {"erase_probability", c.erase_probability},
                     {"erase_area", {c.erase_area_min, c.erase_area_max}},
                     {"erase_aspect", {c.erase_aspect_min, c.erase_aspect_max}},
                     {"erase_fill", c.erase_fill}};
}

void from_json(const nlohmann::json& j, AugmentConfig& c) {
  AugmentConfig d;
  c.random_crop = j.value("random_crop", d.random_crop);
  c.crop_padding = j.value("crop_padding", d.crop_padding);
  c.horizontal_flip = j.value("horizontal_flip", d.horizontal_flip);
  c.flip_probability = j.value("flip_probability", d.flip_probability);
  c.random_erasing = j.value("random_erasing", d.random_erasing);
  c.erase_probability = j.value("erase_probability", d.erase_probability);
  auto area = j.value("erase_area", std::array<double, 2>{d.erase_area_min, d.erase_area_max});
  auto aspect = j.value("erase_aspect", std::array<double, 2>{d.erase_aspect_min, d.erase_aspect_max});
  c.erase_area_min = area[0];
  c.erase_area_max = area[1];
  c.erase_aspect_min = aspect[0];
  c.erase_aspect_max = aspect[1];
  c.erase_fill = j.value("erase_fill", d.erase_fill);
}

torch::Tensor augment(const torch::Tensor& image, const AugmentConfig& config, std::mt19937_64& rng) {
  const int64_t H = image.size(-2), W = image.size(-1);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto out = image;

  if (config.random_crop && config.crop_padding > 0) {
    const int64_t p = config.crop_padding;
    auto padded = torch::constant_pad_nd(out, {p, p, p, p}, 0.0);
    std::uniform_int_distribution<int64_t> offset(0, 2 * p);
    const int64_t dy = offset(rng), dx = offset(rng);
    out = padded.slice(-2, dy, dy + H).slice(-1, dx, dx + W);
  }

  if (config.horizontal_flip && unit(rng) < config.flip_probability) {
    out = out.flip({-1});
  }

  if (config.random_erasing && unit(rng) < config.erase_probability) {
    const double area = static_cast<double>(H * W);
    for (int attempt = 0; attempt < 100; ++attempt) {
      const double target = area * (config.erase_area_min + (config.erase_area_max - config.erase_area_min) * unit(rng));
      const double aspect = config.erase_aspect_min + (config.erase_aspect_max - config.erase_aspect_min) * unit(rng);
      const auto h = static_cast<int64_t>(std::lround(std::sqrt(target * aspect)));
      const auto w = static_cast<int64_t>(std::lround(std::sqrt(target / aspect)));
      if (h < H && w < W && h > 0 && w > 0) {
        std::uniform_int_distribution<int64_t> ys(0, H - h), xs(0, W - w);
        const int64_t y0 = ys(rng), x0 = xs(rng);
        out = out.clone();
        for (int64_t ch = 0; ch < 3; ++ch) {
          out.select(-3, ch).slice(-2, y0, y0 + h).slice(-1, x0, x0 + w).fill_(config.erase_fill[static_cast<std::size_t>(ch)]);
        }
        break;
      }
    }
  }
  return out.contiguous();
}

}  // namespace unitystyle::data

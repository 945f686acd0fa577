#include "unitystyle/data/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "unitystyle/errors.hpp"

namespace unitystyle::data {

void to_json(nlohmann::json& j, const SyntheticConfig& c) {
  j = nlohmann::json{{"num_ids", c.num_ids},
                     {"num_cameras", c.num_cameras},
                     {"images_per_id_per_cam", c.images_per_id_per_cam},
                     {"height", c.height},
                     {"width", c.width},
                     {"train_fraction", c.train_fraction},
                     {"seed", c.seed},
                     {"styles", c.styles}};
}

void from_json(const nlohmann::json& j, SyntheticConfig& c) {
  SyntheticConfig d;
  c.num_ids = j.value("num_ids", d.num_ids);
  c.num_cameras = j.value("num_cameras", d.num_cameras);
  c.images_per_id_per_cam = j.value("images_per_id_per_cam", d.images_per_id_per_cam);
  c.height = j.value("height", d.height);
  c.width = j.value("width", d.width);
  c.train_fraction = j.value("train_fraction", d.train_fraction);
  c.seed = j.value("seed", d.seed);
  c.styles = j.value("styles", std::vector<SyntheticStyleParams>{});
}

namespace {

using Rgb = std::array<float, 3>;

Rgb hsv_to_rgb(double h, double s, double v) {
  h = std::fmod(h, 1.0) * 6.0;
  const int sector = static_cast<int>(h) % 6;
  const double f = h - std::floor(h);
  const double p = v * (1 - s), q = v * (1 - s * f), t = v * (1 - s * (1 - f));
  switch (sector) {
    case 0: return {float(v), float(t), float(p)};
    case 1: return {float(q), float(v), float(p)};
    case 2: return {float(p), float(v), float(t)};
    case 3: return {float(p), float(q), float(v)};
    case 4: return {float(t), float(p), float(v)};
    default: return {float(v), float(p), float(q)};
  }
}

/// Appearance that defines an identity; fixed across cameras and views.
struct Outfit {
  Rgb skin, hair, torso, stripe, legs, shoes;
  bool has_stripe;
  bool has_bag;
  Rgb bag;
  double build;   // torso width factor
  double height;  // figure height factor
};

Outfit make_outfit(int person_id, uint64_t seed) {
  std::mt19937_64 rng(seed * 1000003ULL + static_cast<uint64_t>(person_id) * 7919ULL + 17ULL);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  static const Rgb skins[] = {{0.94f, 0.80f, 0.69f}, {0.78f, 0.57f, 0.44f}, {0.55f, 0.38f, 0.26f}};
  Outfit o;
  o.skin = skins[static_cast<int>(u(rng) * 3) % 3];
  o.hair = hsv_to_rgb(0.08, 0.6, 0.1 + 0.3 * u(rng));
  o.torso = hsv_to_rgb(u(rng), 0.45 + 0.5 * u(rng), 0.35 + 0.6 * u(rng));
  o.stripe = hsv_to_rgb(u(rng), 0.3 + 0.6 * u(rng), 0.3 + 0.7 * u(rng));
  o.legs = hsv_to_rgb(u(rng), 0.2 + 0.6 * u(rng), 0.15 + 0.6 * u(rng));
  o.shoes = hsv_to_rgb(u(rng), 0.2 * u(rng), 0.1 + 0.3 * u(rng));
  o.has_stripe = u(rng) < 0.5;
  o.has_bag = u(rng) < 0.4;
  o.bag = hsv_to_rgb(u(rng), 0.5 * u(rng), 0.2 + 0.5 * u(rng));
  o.build = 0.85 + 0.3 * u(rng);
  o.height = 0.9 + 0.1 * u(rng);
  return o;
}

struct Canvas {
  int h, w;
  std::vector<float> data;  // CHW

  Canvas(int height, int width) : h(height), w(width), data(static_cast<std::size_t>(3 * height * width), 0.0f) {}

  void set(int y, int x, const Rgb& c) {
    if (y < 0 || y >= h || x < 0 || x >= w) return;
    for (int ch = 0; ch < 3; ++ch) data[static_cast<std::size_t>((ch * h + y) * w + x)] = c[ch];
  }
  void rect(double y0, double x0, double y1, double x1, const Rgb& c) {
    for (int y = static_cast<int>(std::floor(y0)); y < static_cast<int>(std::ceil(y1)); ++y) {
      for (int x = static_cast<int>(std::floor(x0)); x < static_cast<int>(std::ceil(x1)); ++x) set(y, x, c);
    }
  }
  void ellipse(double cy, double cx, double ry, double rx, const Rgb& c) {
    for (int y = static_cast<int>(cy - ry); y <= static_cast<int>(cy + ry) + 1; ++y) {
      for (int x = static_cast<int>(cx - rx); x <= static_cast<int>(cx + rx) + 1; ++x) {
        const double dy = (y + 0.5 - cy) / ry, dx = (x + 0.5 - cx) / rx;
        if (dy * dy + dx * dx <= 1.0) set(y, x, c);
      }
    }
  }
};

}  // namespace

torch::Tensor render_person(int person_id, int view, const SyntheticConfig& config) {
  const Outfit outfit = make_outfit(person_id, config.seed);
  std::mt19937_64 rng(config.seed * 2654435761ULL + static_cast<uint64_t>(person_id) * 40503ULL +
                      static_cast<uint64_t>(view) * 97ULL + 3ULL);
  std::uniform_real_distribution<double> u(0.0, 1.0);

  const int H = config.height, W = config.width;
  Canvas canvas(H, W);

  // Background: muted vertical gradient, varies per view.
  const double bg_hue = u(rng), bg_val = 0.45 + 0.35 * u(rng);
  for (int y = 0; y < H; ++y) {
    const Rgb c = hsv_to_rgb(bg_hue, 0.12, bg_val * (0.85 + 0.15 * y / std::max(1, H - 1)));
    for (int x = 0; x < W; ++x) canvas.set(y, x, c);
  }

  const double scale = outfit.height * (0.92 + 0.08 * u(rng));
  const double fig_h = 0.9 * H * scale;
  const double top = (H - fig_h) * (0.3 + 0.4 * u(rng));
  const double cx = W * (0.5 + 0.08 * (u(rng) - 0.5));
  const double body_w = W * 0.16 * outfit.build * (H >= W ? 1.0 : 0.5);
  const bool mirrored = u(rng) < 0.5;

  const double head_r = fig_h * 0.075;
  const double head_cy = top + head_r;
  canvas.ellipse(head_cy, cx, head_r, head_r * 0.85, outfit.skin);
  canvas.rect(top, cx - head_r * 0.85, top + head_r * 0.6, cx + head_r * 0.85, outfit.hair);

  const double torso_top = top + 2 * head_r;
  const double torso_bot = torso_top + fig_h * 0.38;
  canvas.rect(torso_top, cx - body_w, torso_bot, cx + body_w, outfit.torso);
  if (outfit.has_stripe) {
    const double band = (torso_bot - torso_top) * 0.18;
    const double mid = (torso_top + torso_bot) * 0.5;
    canvas.rect(mid - band, cx - body_w, mid + band, cx + body_w, outfit.stripe);
  }
  // arms
  const double arm_w = body_w * 0.35;
  canvas.rect(torso_top, cx - body_w - arm_w, torso_bot - fig_h * 0.05, cx - body_w, outfit.torso);
  canvas.rect(torso_top, cx + body_w, torso_bot - fig_h * 0.05, cx + body_w + arm_w, outfit.torso);

  const double leg_bot = top + fig_h * 0.95;
  const double gap = body_w * 0.12;
  const double stride = body_w * 0.25 * (u(rng) - 0.5);
  canvas.rect(torso_bot, cx - body_w * 0.9 + stride, leg_bot, cx - gap + stride, outfit.legs);
  canvas.rect(torso_bot, cx + gap - stride, leg_bot, cx + body_w * 0.9 - stride, outfit.legs);
  canvas.rect(leg_bot, cx - body_w * 0.95 + stride, top + fig_h, cx - gap + stride, outfit.shoes);
  canvas.rect(leg_bot, cx + gap - stride, top + fig_h, cx + body_w * 0.95 - stride, outfit.shoes);

  if (outfit.has_bag) {
    const double side = mirrored ? -1.0 : 1.0;
    const double bx = cx + side * (body_w + arm_w);
    canvas.rect(torso_bot - fig_h * 0.12, std::min(bx, bx + side * body_w * 0.7), torso_bot + fig_h * 0.05,
                std::max(bx, bx + side * body_w * 0.7), outfit.bag);
  }

  auto image = torch::from_blob(canvas.data.data(), {3, H, W}, torch::kFloat32).clone();
  return image;
}

DatasetIndex make_synthetic_dataset(const SyntheticConfig& config) {
  if (config.num_ids < 2) throw ConfigError("synthetic corpus needs at least 2 identities");
  if (config.num_cameras < 2) throw ConfigError("synthetic corpus needs at least 2 cameras");
  if (config.images_per_id_per_cam < 1) throw ConfigError("images_per_id_per_cam must be >= 1");
  if (config.height < 8 || config.width < 8) throw ConfigError("synthetic images must be at least 8x8");
  auto styles = config.styles.empty() ? default_camera_styles(config.num_cameras) : config.styles;
  if (static_cast<int>(styles.size()) < config.num_cameras) {
    throw ConfigError("synthetic corpus has " + std::to_string(config.num_cameras) + " cameras but only " +
                      std::to_string(styles.size()) + " style parameter sets");
  }
  for (const auto& s : styles) s.validate();

  std::vector<int> ids(static_cast<std::size_t>(config.num_ids));
  std::iota(ids.begin(), ids.end(), 1);
  std::mt19937_64 split_rng(config.seed);
  std::shuffle(ids.begin(), ids.end(), split_rng);
  int num_train = static_cast<int>(std::lround(config.num_ids * config.train_fraction));
  num_train = std::clamp(num_train, 1, config.num_ids - 1);
  std::vector<bool> is_train(static_cast<std::size_t>(config.num_ids) + 1, false);
  for (int i = 0; i < num_train; ++i) is_train[static_cast<std::size_t>(ids[static_cast<std::size_t>(i)])] = true;

  DatasetIndex index;
  index.layout_name = "market1501";
  index.num_cameras = config.num_cameras;
  int frame = 0;
  for (int pid = 1; pid <= config.num_ids; ++pid) {
    for (int cam = 1; cam <= config.num_cameras; ++cam) {
      for (int k = 0; k < config.images_per_id_per_cam; ++k) {
        // Every camera sees the same poses, so per-camera statistics differ only by style.
        const int view = k;
        const uint64_t noise_seed = config.seed * 6364136223846793005ULL + static_cast<uint64_t>(++frame);
        auto pixels = apply_camera_style(render_person(pid, view, config),
                                         styles[static_cast<std::size_t>(cam - 1)], noise_seed);
        Split split = Split::kTrain;
        if (!is_train[static_cast<std::size_t>(pid)]) split = k == 0 ? Split::kQuery : Split::kGallery;
        FileLabel label{pid, cam, k + 1};
        PersonImage image;
        image.source = split_directory(split);
        image.source /= format_market_filename(label, frame);
        image.person_id = pid;
        image.camera_id = cam;
        image.sequence_id = k + 1;
        image.split = split;
        image.pixels = pixels;
        index.images.push_back(std::move(image));
      }
    }
  }
  index.finalize();
  return index;
}

nlohmann::json synthetic_manifest(const SyntheticConfig& config, const DatasetIndex& dataset) {
  auto resolved = config;
  if (resolved.styles.empty()) resolved.styles = default_camera_styles(config.num_cameras);
  return nlohmann::json{{"generator", "synthetic-blocks"},
                        {"seed", config.seed},
                        {"parameters", resolved},
                        {"layout", dataset.layout_name},
                        {"counts",
                         {{"train", dataset.split_counts.at(Split::kTrain)},
                          {"query", dataset.split_counts.at(Split::kQuery)},
                          {"gallery", dataset.split_counts.at(Split::kGallery)},
                          {"train_identities", dataset.num_identities},
                          {"cameras", dataset.num_cameras}}}};
}

}  // namespace unitystyle::data

#include "unitystyle/data/style_stats.hpp"

#include <cmath>

#include "unitystyle/errors.hpp"

namespace unitystyle::data {

namespace {

torch::Tensor filter_bank_responses(const torch::Tensor& image) {
  auto x = image.to(torch::kFloat64).unsqueeze(0);
  auto luma = (x.select(1, 0) * 0.299 + x.select(1, 1) * 0.587 + x.select(1, 2) * 0.114).unsqueeze(1);
  auto sobel_x = torch::tensor({-1.0, 0.0, 1.0, -2.0, 0.0, 2.0, -1.0, 0.0, 1.0}, torch::kFloat64).view({1, 1, 3, 3});
  auto sobel_y = sobel_x.transpose(2, 3).contiguous();
  auto padded = torch::replication_pad2d(luma, {1, 1, 1, 1});
  auto gx = torch::conv2d(padded, sobel_x);
  auto gy = torch::conv2d(padded, sobel_y);
  return torch::cat({x, gx, gy}, 1).squeeze(0).flatten(1);  // 5 x HW
}

}  // namespace

StyleStats style_statistics(const std::vector<torch::Tensor>& images, bool with_gram) {
  if (images.empty()) throw ArgumentError("style_statistics needs at least one image");
  const auto h = images.front().size(-2), w = images.front().size(-1);
  std::array<double, 3> sum{}, sum_sq{};
  torch::Tensor gram;
  for (const auto& image : images) {
    if (image.dim() != 3 || image.size(0) != 3) throw ArgumentError("style_statistics expects 3xHxW images");
    if (image.size(1) != h || image.size(2) != w) throw ArgumentError("style_statistics needs a uniform resolution");
    auto d = image.detach().to(torch::kFloat64).flatten(1);
    auto s = d.sum(1), s2 = d.square().sum(1);
    for (int c = 0; c < 3; ++c) {
      sum[static_cast<std::size_t>(c)] += s[c].item<double>();
      sum_sq[static_cast<std::size_t>(c)] += s2[c].item<double>();
    }
    if (with_gram) {
      auto f = filter_bank_responses(image.detach());
      auto g = torch::matmul(f, f.t()) / static_cast<double>(h * w);
      gram = gram.defined() ? gram + g : g;
    }
  }
  const double n = static_cast<double>(images.size()) * static_cast<double>(h * w);
  StyleStats stats;
  for (std::size_t c = 0; c < 3; ++c) {
    const double mean = sum[c] / n;
    stats.channel_means[c] = mean;
    stats.channel_stds[c] = std::sqrt(std::max(0.0, sum_sq[c] / n - mean * mean));
  }
  if (with_gram) {
    gram = (gram / static_cast<double>(images.size())).flatten().contiguous();
    stats.gram_summary.assign(gram.data_ptr<double>(), gram.data_ptr<double>() + gram.numel());
  }
  return stats;
}

double between_camera_spread(const std::vector<StyleStats>& per_camera) {
  if (per_camera.size() < 2) throw ArgumentError("between_camera_spread needs at least two cameras");
  const double n = static_cast<double>(per_camera.size());
  double total = 0.0;
  for (std::size_t c = 0; c < 3; ++c) {
    double mean = 0.0;
    for (const auto& s : per_camera) mean += s.channel_means[c];
    mean /= n;
    double var = 0.0;
    for (const auto& s : per_camera) var += (s.channel_means[c] - mean) * (s.channel_means[c] - mean);
    total += std::sqrt(var / n);
  }
  return total / 3.0;
}

}  // namespace unitystyle::data

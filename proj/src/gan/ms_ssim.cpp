#include "unitystyle/gan/ms_ssim.hpp"

#include <array>
#include <cmath>

#include "unitystyle/errors.hpp"

namespace unitystyle::gan {

namespace {

constexpr std::array<double, 5> kScaleWeights{0.0448, 0.2856, 0.3001, 0.2363, 0.1333};

torch::Tensor gaussian_window(int size, double sigma, const torch::TensorOptions& options) {
  auto coords = torch::arange(size, options) - static_cast<double>(size / 2);
  auto g = torch::exp(-(coords * coords) / (2.0 * sigma * sigma));
  return g / g.sum();
}

torch::Tensor blur(const torch::Tensor& x, const torch::Tensor& g) {
  const int64_t c = x.size(1);
  const int64_t n = g.size(0);
  auto gh = g.view({1, 1, 1, n}).expand({c, 1, 1, n});
  auto gv = g.view({1, 1, n, 1}).expand({c, 1, n, 1});
  auto out = torch::nn::functional::conv2d(x, gh, torch::nn::functional::Conv2dFuncOptions().groups(c));
  return torch::nn::functional::conv2d(out, gv, torch::nn::functional::Conv2dFuncOptions().groups(c));
}

}  // namespace

int ms_ssim_levels(int64_t height, int64_t width, const MsSsimOptions& options) {
  const int64_t side = std::min(height, width);
  if (side < 4) return 1;
  const int by_size = 1 + static_cast<int>(std::floor(std::log2(static_cast<double>(side) / 4.0)));
  return std::max(1, std::min({options.max_scales, by_size, static_cast<int>(kScaleWeights.size())}));
}

torch::Tensor ms_ssim(const torch::Tensor& x, const torch::Tensor& y, const MsSsimOptions& options) {
  if (x.sizes() != y.sizes() || x.dim() != 4) throw ArgumentError("ms_ssim expects two NCHW tensors of equal shape");
  const int levels = ms_ssim_levels(x.size(2), x.size(3), options);
  double weight_sum = 0.0;
  for (int j = 0; j < levels; ++j) weight_sum += kScaleWeights[static_cast<std::size_t>(j)];

  const double c1 = std::pow(options.k1 * options.data_range, 2);
  const double c2 = std::pow(options.k2 * options.data_range, 2);

  auto a = x, b = y;
  torch::Tensor result;
  for (int j = 0; j < levels; ++j) {
    int win = static_cast<int>(std::min<int64_t>(options.window, std::min(a.size(2), a.size(3))));
    if (win % 2 == 0) win -= 1;
    auto g = gaussian_window(win, options.sigma, a.options());
    auto mu_a = blur(a, g), mu_b = blur(b, g);
    auto mu_aa = mu_a * mu_a, mu_bb = mu_b * mu_b, mu_ab = mu_a * mu_b;
    auto s_aa = blur(a * a, g) - mu_aa;
    auto s_bb = blur(b * b, g) - mu_bb;
    auto s_ab = blur(a * b, g) - mu_ab;
    auto cs_map = (2.0 * s_ab + c2) / (s_aa + s_bb + c2);
    const double w = kScaleWeights[static_cast<std::size_t>(j)] / weight_sum;
    torch::Tensor term;
    if (j + 1 < levels) {
      term = cs_map.mean({1, 2, 3});
      a = torch::avg_pool2d(a, 2);
      b = torch::avg_pool2d(b, 2);
    } else {
      auto l_map = (2.0 * mu_ab + c1) / (mu_aa + mu_bb + c1);
      term = (l_map * cs_map).mean({1, 2, 3});
    }
    term = term.clamp_min(1e-8).pow(w);
    result = result.defined() ? result * term : term;
  }
  return result;
}

}  // namespace unitystyle::gan

#pragma once

#include <torch/torch.h>

namespace unitystyle::gan {

struct MsSsimOptions {
  int max_scales = 3;
  double k1 = 0.01;
  double k2 = 0.03;
  double data_range = 1.0;
  int window = 11;
  double sigma = 1.5;
};

/// Number of scales actually used for an HxW input: min(max_scales, 1 + floor(log2(min(H,W)/4))),
/// so the coarsest scale is at least 4 pixels per side.
int ms_ssim_levels(int64_t height, int64_t width, const MsSsimOptions& options = {});

/// Multi-scale SSIM per image (returns shape N) for NCHW batches in [0, data_range].
/// The Gaussian window shrinks to the largest odd size that fits each scale. Scale exponents
/// are the standard five-scale weights truncated to the levels used and renormalised.
/// Identical inputs give exactly 1.
torch::Tensor ms_ssim(const torch::Tensor& x, const torch::Tensor& y, const MsSsimOptions& options = {});

}  // namespace unitystyle::gan

#pragma once

#include <functional>
#include <vector>

#include <torch/torch.h>

#include "unitystyle/gan/discriminator.hpp"
#include "unitystyle/gan/generator.hpp"

namespace unitystyle::gan {

/// Any image-to-image map on NCHW batches; lets the losses run on stand-in maps in tests.
using ImageMap = std::function<torch::Tensor(const torch::Tensor&)>;

ImageMap as_map(UnityGenerator generator);

// Per-sample forms return a tensor of shape (N); the plain forms return their batch mean.

/// mean |a - b| over C,H,W for every sample.
torch::Tensor mean_l1_per_sample(const torch::Tensor& a, const torch::Tensor& b);

/// E|F(x) - x|_1 + E|G(y) - y|_1. Throws ArgumentError on a resolution mismatch or empty batch.
torch::Tensor identity_loss_per_sample(const ImageMap& G, const ImageMap& F, const torch::Tensor& x,
                                       const torch::Tensor& y);
torch::Tensor identity_loss(const ImageMap& G, const ImageMap& F, const torch::Tensor& x, const torch::Tensor& y);

/// Least-squares adversarial loss.
struct AdversarialLoss {
  torch::Tensor d_loss;  // E(D(real)-1)^2 + E D(fake)^2
  torch::Tensor g_loss;  // E(D(fake)-1)^2
};
/// From patch responses directly; means over batch and patch grid.
AdversarialLoss lsgan_loss(const torch::Tensor& real_response, const torch::Tensor& fake_response);
AdversarialLoss gan_loss(PatchDiscriminator& D, const torch::Tensor& real, const torch::Tensor& fake);
/// Generator-side term per sample: mean over patches of (D(fake)-1)^2.
torch::Tensor generator_adversarial_per_sample(const torch::Tensor& fake_response);

/// (1/L) sum_l mean|f_l(real) - f_l(fake)| per sample, over all discriminator layers.
torch::Tensor feature_matching_per_sample(const std::vector<torch::Tensor>& real_features,
                                          const std::vector<torch::Tensor>& fake_features);
torch::Tensor feature_matching_loss(const std::vector<torch::Tensor>& real_features,
                                    const std::vector<torch::Tensor>& fake_features);
torch::Tensor feature_matching_loss(PatchDiscriminator& D, const torch::Tensor& real, const torch::Tensor& fake);

/// (1 - MS-SSIM(a, b)) / 2 per sample.
torch::Tensor structural_dissimilarity(const torch::Tensor& a, const torch::Tensor& b);

struct CyclicLoss {
  torch::Tensor l1;          // mean-L1 of both reconstructions
  torch::Tensor structural;  // L_SS of both reconstructions
  torch::Tensor total;       // structural_weight * structural + l1_weight * l1
};
/// Cyclic reconstruction loss on F(G(x)) vs x and G(F(y)) vs y.
CyclicLoss cyclic_loss_per_sample(const ImageMap& G, const ImageMap& F, const torch::Tensor& x, const torch::Tensor& y,
                                  double structural_weight, double l1_weight);
CyclicLoss cyclic_loss(const ImageMap& G, const ImageMap& F, const torch::Tensor& x, const torch::Tensor& y,
                       double structural_weight, double l1_weight);
/// Same terms from precomputed reconstructions.
CyclicLoss cyclic_terms_per_sample(const torch::Tensor& x, const torch::Tensor& reconstructed_x, const torch::Tensor& y,
                                   const torch::Tensor& reconstructed_y, double structural_weight, double l1_weight);

}  // namespace unitystyle::gan

#include "unitystyle/gan/losses.hpp"

#include "unitystyle/errors.hpp"
#include "unitystyle/gan/ms_ssim.hpp"

namespace unitystyle::gan {

ImageMap as_map(UnityGenerator generator) {
  return [generator](const torch::Tensor& x) mutable { return generator->forward(x); };
}

namespace {

void check_batches(const torch::Tensor& x, const torch::Tensor& y) {
  if (x.dim() != 4 || y.dim() != 4) throw ArgumentError("losses expect NCHW batches");
  if (x.size(0) == 0 || y.size(0) == 0) throw ArgumentError("loss batches must be non-empty");
  if (x.size(2) != y.size(2) || x.size(3) != y.size(3)) {
    throw ArgumentError("loss batches have different resolutions");
  }
}

}  // namespace

torch::Tensor mean_l1_per_sample(const torch::Tensor& a, const torch::Tensor& b) {
  return (a - b).abs().flatten(1).mean(1);
}

torch::Tensor identity_loss_per_sample(const ImageMap& G, const ImageMap& F, const torch::Tensor& x,
                                       const torch::Tensor& y) {
  check_batches(x, y);
  if (x.size(0) != y.size(0)) throw ArgumentError("identity_loss_per_sample needs equal batch sizes");
  return mean_l1_per_sample(F(x), x) + mean_l1_per_sample(G(y), y);
}

torch::Tensor identity_loss(const ImageMap& G, const ImageMap& F, const torch::Tensor& x, const torch::Tensor& y) {
  check_batches(x, y);
  return (F(x) - x).abs().mean() + (G(y) - y).abs().mean();
}

AdversarialLoss lsgan_loss(const torch::Tensor& real_response, const torch::Tensor& fake_response) {
  return {(real_response - 1.0).square().mean() + fake_response.square().mean(), (fake_response - 1.0).square().mean()};
}

AdversarialLoss gan_loss(PatchDiscriminator& D, const torch::Tensor& real, const torch::Tensor& fake) {
  check_batches(real, fake);
  return lsgan_loss(D->forward(real), D->forward(fake));
}

torch::Tensor generator_adversarial_per_sample(const torch::Tensor& fake_response) {
  return (fake_response - 1.0).square().flatten(1).mean(1);
}

torch::Tensor feature_matching_per_sample(const std::vector<torch::Tensor>& real_features,
                                          const std::vector<torch::Tensor>& fake_features) {
  if (real_features.size() != fake_features.size() || real_features.empty()) {
    throw ArgumentError("feature matching needs the same non-zero number of layers on both sides");
  }
  torch::Tensor total;
  for (std::size_t l = 0; l < real_features.size(); ++l) {
    auto term = mean_l1_per_sample(real_features[l], fake_features[l]);
    total = total.defined() ? total + term : term;
  }
  return total / static_cast<double>(real_features.size());
}

torch::Tensor feature_matching_loss(const std::vector<torch::Tensor>& real_features,
                                    const std::vector<torch::Tensor>& fake_features) {
  return feature_matching_per_sample(real_features, fake_features).mean();
}

torch::Tensor feature_matching_loss(PatchDiscriminator& D, const torch::Tensor& real, const torch::Tensor& fake) {
  check_batches(real, fake);
  return feature_matching_loss(D->forward_features(real).features, D->forward_features(fake).features);
}

torch::Tensor structural_dissimilarity(const torch::Tensor& a, const torch::Tensor& b) {
  return (1.0 - ms_ssim(a, b)) * 0.5;
}

CyclicLoss cyclic_terms_per_sample(const torch::Tensor& x, const torch::Tensor& reconstructed_x, const torch::Tensor& y,
                                   const torch::Tensor& reconstructed_y, double structural_weight, double l1_weight) {
  CyclicLoss out;
  out.l1 = mean_l1_per_sample(reconstructed_x, x) + mean_l1_per_sample(reconstructed_y, y);
  out.structural = structural_dissimilarity(reconstructed_x, x) + structural_dissimilarity(reconstructed_y, y);
  out.total = structural_weight * out.structural + l1_weight * out.l1;
  return out;
}

CyclicLoss cyclic_loss_per_sample(const ImageMap& G, const ImageMap& F, const torch::Tensor& x, const torch::Tensor& y,
                                  double structural_weight, double l1_weight) {
  check_batches(x, y);
  if (std::abs(structural_weight + l1_weight - 1.0) > 1e-9 || structural_weight < 0.0 || l1_weight < 0.0) {
    throw ConfigError("cyclic loss weights must be non-negative and sum to 1");
  }
  return cyclic_terms_per_sample(x, F(G(x)), y, G(F(y)), structural_weight, l1_weight);
}

CyclicLoss cyclic_loss(const ImageMap& G, const ImageMap& F, const torch::Tensor& x, const torch::Tensor& y,
                       double structural_weight, double l1_weight) {
  auto per = cyclic_loss_per_sample(G, F, x, y, structural_weight, l1_weight);
  return {per.l1.mean(), per.structural.mean(), per.total.mean()};
}

}  // namespace unitystyle::gan

#pragma once

#include <vector>

#include <nlohmann/json.hpp>
#include <torch/torch.h>

namespace unitystyle::gan {

/// Patch discriminator: `num_layers` strided 4x4 convolutions (LeakyReLU 0.2, instance norm
/// after the first) followed by a 3x3 convolution producing a one-channel patch map. Four
/// layers give the usual 70x70-class receptive field.
struct DiscriminatorSpec {
  int base_channels = 64;
  int num_layers = 4;

  void validate(int height, int width) const;
};

void to_json(nlohmann::json& j, const DiscriminatorSpec& s);
void from_json(const nlohmann::json& j, DiscriminatorSpec& s);

class PatchDiscriminatorImpl : public torch::nn::Module {
 public:
  explicit PatchDiscriminatorImpl(const DiscriminatorSpec& spec);

  struct Output {
    std::vector<torch::Tensor> features;  // one per strided layer, post-activation
    torch::Tensor patches;                // N x 1 x h x w
  };
  Output forward_features(const torch::Tensor& x);
  torch::Tensor forward(const torch::Tensor& x) { return forward_features(x).patches; }

  const DiscriminatorSpec& spec() const { return spec_; }

 private:
  DiscriminatorSpec spec_;
  std::vector<torch::nn::Sequential> layers_;
  torch::nn::Conv2d output_{nullptr};
};
TORCH_MODULE(PatchDiscriminator);

PatchDiscriminator build_discriminator(const DiscriminatorSpec& spec);

}  // namespace unitystyle::gan

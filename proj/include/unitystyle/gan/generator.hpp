#pragma once

#include <string>
#include <vector>

#include <nlohmann/json.hpp>
#include <torch/torch.h>

#include "unitystyle/gan/ibn_res.hpp"

namespace unitystyle::gan {

/// Shape of a UnityGAN generator: a multi-scale encoder-decoder with residual blocks at every
/// scale and skip connections between matching encoder/decoder scales.
struct GeneratorSpec {
  int height = 256;
  int width = 256;
  int base_channels = 64;
  /// Number of resolutions; the encoder downsamples 2x between consecutive scales.
  int num_scales = 3;
  /// IBN-Res blocks at each non-deepest encoder scale.
  int res_blocks_per_scale = 1;
  /// Residual blocks at the deepest scale.
  int bottleneck_blocks = 3;
  bool skip_connections = true;
  bool attention_enabled = true;
  /// Kernel size of the first and last (full-resolution RGB) convolutions. Odd.
  int edge_kernel = 7;

  /// Throws ConfigError on an unbuildable spec (too many scales, odd channels, ...).
  void validate() const;
  /// Number of shallow scales whose blocks carry instance normalization: ceil(num_scales / 2).
  int instance_norm_scales() const { return (num_scales + 1) / 2; }
  std::string describe() const;
};

void to_json(nlohmann::json& j, const GeneratorSpec& s);
void from_json(const nlohmann::json& j, GeneratorSpec& s);

/// Scalar style gate per image.
struct StyleAttentionOutput {
  torch::Tensor weight;          // (N), sigmoid(pre_activation)
  torch::Tensor pre_activation;  // (N)
};

class UnityGeneratorImpl : public torch::nn::Module {
 public:
  explicit UnityGeneratorImpl(const GeneratorSpec& spec);

  /// NCHW image batch in [0,1] -> same-shape batch in [0,1].
  torch::Tensor forward(const torch::Tensor& x);

  struct Result {
    torch::Tensor image;
    torch::Tensor first_block;  // G1(x): output of the first IBN-Res block
  };
  Result forward_with_features(const torch::Tensor& x);

  /// sigmoid(A_style(G1(x))). Throws UnsupportedError when built without attention.
  StyleAttentionOutput style_attention(const torch::Tensor& x);
  /// Attention computed from an already available G1(x).
  StyleAttentionOutput attention_from_features(const torch::Tensor& first_block);

  const GeneratorSpec& spec() const { return spec_; }
  /// Per encoder scale, whether its blocks contain instance normalization.
  std::vector<bool> encoder_instance_norm_layout() const;
  /// Zero-initialises the final attention convolution so the gate starts at exactly 0.5.
  void reset_attention_head();
  /// Adds `bias` to the final attention convolution's bias (used for limit tests).
  void shift_attention_bias(double bias);

 private:
  GeneratorSpec spec_;
  torch::nn::Sequential stem_{nullptr};
  std::vector<std::vector<IbnResBlock>> encoder_blocks_;
  std::vector<torch::nn::Sequential> downsample_;
  std::vector<torch::nn::Sequential> upsample_;
  std::vector<torch::nn::Conv2d> fuse_;
  std::vector<IbnResBlock> decoder_blocks_;
  std::vector<IbnResBlock> bottleneck_blocks_;
  torch::nn::Sequential head_{nullptr};
  torch::nn::Conv2d attention_conv1_{nullptr};
  torch::nn::Conv2d attention_conv2_{nullptr};
  IbnResBlock first_block_{nullptr};
};
TORCH_MODULE(UnityGenerator);

/// Builds and initialises a generator (DCGAN-style normal init, zeroed attention head).
UnityGenerator build_generator(const GeneratorSpec& spec);

}  // namespace unitystyle::gan

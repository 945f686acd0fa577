#pragma once

#include <torch/torch.h>

namespace unitystyle::gan {

/// Normalization that instance-normalizes the first half of the channels and
/// batch-normalizes the rest. With `instance_half` false it is a plain BatchNorm.
class IbnNormImpl : public torch::nn::Module {
 public:
  IbnNormImpl(int64_t channels, bool instance_half);

  torch::Tensor forward(const torch::Tensor& x);

  int64_t instance_channels() const { return instance_channels_; }

 private:
  int64_t instance_channels_;
  torch::nn::InstanceNorm2d in_{nullptr};
  torch::nn::BatchNorm2d bn_{nullptr};
};
TORCH_MODULE(IbnNorm);

/// Residual block x + conv-norm-relu-conv-bn(x) whose first normalization is IbnNorm.
/// Requires an even channel count (ConfigError otherwise).
class IbnResBlockImpl : public torch::nn::Module {
 public:
  IbnResBlockImpl(int64_t channels, bool instance_half);

  torch::Tensor forward(const torch::Tensor& x);

  /// Zeroes every parameter of the residual branch, turning the block into the identity map.
  void zero_branch();

  bool has_instance_norm() const { return norm1_->instance_channels() > 0; }

  IbnNorm norm1() const { return norm1_; }

 private:
  torch::nn::Conv2d conv1_{nullptr};
  IbnNorm norm1_{nullptr};
  torch::nn::Conv2d conv2_{nullptr};
  torch::nn::BatchNorm2d norm2_{nullptr};
};
TORCH_MODULE(IbnResBlock);

}  // namespace unitystyle::gan

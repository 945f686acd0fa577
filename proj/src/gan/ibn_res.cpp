#include "unitystyle/gan/ibn_res.hpp"

#include "unitystyle/errors.hpp"

namespace unitystyle::gan {

namespace nn = torch::nn;

IbnNormImpl::IbnNormImpl(int64_t channels, bool instance_half)
    : instance_channels_(instance_half ? channels / 2 : 0) {
  if (instance_half && channels % 2 != 0) {
    throw ConfigError("IBN normalization needs an even channel count, got " + std::to_string(channels));
  }
  if (instance_channels_ > 0) {
    in_ = register_module("instance_norm", nn::InstanceNorm2d(nn::InstanceNorm2dOptions(instance_channels_).affine(true)));
  }
  bn_ = register_module("bn", nn::BatchNorm2d(channels - instance_channels_));
}

torch::Tensor IbnNormImpl::forward(const torch::Tensor& x) {
  if (instance_channels_ == 0) {
    return bn_(x);
  }
  auto parts = x.split_with_sizes({instance_channels_, x.size(1) - instance_channels_}, 1);
  return torch::cat({in_(parts[0]), bn_(parts[1])}, 1);
}

IbnResBlockImpl::IbnResBlockImpl(int64_t channels, bool instance_half) {
  if (channels % 2 != 0) {
    throw ConfigError("IBN-Res block needs an even channel count, got " + std::to_string(channels));
  }
  conv1_ = register_module("conv1", nn::Conv2d(nn::Conv2dOptions(channels, channels, 3).padding(1)));
  norm1_ = register_module("norm1", IbnNorm(channels, instance_half));
  conv2_ = register_module("conv2", nn::Conv2d(nn::Conv2dOptions(channels, channels, 3).padding(1)));
  norm2_ = register_module("norm2", nn::BatchNorm2d(channels));
}

torch::Tensor IbnResBlockImpl::forward(const torch::Tensor& x) {
  auto h = torch::relu(norm1_(conv1_(x)));
  h = norm2_(conv2_(h));
  return x + h;
}

void IbnResBlockImpl::zero_branch() {
  torch::NoGradGuard no_grad;
  for (auto& p : parameters()) p.zero_();
}

}  // namespace unitystyle::gan

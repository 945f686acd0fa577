#pragma once

#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include <torch/torch.h>

namespace unitystyle::reid {

/// Feature extractor interface. Part-based or spatio-temporal extractors plug in here.
class Backbone : public torch::nn::Module {
 public:
  /// NCHW pixels in [0,1] to an N x descriptor_dim() matrix.
  virtual torch::Tensor forward(const torch::Tensor& x) = 0;
  virtual int64_t descriptor_dim() const = 0;
  virtual std::string name() const = 0;
};

/// Basic two-convolution residual block.
class BasicBlockImpl : public torch::nn::Module {
 public:
  BasicBlockImpl(int64_t in_channels, int64_t out_channels, int64_t stride);
  torch::Tensor forward(const torch::Tensor& x);

 private:
  torch::nn::Conv2d conv1{nullptr}, conv2{nullptr};
  torch::nn::BatchNorm2d bn1{nullptr}, bn2{nullptr};
  torch::nn::Sequential downsample{nullptr};
};
TORCH_MODULE(BasicBlock);

/// ResNet bottleneck block. Parameter names follow the torchvision layout so converted
/// pre-trained weights load by name.
class BottleneckImpl : public torch::nn::Module {
 public:
  BottleneckImpl(int64_t in_channels, int64_t width, int64_t stride);
  torch::Tensor forward(const torch::Tensor& x);

  static constexpr int64_t kExpansion = 4;

 private:
  torch::nn::Conv2d conv1{nullptr}, conv2{nullptr}, conv3{nullptr};
  torch::nn::BatchNorm2d bn1{nullptr}, bn2{nullptr}, bn3{nullptr};
  torch::nn::Sequential downsample{nullptr};
};
TORCH_MODULE(Bottleneck);

/// Four-stage reduced-width residual network with a 256-d descriptor, for desk-scale runs.
class ReducedBackbone : public Backbone {
 public:
  ReducedBackbone();
  torch::Tensor forward(const torch::Tensor& x) override;
  int64_t descriptor_dim() const override { return 256; }
  std::string name() const override { return "reduced"; }

 private:
  torch::nn::Sequential stem_{nullptr};
  std::vector<BasicBlock> blocks_;
};

/// ResNet-50 trunk with global average pooling: 2048-d descriptor.
class ResNet50Backbone : public Backbone {
 public:
  ResNet50Backbone();
  torch::Tensor forward(const torch::Tensor& x) override;
  int64_t descriptor_dim() const override { return 2048; }
  std::string name() const override { return "resnet50"; }

 private:
  torch::nn::Conv2d conv1{nullptr};
  torch::nn::BatchNorm2d bn1{nullptr};
  std::vector<torch::nn::Sequential> layers_;
};

/// Names accepted by `make_backbone`.
std::vector<std::string> backbone_names();

/// Builds a backbone by name ("reduced" or "resnet50"). When `pretrained` names an existing
/// archive its parameters and buffers are loaded by name; otherwise weights stay random.
/// Throws ConfigError for an unknown name.
std::shared_ptr<Backbone> make_backbone(const std::string& name, const std::filesystem::path& pretrained = {});

}  // namespace unitystyle::reid

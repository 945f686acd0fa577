#include "unitystyle/reid/backbone.hpp"

#include <c10/util/Logging.h>

#include "unitystyle/errors.hpp"

namespace unitystyle::reid {

namespace nn = torch::nn;

namespace {

nn::Conv2d conv(int64_t in, int64_t out, int64_t kernel, int64_t stride, int64_t padding) {
  return nn::Conv2d(nn::Conv2dOptions(in, out, kernel).stride(stride).padding(padding).bias(false));
}

// ImageNet channel statistics; the trunk sees standardised inputs.
torch::Tensor standardise(const torch::Tensor& x) {
  static const auto mean = torch::tensor({0.485, 0.456, 0.406}).view({1, 3, 1, 1});
  static const auto std = torch::tensor({0.229, 0.224, 0.225}).view({1, 3, 1, 1});
  return (x - mean.to(x.dtype())) / std.to(x.dtype());
}

}  // namespace

BasicBlockImpl::BasicBlockImpl(int64_t in_channels, int64_t out_channels, int64_t stride) {
  conv1 = register_module("conv1", conv(in_channels, out_channels, 3, stride, 1));
  bn1 = register_module("bn1", nn::BatchNorm2d(out_channels));
  conv2 = register_module("conv2", conv(out_channels, out_channels, 3, 1, 1));
  bn2 = register_module("bn2", nn::BatchNorm2d(out_channels));
  if (stride != 1 || in_channels != out_channels) {
    downsample = register_module(
        "downsample", nn::Sequential(conv(in_channels, out_channels, 1, stride, 0), nn::BatchNorm2d(out_channels)));
  }
}

torch::Tensor BasicBlockImpl::forward(const torch::Tensor& x) {
  auto out = torch::relu(bn1(conv1(x)));
  out = bn2(conv2(out));
  auto shortcut = downsample ? downsample->forward(x) : x;
  return torch::relu(out + shortcut);
}

BottleneckImpl::BottleneckImpl(int64_t in_channels, int64_t width, int64_t stride) {
  const int64_t out_channels = width * kExpansion;
  conv1 = register_module("conv1", conv(in_channels, width, 1, 1, 0));
  bn1 = register_module("bn1", nn::BatchNorm2d(width));
  conv2 = register_module("conv2", conv(width, width, 3, stride, 1));
  bn2 = register_module("bn2", nn::BatchNorm2d(width));
  conv3 = register_module("conv3", conv(width, out_channels, 1, 1, 0));
  bn3 = register_module("bn3", nn::BatchNorm2d(out_channels));
  if (stride != 1 || in_channels != out_channels) {
    downsample = register_module(
        "downsample", nn::Sequential(conv(in_channels, out_channels, 1, stride, 0), nn::BatchNorm2d(out_channels)));
  }
}

torch::Tensor BottleneckImpl::forward(const torch::Tensor& x) {
  auto out = torch::relu(bn1(conv1(x)));
  out = torch::relu(bn2(conv2(out)));
  out = bn3(conv3(out));
  auto shortcut = downsample ? downsample->forward(x) : x;
  return torch::relu(out + shortcut);
}

ReducedBackbone::ReducedBackbone() {
  stem_ = register_module("stem", nn::Sequential(conv(3, 32, 3, 1, 1), nn::BatchNorm2d(32), nn::ReLU()));
  const int64_t widths[] = {32, 64, 128, 256};
  int64_t in = 32;
  for (int i = 0; i < 4; ++i) {
    blocks_.push_back(register_module("block" + std::to_string(i + 1), BasicBlock(in, widths[i], i == 0 ? 1 : 2)));
    in = widths[i];
  }
}

torch::Tensor ReducedBackbone::forward(const torch::Tensor& x) {
  auto h = stem_->forward(standardise(x));
  for (auto& block : blocks_) h = block->forward(h);
  return h.mean({2, 3});
}

ResNet50Backbone::ResNet50Backbone() {
  conv1 = register_module("conv1", conv(3, 64, 7, 2, 3));
  bn1 = register_module("bn1", nn::BatchNorm2d(64));
  const int64_t depths[] = {3, 4, 6, 3};
  const int64_t widths[] = {64, 128, 256, 512};
  int64_t in = 64;
  for (int i = 0; i < 4; ++i) {
    nn::Sequential layer;
    for (int64_t b = 0; b < depths[i]; ++b) {
      layer->push_back(Bottleneck(in, widths[i], (b == 0 && i > 0) ? 2 : 1));
      in = widths[i] * BottleneckImpl::kExpansion;
    }
    layers_.push_back(register_module("layer" + std::to_string(i + 1), layer));
  }
}

torch::Tensor ResNet50Backbone::forward(const torch::Tensor& x) {
  auto h = torch::relu(bn1(conv1(standardise(x))));
  h = torch::max_pool2d(h, 3, 2, 1);
  for (auto& layer : layers_) h = layer->forward(h);
  return h.mean({2, 3});
}

std::vector<std::string> backbone_names() { return {"reduced", "resnet50"}; }

std::shared_ptr<Backbone> make_backbone(const std::string& name, const std::filesystem::path& pretrained) {
  std::shared_ptr<Backbone> backbone;
  if (name == "reduced") {
    backbone = std::make_shared<ReducedBackbone>();
  } else if (name == "resnet50") {
    backbone = std::make_shared<ResNet50Backbone>();
  } else {
    throw ConfigError("unknown backbone '" + name + "' (expected reduced or resnet50)");
  }
  for (auto& module : backbone->modules(/*include_self=*/false)) {
    if (auto* c = module->as<nn::Conv2d>()) nn::init::kaiming_normal_(c->weight, 0.0, torch::kFanOut, torch::kReLU);
  }
  if (!pretrained.empty()) {
    if (std::filesystem::exists(pretrained)) {
      torch::serialize::InputArchive archive;
      archive.load_from(pretrained.string());
      backbone->load(archive);
      LOG(INFO) << "loaded pre-trained backbone weights from " << pretrained.string();
    } else {
      TORCH_WARN("pre-trained weights ", pretrained.string(), " not found; backbone initialised randomly");
    }
  }
  return backbone;
}

}  // namespace unitystyle::reid

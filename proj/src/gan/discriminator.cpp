#include "unitystyle/gan/discriminator.hpp"

#include "unitystyle/errors.hpp"

namespace unitystyle::gan {

namespace nn = torch::nn;

void DiscriminatorSpec::validate(int height, int width) const {
  if (base_channels < 1) throw ConfigError("discriminator base_channels must be positive");
  if (num_layers < 1) throw ConfigError("discriminator needs at least one strided layer");
  // Instance norm needs more than one spatial element after the last strided layer.
  if (std::min(height, width) < (2 << num_layers)) {
    throw ConfigError("discriminator with " + std::to_string(num_layers) + " strided layers needs inputs of at least " +
                      std::to_string(2 << num_layers) + " pixels per side");
  }
}

void to_json(nlohmann::json& j, const DiscriminatorSpec& s) {
  j = nlohmann::json{{"base_channels", s.base_channels}, {"num_layers", s.num_layers}};
}

void from_json(const nlohmann::json& j, DiscriminatorSpec& s) {
  DiscriminatorSpec d;
  s.base_channels = j.value("base_channels", d.base_channels);
  s.num_layers = j.value("num_layers", d.num_layers);
}

PatchDiscriminatorImpl::PatchDiscriminatorImpl(const DiscriminatorSpec& spec) : spec_(spec) {
  int64_t in = 3;
  for (int l = 0; l < spec_.num_layers; ++l) {
    const int64_t out = static_cast<int64_t>(spec_.base_channels) << std::min(l, 3);
    nn::Sequential layer(nn::Conv2d(nn::Conv2dOptions(in, out, 4).stride(2).padding(1)));
    if (l > 0) layer->push_back(nn::InstanceNorm2d(nn::InstanceNorm2dOptions(out).affine(true)));
    layer->push_back(nn::LeakyReLU(nn::LeakyReLUOptions().negative_slope(0.2)));
    layers_.push_back(register_module("layer" + std::to_string(l), layer));
    in = out;
  }
  output_ = register_module("out", nn::Conv2d(nn::Conv2dOptions(in, 1, 3).padding(1)));
}

PatchDiscriminatorImpl::Output PatchDiscriminatorImpl::forward_features(const torch::Tensor& x) {
  Output out;
  auto h = x * 2.0 - 1.0;
  for (auto& layer : layers_) {
    h = layer->forward(h);
    out.features.push_back(h);
  }
  out.patches = output_(h);
  return out;
}

PatchDiscriminator build_discriminator(const DiscriminatorSpec& spec) {
  PatchDiscriminator d(spec);
  torch::NoGradGuard no_grad;
  for (auto& module : d->modules(false)) {
    if (auto* conv = module->as<nn::Conv2d>()) {
      nn::init::normal_(conv->weight, 0.0, 0.02);
      nn::init::zeros_(conv->bias);
    }
  }
  return d;
}

}  // namespace unitystyle::gan

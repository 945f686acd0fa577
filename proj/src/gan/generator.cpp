#include "unitystyle/gan/generator.hpp"

#include <cmath>
#include <sstream>

#include "unitystyle/errors.hpp"

namespace unitystyle::gan {

namespace nn = torch::nn;

void GeneratorSpec::validate() const {
  if (height < 4 || width < 4) throw ConfigError("generator resolution must be at least 4x4");
  if (base_channels < 2 || base_channels % 2 != 0) {
    throw ConfigError("generator base_channels must be an even number >= 2");
  }
  if (num_scales < 2) throw ConfigError("generator needs num_scales >= 2");
  const double max_scales = std::log2(static_cast<double>(std::min(height, width)));
  if (num_scales > max_scales) {
    throw ConfigError("num_scales " + std::to_string(num_scales) + " exceeds log2(min(H,W)) for " +
                      std::to_string(height) + "x" + std::to_string(width));
  }
  const int factor = 1 << (num_scales - 1);
  if (height % factor != 0 || width % factor != 0) {
    throw ConfigError("generator resolution must be divisible by 2^(num_scales-1)");
  }
  if (edge_kernel < 1 || edge_kernel % 2 == 0) throw ConfigError("generator edge_kernel must be odd");
  if (res_blocks_per_scale < 0 || bottleneck_blocks < 0) throw ConfigError("block counts must be non-negative");
  if (attention_enabled && res_blocks_per_scale < 1) {
    throw ConfigError("style attention taps the first IBN-Res block; res_blocks_per_scale must be >= 1");
  }
}

std::string GeneratorSpec::describe() const {
  std::ostringstream out;
  out << "unitygan-encdec scales=" << num_scales << " base=" << base_channels << " blocks/scale=" << res_blocks_per_scale
      << " bottleneck=" << bottleneck_blocks << " edge_kernel=" << edge_kernel << " in_scales=" << instance_norm_scales()
      << " skips=" << (skip_connections ? "concat+1x1" : "none") << " attention=" << (attention_enabled ? "on" : "off");
  return out.str();
}

void to_json(nlohmann::json& j, const GeneratorSpec& s) {
  j = nlohmann::json{{"height", s.height},
                     {"width", s.width},
                     {"base_channels", s.base_channels},
                     {"num_scales", s.num_scales},
                     {"res_blocks_per_scale", s.res_blocks_per_scale},
                     {"bottleneck_blocks", s.bottleneck_blocks},
                     {"skip_connections", s.skip_connections},
                     {"attention_enabled", s.attention_enabled},
                     {"edge_kernel", s.edge_kernel}};
}

void from_json(const nlohmann::json& j, GeneratorSpec& s) {
  GeneratorSpec d;
  s.height = j.value("height", d.height);
  s.width = j.value("width", d.width);
  s.base_channels = j.value("base_channels", d.base_channels);
  s.num_scales = j.value("num_scales", d.num_scales);
  s.res_blocks_per_scale = j.value("res_blocks_per_scale", d.res_blocks_per_scale);
  s.bottleneck_blocks = j.value("bottleneck_blocks", d.bottleneck_blocks);
  s.skip_connections = j.value("skip_connections", d.skip_connections);
  s.attention_enabled = j.value("attention_enabled", d.attention_enabled);
  s.edge_kernel = j.value("edge_kernel", d.edge_kernel);
}

UnityGeneratorImpl::UnityGeneratorImpl(const GeneratorSpec& spec) : spec_(spec) {
  spec_.validate();
  const int64_t c0 = spec_.base_channels;
  const int S = spec_.num_scales;
  auto channels = [c0](int scale) { return c0 << scale; };

  const int64_t pad = spec_.edge_kernel / 2;
  stem_ = register_module("stem", nn::Sequential(nn::ReflectionPad2d(pad), nn::Conv2d(nn::Conv2dOptions(3, c0, spec_.edge_kernel)),
                                                 nn::BatchNorm2d(c0), nn::ReLU()));

  for (int k = 0; k < S - 1; ++k) {
    const bool with_in = k < spec_.instance_norm_scales();
    std::vector<IbnResBlock> blocks;
    for (int b = 0; b < spec_.res_blocks_per_scale; ++b) {
      blocks.push_back(register_module("enc" + std::to_string(k) + "_" + std::to_string(b),
                                       IbnResBlock(channels(k), with_in)));
    }
    if (k == 0 && !blocks.empty()) first_block_ = blocks.front();
    encoder_blocks_.push_back(std::move(blocks));
    downsample_.push_back(register_module(
        "down" + std::to_string(k),
        nn::Sequential(nn::Conv2d(nn::Conv2dOptions(channels(k), channels(k + 1), 3).stride(2).padding(1)),
                       nn::BatchNorm2d(channels(k + 1)), nn::ReLU())));
  }

  const bool deep_in = (S - 1) < spec_.instance_norm_scales();
  for (int b = 0; b < spec_.bottleneck_blocks; ++b) {
    bottleneck_blocks_.push_back(
        register_module("bottleneck" + std::to_string(b), IbnResBlock(channels(S - 1), deep_in)));
  }

  // decoder index d corresponds to scale S-2-d
  for (int k = S - 2; k >= 0; --k) {
    const auto tag = std::to_string(k);
    upsample_.push_back(register_module(
        "up" + tag, nn::Sequential(nn::ConvTranspose2d(nn::ConvTranspose2dOptions(channels(k + 1), channels(k), 3)
                                                           .stride(2)
                                                           .padding(1)
                                                           .output_padding(1)),
                                   nn::BatchNorm2d(channels(k)), nn::ReLU())));
    if (spec_.skip_connections) {
      fuse_.push_back(register_module("fuse" + tag, nn::Conv2d(nn::Conv2dOptions(2 * channels(k), channels(k), 1))));
    }
    decoder_blocks_.push_back(register_module("dec" + tag, IbnResBlock(channels(k), false)));
  }

  head_ = register_module("head", nn::Sequential(nn::ReflectionPad2d(pad), nn::Conv2d(nn::Conv2dOptions(c0, 3, spec_.edge_kernel)),
                                                 nn::Tanh()));

  if (spec_.attention_enabled) {
    const int64_t hidden = std::max<int64_t>(1, c0 / 4);
    attention_conv1_ = register_module("att1", nn::Conv2d(nn::Conv2dOptions(c0, hidden, 3).padding(1)));
    attention_conv2_ = register_module("att2", nn::Conv2d(nn::Conv2dOptions(hidden, 1, 3).padding(1)));
  }
}

UnityGeneratorImpl::Result UnityGeneratorImpl::forward_with_features(const torch::Tensor& x) {
  const int S = spec_.num_scales;
  auto h = stem_->forward(x * 2.0 - 1.0);
  std::vector<torch::Tensor> skips;
  torch::Tensor g1;
  for (int k = 0; k < S - 1; ++k) {
    auto& blocks = encoder_blocks_[static_cast<std::size_t>(k)];
    for (std::size_t b = 0; b < blocks.size(); ++b) {
      h = blocks[b]->forward(h);
      if (k == 0 && b == 0) g1 = h;
    }
    skips.push_back(h);
    h = downsample_[static_cast<std::size_t>(k)]->forward(h);
  }
  for (auto& block : bottleneck_blocks_) h = block->forward(h);
  for (std::size_t d = 0; d < upsample_.size(); ++d) {
    h = upsample_[d]->forward(h);
    const auto& skip = skips[skips.size() - 1 - d];
    if (spec_.skip_connections) {
      h = fuse_[d]->forward(torch::cat({h, skip}, 1));
    }
    h = decoder_blocks_[d]->forward(h);
  }
  auto out = (head_->forward(h) + 1.0) * 0.5;
  return {out, g1};
}

torch::Tensor UnityGeneratorImpl::forward(const torch::Tensor& x) { return forward_with_features(x).image; }

StyleAttentionOutput UnityGeneratorImpl::attention_from_features(const torch::Tensor& first_block) {
  if (!spec_.attention_enabled) {
    throw UnsupportedError("style attention requested on a generator built without it");
  }
  auto a = attention_conv2_(torch::relu(attention_conv1_(first_block)));
  auto pre = a.mean({1, 2, 3});
  return {torch::sigmoid(pre), pre};
}

StyleAttentionOutput UnityGeneratorImpl::style_attention(const torch::Tensor& x) {
  if (!spec_.attention_enabled) {
    throw UnsupportedError("style attention requested on a generator built without it");
  }
  return attention_from_features(forward_with_features(x).first_block);
}

std::vector<bool> UnityGeneratorImpl::encoder_instance_norm_layout() const {
  std::vector<bool> layout;
  for (const auto& blocks : encoder_blocks_) {
    bool any = false;
    for (const auto& block : blocks) any = any || block->has_instance_norm();
    layout.push_back(any);
  }
  bool deep = false;
  for (const auto& block : bottleneck_blocks_) deep = deep || block->has_instance_norm();
  layout.push_back(deep);
  return layout;
}

void UnityGeneratorImpl::reset_attention_head() {
  if (!spec_.attention_enabled) return;
  torch::NoGradGuard no_grad;
  attention_conv2_->weight.zero_();
  attention_conv2_->bias.zero_();
}

void UnityGeneratorImpl::shift_attention_bias(double bias) {
  if (!spec_.attention_enabled) throw UnsupportedError("generator has no attention head");
  torch::NoGradGuard no_grad;
  attention_conv2_->bias.add_(bias);
}

UnityGenerator build_generator(const GeneratorSpec& spec) {
  UnityGenerator g(spec);
  torch::NoGradGuard no_grad;
  for (auto& module : g->modules(/*include_self=*/false)) {
    if (auto* conv = module->as<nn::Conv2d>()) {
      nn::init::normal_(conv->weight, 0.0, 0.02);
      if (conv->options.bias()) nn::init::zeros_(conv->bias);
    } else if (auto* deconv = module->as<nn::ConvTranspose2d>()) {
      nn::init::normal_(deconv->weight, 0.0, 0.02);
      if (deconv->options.bias()) nn::init::zeros_(deconv->bias);
    }
  }
  g->reset_attention_head();
  return g;
}

}  // namespace unitystyle::gan

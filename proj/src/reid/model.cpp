#include "unitystyle/reid/model.hpp"

#include "unitystyle/errors.hpp"
#include "unitystyle/gan/transfer_model.hpp"

namespace unitystyle::reid {

namespace nn = torch::nn;
namespace fs = std::filesystem;

ReidModelImpl::ReidModelImpl(std::shared_ptr<Backbone> backbone, int64_t num_classes, int64_t height, int64_t width)
    : backbone_(std::move(backbone)), num_classes_(num_classes), height_(height), width_(width) {
  backbone_name_ = backbone_->name();
  register_module("backbone", backbone_);
  fc1_ = register_module("fc1", nn::Linear(backbone_->descriptor_dim(), kHiddenWidth));
  bn_ = register_module("bn", nn::BatchNorm1d(kHiddenWidth));
  fc2_ = register_module("fc2", nn::Linear(kHiddenWidth, num_classes));
  torch::NoGradGuard no_grad;
  nn::init::kaiming_normal_(fc1_->weight, 0.0, torch::kFanOut);
  nn::init::zeros_(fc1_->bias);
  nn::init::normal_(fc2_->weight, 0.0, 0.001);
  nn::init::zeros_(fc2_->bias);
}

ReidOutput ReidModelImpl::forward(const torch::Tensor& x) {
  auto d = backbone_->forward(x);
  auto logits = fc2_(torch::relu(bn_(fc1_(d))));
  return {d, logits};
}

torch::Tensor ReidModelImpl::descriptor(const torch::Tensor& x) { return backbone_->forward(x); }

ReidModel build_reid_model(int64_t num_classes, const std::string& backbone_name, int64_t height, int64_t width,
                           const fs::path& pretrained) {
  if (num_classes < 2) {
    throw ConfigError("a re-ID classifier needs at least 2 identities, got " + std::to_string(num_classes));
  }
  if (height < 16 || width < 16) throw ConfigError("re-ID input resolution must be at least 16x16");
  return ReidModel(make_backbone(backbone_name, pretrained), num_classes, height, width);
}

void save_reid_model(ReidModel& model, const fs::path& path, const nlohmann::json& extra) {
  torch::serialize::OutputArchive archive;
  archive.write("format_version", c10::IValue(gan::kCheckpointFormatVersion));
  archive.write("kind", c10::IValue(std::string("reid")));
  nlohmann::json meta{{"backbone", model->backbone_name()},
                      {"num_classes", model->num_classes()},
                      {"height", model->height()},
                      {"width", model->width()},
                      {"descriptor_dim", model->descriptor_dim()},
                      {"extra", extra}};
  archive.write("meta", c10::IValue(meta.dump()));
  torch::serialize::OutputArchive weights;
  model->save(weights);
  archive.write("model", weights);
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  const fs::path tmp = path.string() + ".tmp";
  archive.save_to(tmp.string());
  fs::rename(tmp, path);
}

LoadedReidModel load_reid_model(const fs::path& path) {
  auto archive = gan::open_checkpoint(path, "reid");
  c10::IValue meta_value;
  archive.read("meta", meta_value);
  const auto meta = nlohmann::json::parse(meta_value.toStringRef());
  LoadedReidModel loaded;
  loaded.model = build_reid_model(meta.at("num_classes").get<int64_t>(), meta.at("backbone").get<std::string>(),
                                  meta.at("height").get<int64_t>(), meta.at("width").get<int64_t>());
  torch::serialize::InputArchive weights;
  archive.read("model", weights);
  loaded.model->load(weights);
  loaded.extra = meta.value("extra", nlohmann::json::object());
  return loaded;
}

torch::Tensor extract_features(ReidModel& model, const torch::Tensor& images, int64_t chunk) {
  if (images.numel() == 0) return torch::zeros({0, model->descriptor_dim()});
  if (images.dim() != 4 || images.size(1) != 3) throw ArgumentError("extract_features expects an Nx3xHxW batch");
  if (images.size(2) != model->height() || images.size(3) != model->width()) {
    throw ArgumentError("images are " + std::to_string(images.size(2)) + "x" + std::to_string(images.size(3)) +
                        ", the model expects " + std::to_string(model->height()) + "x" +
                        std::to_string(model->width()));
  }
  torch::NoGradGuard no_grad;
  const bool was_training = model->is_training();
  model->eval();
  std::vector<torch::Tensor> rows;
  for (int64_t start = 0; start < images.size(0); start += chunk) {
    rows.push_back(model->descriptor(images.slice(0, start, std::min(start + chunk, images.size(0)))));
  }
  model->train(was_training);
  return torch::cat(rows, 0);
}

torch::Tensor extract_features(ReidModel& model, const std::vector<torch::Tensor>& images, int64_t chunk) {
  if (images.empty()) return torch::zeros({0, model->descriptor_dim()});
  std::vector<torch::Tensor> rows;
  for (int64_t start = 0; start < static_cast<int64_t>(images.size()); start += chunk) {
    const auto end = std::min<int64_t>(start + chunk, static_cast<int64_t>(images.size()));
    std::vector<torch::Tensor> part(images.begin() + start, images.begin() + end);
    rows.push_back(extract_features(model, torch::stack(part), chunk));
  }
  return torch::cat(rows, 0);
}

}  // namespace unitystyle::reid

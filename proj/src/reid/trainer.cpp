#include "unitystyle/reid/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "unitystyle/data/image_io.hpp"
#include "unitystyle/errors.hpp"
#include "unitystyle/reid/loss.hpp"

namespace unitystyle::reid {

int ReidTrainConfig::resolved_decay_epoch() const {
  return lr_decay_epoch >= 0 ? lr_decay_epoch : static_cast<int>(std::lround(0.8 * epochs));
}

void ReidTrainConfig::validate() const {
  if (epochs < 1) throw ConfigError("re-ID training needs epochs >= 1");
  if (batch_n < 1) throw ConfigError("re-ID batch_n must be >= 1");
  if (!(learning_rate > 0.0)) throw ConfigError("re-ID learning_rate must be positive");
  if (momentum < 0.0 || momentum >= 1.0) throw ConfigError("re-ID momentum must lie in [0, 1)");
  if (height < 16 || width < 16) throw ConfigError("re-ID resolution must be at least 16x16");
  const auto names = backbone_names();
  if (std::find(names.begin(), names.end(), backbone) == names.end()) {
    throw ConfigError("unknown backbone '" + backbone + "'");
  }
}

void to_json(nlohmann::json& j, const ReidTrainConfig& c) {
  j = nlohmann::json{{"backbone", c.backbone},
                     {"pretrained", c.pretrained},
                     {"epochs", c.epochs},
                     {"batch_n", c.batch_n},
                     {"learning_rate", c.learning_rate},
                     {"momentum", c.momentum},
                     {"weight_decay", c.weight_decay},
                     {"lr_decay_epoch", c.lr_decay_epoch},
                     {"lr_decay_factor", c.lr_decay_factor},
                     {"resolution", {c.height, c.width}},
                     {"seed", c.seed},
                     {"augment", c.augment}};
}

void from_json(const nlohmann::json& j, ReidTrainConfig& c) {
  ReidTrainConfig d;
  c.backbone = j.value("backbone", d.backbone);
  c.pretrained = j.value("pretrained", d.pretrained);
  c.epochs = j.value("epochs", d.epochs);
  c.batch_n = j.value("batch_n", d.batch_n);
  c.learning_rate = j.value("learning_rate", d.learning_rate);
  c.momentum = j.value("momentum", d.momentum);
  c.weight_decay = j.value("weight_decay", d.weight_decay);
  c.lr_decay_epoch = j.value("lr_decay_epoch", d.lr_decay_epoch);
  c.lr_decay_factor = j.value("lr_decay_factor", d.lr_decay_factor);
  auto res = j.value("resolution", std::array<int, 2>{d.height, d.width});
  c.height = res[0];
  c.width = res[1];
  c.seed = j.value("seed", d.seed);
  c.augment = j.value("augment", d.augment);
}

nlohmann::json to_json_line(const ReidEpochMetrics& m) {
  return nlohmann::json{{"epoch", m.epoch}, {"loss", m.loss}, {"accuracy", m.accuracy}, {"lr", m.learning_rate},
                        {"samples_per_step", m.samples_per_step}};
}

torch::Tensor load_resized(const data::PersonImage& image, int64_t height, int64_t width) {
  return data::resize(data::load_pixels(image), height, width);
}

std::vector<torch::Tensor> pregenerate_unity(const data::DatasetIndex& dataset,
                                             std::vector<gan::TransferModel>& transfers) {
  std::map<int, gan::TransferModel*> by_camera;
  for (auto& t : transfers) by_camera[t.camera_id] = &t;
  const auto train = dataset.indices(data::Split::kTrain);
  for (auto i : train) {
    if (!by_camera.count(dataset.images[i].camera_id)) {
      throw ConfigError("no transfer model for camera " + std::to_string(dataset.images[i].camera_id));
    }
  }
  std::vector<torch::Tensor> out;
  out.reserve(train.size());
  for (auto i : train) {
    const auto& im = dataset.images[i];
    out.push_back(gan::generate_unity(data::load_pixels(im), *by_camera.at(im.camera_id), im.camera_id));
  }
  return out;
}

namespace {

torch::Tensor to_bytes(const torch::Tensor& pixels) { return data::quantize_8bit(pixels).mul(255.0).round().to(torch::kUInt8); }

torch::Tensor from_bytes(const torch::Tensor& bytes) { return bytes.to(torch::kFloat32).div(255.0); }

}  // namespace

ReidTrainResult train_reid(const data::DatasetIndex& dataset, const std::vector<torch::Tensor>* unity_train,
                           const ReidTrainConfig& config, const ReidEpochCallback& on_epoch) {
  config.validate();
  const auto train = dataset.indices(data::Split::kTrain);
  if (train.empty()) throw DatasetError("dataset has no training images");
  if (unity_train != nullptr && unity_train->size() != train.size()) {
    throw ArgumentError("unity image count " + std::to_string(unity_train->size()) + " differs from the " +
                        std::to_string(train.size()) + " training images");
  }

  ReidTrainResult result;
  result.label_map = dataset.train_label_map();
  torch::manual_seed(config.seed);
  result.model = build_reid_model(static_cast<int64_t>(result.label_map.size()), config.backbone, config.height,
                                  config.width, config.pretrained);
  auto& model = result.model;

  // Inputs are held as 8-bit tensors at the working resolution.
  std::vector<torch::Tensor> real, unity;
  std::vector<int64_t> labels;
  for (std::size_t k = 0; k < train.size(); ++k) {
    const auto& im = dataset.images[train[k]];
    real.push_back(to_bytes(load_resized(im, config.height, config.width)));
    labels.push_back(result.label_map.at(im.person_id));
    if (unity_train != nullptr) {
      unity.push_back(to_bytes(data::resize((*unity_train)[k], config.height, config.width)));
    }
  }

  torch::optim::SGD optimizer(model->parameters(), torch::optim::SGDOptions(config.learning_rate)
                                                       .momentum(config.momentum)
                                                       .weight_decay(config.weight_decay)
                                                       .nesterov(false));
  std::mt19937_64 rng(config.seed);
  const auto count = static_cast<int64_t>(train.size());
  const int64_t n = std::min<int64_t>(config.batch_n, count);
  const int64_t steps = std::max<int64_t>(1, count / n);
  const int decay_epoch = config.resolved_decay_epoch();

  auto make_batch = [&](const std::vector<torch::Tensor>& pool, const std::vector<int64_t>& order, int64_t start,
                        torch::Tensor& images, torch::Tensor& batch_labels) {
    std::vector<torch::Tensor> xs;
    std::vector<int64_t> ys;
    for (int64_t i = start; i < start + n; ++i) {
      const auto idx = static_cast<std::size_t>(order[static_cast<std::size_t>(i)]);
      xs.push_back(data::augment(from_bytes(pool[idx]), config.augment, rng));
      ys.push_back(labels[idx]);
    }
    images = torch::stack(xs);
    batch_labels = torch::tensor(ys, torch::kLong);
  };

  model->train();
  for (int epoch = 1; epoch <= config.epochs; ++epoch) {
    const double lr = config.learning_rate * (epoch > decay_epoch ? config.lr_decay_factor : 1.0);
    for (auto& group : optimizer.param_groups()) static_cast<torch::optim::SGDOptions&>(group.options()).lr(lr);

    std::vector<int64_t> real_order(static_cast<std::size_t>(count)), unity_order;
    std::iota(real_order.begin(), real_order.end(), 0);
    std::shuffle(real_order.begin(), real_order.end(), rng);
    if (!unity.empty()) {
      unity_order = real_order;
      std::shuffle(unity_order.begin(), unity_order.end(), rng);
    }

    double loss_sum = 0.0;
    int64_t correct = 0, seen = 0;
    for (int64_t s = 0; s < steps; ++s) {
      TrainBatch batch;
      make_batch(real, real_order, s * n, batch.real, batch.labels);
      if (!unity.empty()) make_batch(unity, unity_order, s * n, batch.unity, batch.unity_labels);
      optimizer.zero_grad();
      torch::Tensor logits;
      auto loss = reid_loss(model, batch, &logits);
      loss.backward();
      optimizer.step();
      loss_sum += loss.item<double>();
      correct += logits.argmax(1).eq(batch.labels).sum().item<int64_t>();
      seen += n;
    }
    ReidEpochMetrics m{epoch, loss_sum / static_cast<double>(steps),
                       static_cast<double>(correct) / static_cast<double>(seen), lr,
                       unity.empty() ? n : 2 * n};
    result.history.push_back(m);
    if (on_epoch) on_epoch(m);
  }
  model->eval();
  return result;
}

ReidTrainResult train_reid(const data::DatasetIndex& dataset, std::vector<gan::TransferModel>& transfers,
                           const ReidTrainConfig& config, const ReidEpochCallback& on_epoch) {
  const auto unity = pregenerate_unity(dataset, transfers);
  return train_reid(dataset, &unity, config, on_epoch);
}

}  // namespace unitystyle::reid

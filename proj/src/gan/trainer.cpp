#include "unitystyle/gan/trainer.hpp"

#include <algorithm>
#include <sstream>

#include "unitystyle/data/image_io.hpp"
#include "unitystyle/errors.hpp"
#include "unitystyle/gan/objective.hpp"

namespace unitystyle::gan {

GeneratorSpec TransferTrainConfig::resolved_generator() const {
  auto spec = generator;
  spec.height = height;
  spec.width = width;
  return spec;
}

void TransferTrainConfig::validate() const {
  if (epochs < 1) throw ConfigError("transfer training needs epochs >= 1");
  if (batch_size < 1) throw ConfigError("transfer batch_size must be >= 1");
  if (!(learning_rate > 0.0)) throw ConfigError("transfer learning_rate must be positive");
  weights.validate();
  resolved_generator().validate();
  discriminator.validate(height, width);
}

void to_json(nlohmann::json& j, const TransferTrainConfig& c) {
  j = nlohmann::json{{"epochs", c.epochs},
                     {"resolution", {c.height, c.width}},
                     {"batch_size", c.batch_size},
                     {"learning_rate", c.learning_rate},
                     {"betas", {c.beta1, c.beta2}},
                     {"seed", c.seed},
                     {"sln_decay", c.sln_decay},
                     {"generator", c.generator},
                     {"discriminator", c.discriminator},
                     {"loss_weights", c.weights},
                     {"cache_limit", c.cache_limit}};
}

void from_json(const nlohmann::json& j, TransferTrainConfig& c) {
  TransferTrainConfig d;
  c.epochs = j.value("epochs", d.epochs);
  auto res = j.value("resolution", std::array<int, 2>{d.height, d.width});
  c.height = res[0];
  c.width = res[1];
  c.batch_size = j.value("batch_size", d.batch_size);
  c.learning_rate = j.value("learning_rate", d.learning_rate);
  auto betas = j.value("betas", std::array<double, 2>{d.beta1, d.beta2});
  c.beta1 = betas[0];
  c.beta2 = betas[1];
  c.seed = j.value("seed", d.seed);
  c.sln_decay = j.value("sln_decay", d.sln_decay);
  c.generator = j.value("generator", d.generator);
  c.discriminator = j.value("discriminator", d.discriminator);
  c.weights = j.value("loss_weights", d.weights);
  c.cache_limit = j.value("cache_limit", d.cache_limit);
}

nlohmann::json to_json_line(const EpochMetrics& m) {
  return nlohmann::json{{"epoch", m.epoch},    {"L_GAN", m.gan},       {"L_FM", m.feature_matching},
                        {"L_ID", m.identity}, {"L_CYC", m.cyclic},    {"total", m.total}};
}

TransferTrainer::TransferTrainer(const data::DatasetIndex& dataset, int camera_id, TransferTrainConfig config)
    : dataset_(dataset), camera_id_(camera_id), config_(std::move(config)), rng_(config_.seed) {
  config_.validate();
  if (dataset_.num_cameras < 2) throw ConfigError("transfer training needs a dataset with at least 2 cameras");
  if (camera_id_ < 1 || camera_id_ > dataset_.num_cameras) {
    throw ConfigError("camera " + std::to_string(camera_id_) + " is not in [1, " +
                      std::to_string(dataset_.num_cameras) + "]");
  }
  domain_x_ = dataset_.train_indices_of_camera(camera_id_);
  domain_y_ = dataset_.indices(data::Split::kTrain);
  for (int c = 1; c <= dataset_.num_cameras; ++c) per_camera_.push_back(dataset_.train_indices_of_camera(c));
  if (domain_x_.empty()) throw DatasetError("camera " + std::to_string(camera_id_) + " has no training images");
  if (config_.generator.attention_enabled) {
    for (int c = 0; c < dataset_.num_cameras; ++c) {
      if (per_camera_[static_cast<std::size_t>(c)].empty()) {
        throw DatasetError("camera " + std::to_string(c + 1) + " has no training images to serve as a reference");
      }
    }
  }

  model_ = TransferModel::create(camera_id_, config_.resolved_generator(), config_.discriminator, config_.weights,
                                 config_.seed, config_.sln_decay);
  model_.meta.epochs = config_.epochs;
  auto adam = [this](const std::vector<torch::Tensor>& params) {
    return std::make_unique<torch::optim::Adam>(
        params, torch::optim::AdamOptions(config_.learning_rate).betas({config_.beta1, config_.beta2}));
  };
  auto g_params = model_.G->parameters();
  for (auto& p : model_.F->parameters()) g_params.push_back(p);
  auto d_params = model_.D_X->parameters();
  for (auto& p : model_.D_Y->parameters()) d_params.push_back(p);
  optim_g_ = adam(g_params);
  optim_d_ = adam(d_params);
}

int64_t TransferTrainer::steps_per_epoch() const {
  return (static_cast<int64_t>(domain_x_.size()) + config_.batch_size - 1) / config_.batch_size;
}

int64_t TransferTrainer::total_steps() const { return steps_per_epoch() * config_.epochs; }

double TransferTrainer::learning_rate_at(int64_t step) const {
  const int64_t total = total_steps();
  const int64_t half = total / 2;
  if (step < half || total - half == 0) return config_.learning_rate;
  return config_.learning_rate * static_cast<double>(total - step) / static_cast<double>(total - half);
}

torch::Tensor TransferTrainer::image(std::size_t dataset_index) {
  if (auto it = cache_.find(dataset_index); it != cache_.end()) return it->second;
  auto pixels = data::resize(data::load_pixels(dataset_.images[dataset_index]), config_.height, config_.width);
  if (static_cast<int>(cache_.size()) < config_.cache_limit) cache_.emplace(dataset_index, pixels);
  return pixels;
}

void TransferTrainer::step(const std::vector<std::size_t>& x_indices, EpochMetrics& accum) {
  const double lr = learning_rate_at(step_);
  for (auto* optim : {optim_g_.get(), optim_d_.get()}) {
    for (auto& group : optim->param_groups()) static_cast<torch::optim::AdamOptions&>(group.options()).lr(lr);
  }

  std::vector<torch::Tensor> xs;
  for (auto i : x_indices) xs.push_back(image(i));
  auto x = torch::stack(xs);

  model_.train();
  torch::Tensor objective;
  torch::Tensor x_used, y_used, fake_y, fake_x;
  UnityGanTerms terms;
  double attention = 0.0;
  if (model_.G->spec().attention_enabled) {
    const int C = dataset_.num_cameras;
    std::vector<torch::Tensor> refs;
    for (std::size_t b = 0; b < x_indices.size(); ++b) {
      for (int c = 0; c < C; ++c) {
        const auto& pool = per_camera_[static_cast<std::size_t>(c)];
        std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1);
        refs.push_back(image(pool[pick(rng_)]));
      }
    }
    auto y = torch::stack(refs);
    auto loss = unitystyle_loss_batch(model_, x, y, C);
    objective = loss.total;
    terms = loss.terms;
    x_used = x.repeat_interleave(C, 0);
    y_used = y;
    fake_y = loss.pass.fake_y;
    fake_x = loss.pass.fake_x;
    attention = loss.attention.mean().item<double>();
  } else {
    std::vector<torch::Tensor> refs;
    std::uniform_int_distribution<std::size_t> pick(0, domain_y_.size() - 1);
    for (std::size_t b = 0; b < x_indices.size(); ++b) refs.push_back(image(domain_y_[pick(rng_)]));
    auto y = torch::stack(refs);
    auto pass = translate(model_, x, y);
    terms = unitygan_terms(model_, pass, x, y);
    objective = combine_terms(terms, model_.weights, model_.sln).mean();
    x_used = x;
    y_used = y;
    fake_y = pass.fake_y;
    fake_x = pass.fake_x;
    attention = 1.0;
  }

  optim_g_->zero_grad();
  objective.backward();
  optim_g_->step();

  optim_d_->zero_grad();
  auto d_y = lsgan_loss(model_.D_Y->forward(y_used), model_.D_Y->forward(fake_y.detach()));
  auto d_x = lsgan_loss(model_.D_X->forward(x_used), model_.D_X->forward(fake_x.detach()));
  auto d_loss = d_y.d_loss + d_x.d_loss;
  d_loss.backward();
  optim_d_->step();

  const double total = objective.item<double>();
  loss_trace_.push_back(total);
  accum.gan += terms.gan.mean().item<double>();
  accum.feature_matching += terms.feature_matching.mean().item<double>();
  accum.identity += terms.identity.mean().item<double>();
  accum.cyclic += terms.cyclic.mean().item<double>();
  accum.total += total;
  accum.mean_attention += attention;
  ++step_;
}

TransferModel& TransferTrainer::run(const EpochCallback& on_epoch, int until_epoch) {
  const int last = until_epoch < 0 ? config_.epochs : std::min(until_epoch, config_.epochs);
  while (epochs_done_ < last) {
    std::vector<std::size_t> order = domain_x_;
    std::shuffle(order.begin(), order.end(), rng_);
    EpochMetrics metrics;
    metrics.epoch = epochs_done_ + 1;
    int64_t steps = 0;
    for (std::size_t start = 0; start < order.size(); start += static_cast<std::size_t>(config_.batch_size)) {
      const auto end = std::min(order.size(), start + static_cast<std::size_t>(config_.batch_size));
      step({order.begin() + static_cast<std::ptrdiff_t>(start), order.begin() + static_cast<std::ptrdiff_t>(end)},
           metrics);
      ++steps;
    }
    for (double* v : {&metrics.gan, &metrics.feature_matching, &metrics.identity, &metrics.cyclic, &metrics.total,
                      &metrics.mean_attention}) {
      *v /= static_cast<double>(steps);
    }
    ++epochs_done_;
    model_.meta.steps = step_;
    if (on_epoch) on_epoch(metrics, *this);
  }
  model_.eval();
  return model_;
}

void TransferTrainer::save_checkpoint(const std::filesystem::path& path) {
  ResumeState state;
  state.epochs_done = epochs_done_;
  state.step = step_;
  std::ostringstream rng_text;
  rng_text << rng_;
  state.rng_state = rng_text.str();
  optim_g_->save(state.generator_optimizer);
  optim_d_->save(state.discriminator_optimizer);
  model_.meta.steps = step_;
  model_.save(path, &state);
}

void TransferTrainer::resume(const std::filesystem::path& checkpoint) {
  auto loaded = TransferModel::load_with_resume(checkpoint);
  if (!loaded.has_resume) throw CheckpointError("checkpoint " + checkpoint.string() + " carries no resume state");
  if (loaded.model.camera_id != camera_id_) {
    throw CheckpointError("checkpoint " + checkpoint.string() + " belongs to camera " +
                          std::to_string(loaded.model.camera_id));
  }
  {
    torch::NoGradGuard no_grad;
    auto copy = [](torch::nn::Module& dst, torch::nn::Module& src) {
      auto d = dst.named_parameters(), s = src.named_parameters();
      for (auto& item : d) item.value().copy_(s[item.key()]);
      auto db = dst.named_buffers(), sb = src.named_buffers();
      for (auto& item : db) item.value().copy_(sb[item.key()]);
    };
    copy(*model_.G, *loaded.model.G);
    copy(*model_.F, *loaded.model.F);
    copy(*model_.D_X, *loaded.model.D_X);
    copy(*model_.D_Y, *loaded.model.D_Y);
  }
  model_.sln = loaded.model.sln;
  optim_g_->load(loaded.generator_optimizer);
  optim_d_->load(loaded.discriminator_optimizer);
  std::istringstream rng_text(loaded.rng_state);
  rng_text >> rng_;
  epochs_done_ = loaded.epochs_done;
  step_ = loaded.step;
}

TransferModel train_transfer(const data::DatasetIndex& dataset, int camera_id, const TransferTrainConfig& config,
                             const TransferTrainer::EpochCallback& on_epoch) {
  TransferTrainer trainer(dataset, camera_id, config);
  return trainer.run(on_epoch);
}

}  // namespace unitystyle::gan

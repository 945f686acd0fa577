#include "unitystyle/gan/transfer_model.hpp"

#include "unitystyle/data/image_io.hpp"
#include "unitystyle/errors.hpp"

namespace unitystyle::gan {

namespace fs = std::filesystem;

SlnBank SlnBank::with_decay(double decay) {
  SlnBank bank;
  for (SlnState* s : {&bank.gan, &bank.feature_matching, &bank.identity, &bank.cyclic}) s->decay = decay;
  return bank;
}

SlnBank SlnBank::frozen_at(double magnitude) {
  return {SlnState::frozen_at(magnitude), SlnState::frozen_at(magnitude), SlnState::frozen_at(magnitude),
          SlnState::frozen_at(magnitude)};
}

void to_json(nlohmann::json& j, const SlnBank& s) {
  j = nlohmann::json{
      {"gan", s.gan}, {"feature_matching", s.feature_matching}, {"identity", s.identity}, {"cyclic", s.cyclic}};
}

void from_json(const nlohmann::json& j, SlnBank& s) {
  s.gan = j.at("gan").get<SlnState>();
  s.feature_matching = j.at("feature_matching").get<SlnState>();
  s.identity = j.at("identity").get<SlnState>();
  s.cyclic = j.at("cyclic").get<SlnState>();
}

void to_json(nlohmann::json& j, const TrainingMeta& m) {
  j = nlohmann::json{{"epochs", m.epochs}, {"steps", m.steps}, {"seed", m.seed}, {"architecture", m.architecture}};
}

void from_json(const nlohmann::json& j, TrainingMeta& m) {
  m.epochs = j.value("epochs", 0);
  m.steps = j.value("steps", int64_t{0});
  m.seed = j.value("seed", uint64_t{0});
  m.architecture = j.value("architecture", std::string{});
}

TransferModel TransferModel::create(int camera_id, const GeneratorSpec& generator_spec,
                                    const DiscriminatorSpec& discriminator_spec, const LossWeights& weights,
                                    uint64_t seed, double sln_decay) {
  weights.validate();
  generator_spec.validate();
  discriminator_spec.validate(generator_spec.height, generator_spec.width);
  torch::manual_seed(seed);
  TransferModel m;
  m.camera_id = camera_id;
  m.generator_spec = generator_spec;
  m.discriminator_spec = discriminator_spec;
  m.G = build_generator(generator_spec);
  auto reverse_spec = generator_spec;
  reverse_spec.attention_enabled = false;
  m.F = build_generator(reverse_spec);
  m.D_X = build_discriminator(discriminator_spec);
  m.D_Y = build_discriminator(discriminator_spec);
  m.weights = weights;
  m.sln = SlnBank::with_decay(sln_decay);
  m.meta.seed = seed;
  m.meta.architecture = generator_spec.describe();
  return m;
}

void TransferModel::train(bool on) {
  G->train(on);
  F->train(on);
  D_X->train(on);
  D_Y->train(on);
}

void TransferModel::to(torch::ScalarType dtype) {
  G->to(dtype);
  F->to(dtype);
  D_X->to(dtype);
  D_Y->to(dtype);
}

nlohmann::json TransferModel::metadata() const {
  return nlohmann::json{{"camera_id", camera_id},
                        {"generator", generator_spec},
                        {"discriminator", discriminator_spec},
                        {"loss_weights", weights},
                        {"sln", sln},
                        {"training", meta}};
}

void TransferModel::save(const fs::path& path, ResumeState* resume) const {
  torch::serialize::OutputArchive archive;
  archive.write("format_version", c10::IValue(kCheckpointFormatVersion));
  archive.write("kind", c10::IValue(std::string("transfer")));
  archive.write("meta", c10::IValue(metadata().dump()));
  torch::serialize::OutputArchive g, f, dx, dy;
  G->save(g);
  F->save(f);
  D_X->save(dx);
  D_Y->save(dy);
  archive.write("G", g);
  archive.write("F", f);
  archive.write("D_X", dx);
  archive.write("D_Y", dy);
  if (resume != nullptr) {
    nlohmann::json state{{"epochs_done", resume->epochs_done}, {"step", resume->step}, {"rng", resume->rng_state}};
    archive.write("resume", c10::IValue(state.dump()));
    archive.write("optim_G", resume->generator_optimizer);
    archive.write("optim_D", resume->discriminator_optimizer);
  }
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  const fs::path tmp = path.string() + ".tmp";
  archive.save_to(tmp.string());
  fs::rename(tmp, path);
}

torch::serialize::InputArchive open_checkpoint(const fs::path& path, const std::string& kind) {
  if (!fs::exists(path)) throw MissingArtifactError("checkpoint not found: " + path.string());
  torch::serialize::InputArchive archive;
  try {
    archive.load_from(path.string());
  } catch (const c10::Error& e) {
    throw CheckpointError("unreadable checkpoint " + path.string());
  }
  c10::IValue version;
  if (!archive.try_read("format_version", version) || !version.isInt()) {
    throw CheckpointError("checkpoint " + path.string() + " has no format version");
  }
  if (version.toInt() != kCheckpointFormatVersion) {
    throw CheckpointError("checkpoint " + path.string() + " has format version " + std::to_string(version.toInt()) +
                          ", this build reads version " + std::to_string(kCheckpointFormatVersion));
  }
  c10::IValue stored_kind;
  if (!archive.try_read("kind", stored_kind) || stored_kind.toStringRef() != kind) {
    throw CheckpointError("checkpoint " + path.string() + " is not a " + kind + " checkpoint");
  }
  return archive;
}

TransferModel::Loaded TransferModel::load_with_resume(const fs::path& path) {
  auto archive = open_checkpoint(path, "transfer");
  c10::IValue meta_value;
  archive.read("meta", meta_value);
  const auto meta = nlohmann::json::parse(meta_value.toStringRef());

  Loaded loaded;
  auto& m = loaded.model;
  m.camera_id = meta.at("camera_id").get<int>();
  m.generator_spec = meta.at("generator").get<GeneratorSpec>();
  m.discriminator_spec = meta.at("discriminator").get<DiscriminatorSpec>();
  m.weights = meta.at("loss_weights").get<LossWeights>();
  m.sln = meta.at("sln").get<SlnBank>();
  m.meta = meta.at("training").get<TrainingMeta>();
  m.G = UnityGenerator(m.generator_spec);
  auto reverse_spec = m.generator_spec;
  reverse_spec.attention_enabled = false;
  m.F = UnityGenerator(reverse_spec);
  m.D_X = PatchDiscriminator(m.discriminator_spec);
  m.D_Y = PatchDiscriminator(m.discriminator_spec);

  torch::serialize::InputArchive g, f, dx, dy;
  archive.read("G", g);
  archive.read("F", f);
  archive.read("D_X", dx);
  archive.read("D_Y", dy);
  m.G->load(g);
  m.F->load(f);
  m.D_X->load(dx);
  m.D_Y->load(dy);

  c10::IValue resume;
  if (archive.try_read("resume", resume)) {
    const auto state = nlohmann::json::parse(resume.toStringRef());
    loaded.has_resume = true;
    loaded.epochs_done = state.at("epochs_done").get<int>();
    loaded.step = state.at("step").get<int64_t>();
    loaded.rng_state = state.at("rng").get<std::string>();
    archive.read("optim_G", loaded.generator_optimizer);
    archive.read("optim_D", loaded.discriminator_optimizer);
  }
  return loaded;
}

TransferModel TransferModel::load(const fs::path& path) { return load_with_resume(path).model; }

torch::Tensor generate_unity(const torch::Tensor& image, TransferModel& model, int camera_id) {
  if (camera_id != model.camera_id) {
    throw ArgumentError("image from camera " + std::to_string(camera_id) + " given to the transfer of camera " +
                        std::to_string(model.camera_id));
  }
  const bool batched = image.dim() == 4;
  if (!batched && image.dim() != 3) throw ArgumentError("generate_unity expects CHW or NCHW");
  auto input = batched ? image : image.unsqueeze(0);
  const auto h = input.size(2), w = input.size(3);
  torch::NoGradGuard no_grad;
  model.G->eval();
  auto resized = data::resize(input, model.generator_spec.height, model.generator_spec.width);
  auto out = data::resize(model.G->forward(resized), h, w).clamp(0.0, 1.0);
  return batched ? out : out.squeeze(0);
}

}  // namespace unitystyle::gan

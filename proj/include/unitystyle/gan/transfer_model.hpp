#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>
#include <torch/torch.h>

#include "unitystyle/gan/discriminator.hpp"
#include "unitystyle/gan/generator.hpp"
#include "unitystyle/gan/loss_weights.hpp"
#include "unitystyle/gan/sln.hpp"

namespace unitystyle::gan {

/// Checkpoint format version written by this build. Loading any other version fails.
inline constexpr int64_t kCheckpointFormatVersion = 1;

/// One SLN state per UnityGAN loss term.
struct SlnBank {
  SlnState gan, feature_matching, identity, cyclic;

  static SlnBank with_decay(double decay);
  static SlnBank frozen_at(double magnitude);
};

void to_json(nlohmann::json& j, const SlnBank& s);
void from_json(const nlohmann::json& j, SlnBank& s);

struct TrainingMeta {
  int epochs = 0;
  int64_t steps = 0;
  uint64_t seed = 0;
  std::string architecture;
};

void to_json(nlohmann::json& j, const TrainingMeta& m);
void from_json(const nlohmann::json& j, TrainingMeta& m);

/// Optimizer/RNG state carried by per-epoch checkpoints so a run can resume.
struct ResumeState {
  int epochs_done = 0;
  int64_t step = 0;
  std::string rng_state;
  torch::serialize::OutputArchive generator_optimizer;
  torch::serialize::OutputArchive discriminator_optimizer;
};

/// A trained UnityGAN pair for one camera group: G maps the camera's images into the unity
/// domain, F maps back; D_X judges camera images, D_Y unity-domain images.
struct TransferModel {
  int camera_id = 0;
  GeneratorSpec generator_spec;
  DiscriminatorSpec discriminator_spec;
  UnityGenerator G{nullptr};
  UnityGenerator F{nullptr};
  PatchDiscriminator D_X{nullptr};
  PatchDiscriminator D_Y{nullptr};
  LossWeights weights;
  SlnBank sln;
  TrainingMeta meta;

  /// Freshly initialised networks under `torch::manual_seed(seed)`. F never carries attention.
  static TransferModel create(int camera_id, const GeneratorSpec& generator_spec,
                              const DiscriminatorSpec& discriminator_spec, const LossWeights& weights,
                              uint64_t seed, double sln_decay = 0.99);

  void train(bool on = true);
  void eval() { train(false); }
  void to(torch::ScalarType dtype);

  /// Writes a single-file archive: format version, JSON metadata, all four networks and,
  /// when given, the resume state.
  void save(const std::filesystem::path& path, ResumeState* resume = nullptr) const;

  struct Loaded;
  /// Throws CheckpointError on unreadable files or a format-version mismatch.
  static TransferModel load(const std::filesystem::path& path);
  static Loaded load_with_resume(const std::filesystem::path& path);

  nlohmann::json metadata() const;
};

struct TransferModel::Loaded {
  TransferModel model;
  bool has_resume = false;
  int epochs_done = 0;
  int64_t step = 0;
  std::string rng_state;
  torch::serialize::InputArchive generator_optimizer;
  torch::serialize::InputArchive discriminator_optimizer;
};

/// Opens a versioned single-file archive and checks its format version and kind tag.
/// Throws MissingArtifactError when the file is absent and CheckpointError otherwise.
torch::serialize::InputArchive open_checkpoint(const std::filesystem::path& path, const std::string& kind);

/// G(image) for an image of `camera_id`, computed at the model's resolution and resized back
/// to the input's. Accepts CHW or NCHW; output is clamped to [0,1]. Throws ArgumentError when
/// the camera does not match the model.
torch::Tensor generate_unity(const torch::Tensor& image, TransferModel& model, int camera_id);

}  // namespace unitystyle::gan

#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "unitystyle/data/synthetic.hpp"
#include "unitystyle/eval/evaluate.hpp"
#include "unitystyle/eval/rerank.hpp"
#include "unitystyle/gan/trainer.hpp"
#include "unitystyle/reid/trainer.hpp"

namespace unitystyle::cli {

/// Which augmentation the re-ID model is trained (and evaluated) with.
enum class Variant { kUnityStyle, kUnityGan, kIde };

std::string to_string(Variant v);
/// Accepts "unitystyle", "unitygan" and "ide"; throws ConfigError otherwise.
Variant variant_from_string(const std::string& name);

struct DatasetConfig {
  std::string layout = "market1501";
  /// Corpus directory. Empty selects the synthetic corpus under `<output_dir>/data`.
  std::string root;
  data::SyntheticConfig synthetic;
};

struct EvalConfig {
  eval::EvalProtocol protocol;
  eval::RerankOptions rerank;
  /// Substitute unity images for query and gallery inputs of the unity variants.
  bool unity_inputs = true;
};

/// Complete description of a pipeline run. Every field has a default, so "{}" is a valid file.
struct RunConfig {
  DatasetConfig dataset;
  gan::TransferTrainConfig gan;
  reid::ReidTrainConfig reid;
  EvalConfig eval;
  Variant variant = Variant::kUnityStyle;
  std::string output_dir = "runs/default";

  /// Throws ConfigError on any invalid section.
  void validate() const;
  /// Applies one seed to the corpus, transfer and re-ID stages.
  void set_seed(uint64_t seed);

  std::filesystem::path output() const { return output_dir; }
  std::filesystem::path dataset_root() const;
  /// Transfer checkpoints of a variant: `<output>/transfers_<variant>`.
  std::filesystem::path transfer_dir(Variant v) const;
  std::filesystem::path transfer_checkpoint(Variant v, int camera) const;
  /// Unity mirror tree of a variant: `<output>/unity_<variant>`.
  std::filesystem::path unity_dir(Variant v) const;
  std::filesystem::path reid_checkpoint(Variant v) const;
  std::filesystem::path eval_dir() const { return output() / "eval"; }
};

void to_json(nlohmann::json& j, const DatasetConfig& c);
void from_json(const nlohmann::json& j, DatasetConfig& c);
void to_json(nlohmann::json& j, const EvalConfig& c);
void from_json(const nlohmann::json& j, EvalConfig& c);
void to_json(nlohmann::json& j, const RunConfig& c);
void from_json(const nlohmann::json& j, RunConfig& c);

/// Parses a JSON config file; an empty file yields the defaults. Throws ConfigError on
/// malformed JSON or invalid values and MissingArtifactError when the file does not exist.
RunConfig load_config(const std::filesystem::path& path);
RunConfig parse_config(const std::string& text);

}  // namespace unitystyle::cli

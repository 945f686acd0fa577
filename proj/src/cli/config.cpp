#include "unitystyle/cli/config.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "unitystyle/errors.hpp"
#include "unitystyle/eval/distance.hpp"

namespace unitystyle::cli {

namespace fs = std::filesystem;

std::string to_string(Variant v) {
  switch (v) {
    case Variant::kUnityStyle:
      return "unitystyle";
    case Variant::kUnityGan:
      return "unitygan";
    case Variant::kIde:
      return "ide";
  }
  return "unknown";
}

Variant variant_from_string(const std::string& name) {
  if (name == "unitystyle") return Variant::kUnityStyle;
  if (name == "unitygan") return Variant::kUnityGan;
  if (name == "ide") return Variant::kIde;
  throw ConfigError("unknown variant '" + name + "' (expected unitystyle, unitygan or ide)");
}

void to_json(nlohmann::json& j, const DatasetConfig& c) {
  j = nlohmann::json{{"layout", c.layout}, {"root", c.root}, {"synthetic", c.synthetic}};
}

void from_json(const nlohmann::json& j, DatasetConfig& c) {
  DatasetConfig d;
  c.layout = j.value("layout", d.layout);
  c.root = j.value("root", d.root);
  c.synthetic = j.value("synthetic", d.synthetic);
}

void to_json(nlohmann::json& j, const EvalConfig& c) {
  j = nlohmann::json{{"protocol", c.protocol}, {"rerank", c.rerank}, {"unity_inputs", c.unity_inputs}};
}

void from_json(const nlohmann::json& j, EvalConfig& c) {
  EvalConfig d;
  c.protocol = j.value("protocol", d.protocol);
  c.rerank = j.value("rerank", d.rerank);
  c.unity_inputs = j.value("unity_inputs", d.unity_inputs);
}

void to_json(nlohmann::json& j, const RunConfig& c) {
  j = nlohmann::json{{"dataset", c.dataset}, {"gan", c.gan},
                     {"reid", c.reid},       {"eval", c.eval},
                     {"variant", to_string(c.variant)}, {"output_dir", c.output_dir}};
}

void from_json(const nlohmann::json& j, RunConfig& c) {
  RunConfig d;
  c.dataset = j.value("dataset", d.dataset);
  c.gan = j.value("gan", d.gan);
  c.reid = j.value("reid", d.reid);
  c.eval = j.value("eval", d.eval);
  c.variant = variant_from_string(j.value("variant", to_string(d.variant)));
  c.output_dir = j.value("output_dir", d.output_dir);
}

void RunConfig::validate() const {
  if (dataset.layout != "market1501" && dataset.layout != "dukemtmc") {
    throw ConfigError("unknown dataset layout '" + dataset.layout + "'");
  }
  if (output_dir.empty()) throw ConfigError("output_dir must not be empty");
  gan.validate();
  reid.validate();
  eval.rerank.validate();
  const auto metrics = eval::distance_metrics();
  if (std::find(metrics.begin(), metrics.end(), eval.protocol.metric) == metrics.end()) {
    throw ConfigError("unknown distance metric '" + eval.protocol.metric + "'");
  }
}

void RunConfig::set_seed(uint64_t seed) {
  dataset.synthetic.seed = seed;
  gan.seed = seed;
  reid.seed = seed;
}

fs::path RunConfig::dataset_root() const { return dataset.root.empty() ? output() / "data" : fs::path(dataset.root); }

fs::path RunConfig::transfer_dir(Variant v) const { return output() / ("transfers_" + to_string(v)); }

fs::path RunConfig::transfer_checkpoint(Variant v, int camera) const {
  return transfer_dir(v) / ("transfer_cam" + std::to_string(camera) + ".ckpt");
}

fs::path RunConfig::unity_dir(Variant v) const { return output() / ("unity_" + to_string(v)); }

fs::path RunConfig::reid_checkpoint(Variant v) const { return output() / ("reid_" + to_string(v) + ".ckpt"); }

RunConfig parse_config(const std::string& text) {
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return RunConfig{};
  try {
    auto config = nlohmann::json::parse(text).get<RunConfig>();
    config.validate();
    return config;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("invalid config: ") + e.what());
  }
}

RunConfig load_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw MissingArtifactError("config file not found: " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str());
}

}  // namespace unitystyle::cli

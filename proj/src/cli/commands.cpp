#include "unitystyle/cli/commands.hpp"

#include <fstream>
#include <iostream>
#include <map>

#include <CLI11.hpp>

#include "unitystyle/cli/grid.hpp"
#include "unitystyle/data/image_io.hpp"
#include "unitystyle/errors.hpp"
#include "unitystyle/eval/report.hpp"
#include "unitystyle/reid/model.hpp"

namespace unitystyle::cli {

namespace fs = std::filesystem;

namespace {

data::DatasetIndex open_dataset(const RunConfig& config) {
  const auto root = config.dataset_root();
  if (!fs::exists(root)) {
    throw MissingArtifactError("dataset not found at " + root.string() +
                               "; run synth-data or set dataset.root in the config");
  }
  return data::load_dataset(root, config.dataset.layout);
}

gan::TransferTrainConfig transfer_config(const RunConfig& config, Variant variant) {
  auto t = config.gan;
  t.generator.attention_enabled = variant == Variant::kUnityStyle;
  return t;
}

void require_transfer_variant(Variant v) {
  if (v == Variant::kIde) throw ConfigError("the ide variant uses no transfer models; choose unitystyle or unitygan");
}

std::vector<gan::TransferModel> load_transfers(const RunConfig& config, Variant variant, int num_cameras) {
  std::vector<std::string> missing;
  for (int c = 1; c <= num_cameras; ++c) {
    if (!fs::exists(config.transfer_checkpoint(variant, c))) missing.push_back(std::to_string(c));
  }
  if (!missing.empty()) {
    std::string list;
    for (const auto& m : missing) list += (list.empty() ? "" : ", ") + m;
    throw MissingArtifactError("missing " + to_string(variant) + " transfer checkpoints for camera(s) " + list +
                               " in " + config.transfer_dir(variant).string() + "; run train-transfer --variant " +
                               to_string(variant));
  }
  std::vector<gan::TransferModel> transfers;
  for (int c = 1; c <= num_cameras; ++c) transfers.push_back(gan::TransferModel::load(config.transfer_checkpoint(variant, c)));
  return transfers;
}

std::vector<data::Split> parse_splits(const std::string& name) {
  if (name == "all") return {data::Split::kTrain, data::Split::kQuery, data::Split::kGallery};
  try {
    return {data::split_from_string(name)};
  } catch (const Error&) {
    throw ConfigError("unknown split '" + name + "' (expected train, query, gallery or all)");
  }
}

void write_run_config(const RunConfig& config) {
  fs::create_directories(config.output());
  std::ofstream(config.output() / "run_config.json") << nlohmann::json(config).dump(2) << '\n';
}

std::string display_name(Variant v) {
  switch (v) {
    case Variant::kUnityStyle:
      return "UnityStyle";
    case Variant::kUnityGan:
      return "UnityGAN";
    case Variant::kIde:
      return "IDE";
  }
  return "";
}

}  // namespace

fs::path cmd_synth_data(const RunConfig& config, bool force) {
  const auto root = config.dataset_root();
  if (fs::exists(root) && !fs::is_empty(root)) {
    if (!force) throw ConfigError("output directory " + root.string() + " is not empty; pass --force to overwrite");
    fs::remove_all(root);
  }
  const auto dataset = data::make_synthetic_dataset(config.dataset.synthetic);
  data::write_dataset(dataset, root);
  std::ofstream(root / "manifest.json") << data::synthetic_manifest(config.dataset.synthetic, dataset).dump(2) << '\n';
  return root;
}

std::vector<fs::path> cmd_train_transfer(const RunConfig& config, const std::string& camera, bool resume,
                                         std::ostream& log) {
  require_transfer_variant(config.variant);
  const auto dataset = open_dataset(config);
  std::vector<int> cameras;
  if (camera == "all") {
    for (int c = 1; c <= dataset.num_cameras; ++c) cameras.push_back(c);
  } else {
    int id = 0;
    try {
      std::size_t used = 0;
      id = std::stoi(camera, &used);
      if (used != camera.size()) id = 0;
    } catch (const std::exception&) {
      id = 0;
    }
    if (id < 1 || id > dataset.num_cameras) {
      throw ConfigError("unknown camera '" + camera + "'; valid ids are 1.." + std::to_string(dataset.num_cameras) +
                        " or all");
    }
    cameras.push_back(id);
  }

  const auto tcfg = transfer_config(config, config.variant);
  std::vector<fs::path> written;
  for (int c : cameras) {
    const auto ckpt = config.transfer_checkpoint(config.variant, c);
    const auto log_path = fs::path(ckpt).replace_extension(".jsonl");
    fs::create_directories(ckpt.parent_path());
    gan::TransferTrainer trainer(dataset, c, tcfg);
    const bool resuming = resume && fs::exists(ckpt);
    if (resuming) {
      trainer.resume(ckpt);
      log << "camera " << c << ": resuming after epoch " << trainer.epochs_done() << '\n';
    }
    std::ofstream jsonl(log_path, resuming ? std::ios::app : std::ios::trunc);
    trainer.run([&](const gan::EpochMetrics& m, gan::TransferTrainer& t) {
      jsonl << gan::to_json_line(m).dump() << '\n' << std::flush;
      t.save_checkpoint(ckpt);
      log << "camera " << c << " epoch " << m.epoch << "/" << tcfg.epochs << " total " << m.total << '\n';
    });
    if (!fs::exists(ckpt)) trainer.save_checkpoint(ckpt);
    written.push_back(ckpt);
  }
  return written;
}

fs::path cmd_gen_unity(const RunConfig& config, const std::string& split) {
  require_transfer_variant(config.variant);
  const auto splits = parse_splits(split);
  const auto dataset = open_dataset(config);
  auto transfers = load_transfers(config, config.variant, dataset.num_cameras);
  const auto out_root = config.unity_dir(config.variant);
  for (auto s : splits) {
    const auto target = out_root / data::split_directory(s);
    const auto staging = fs::path(target.string() + ".partial");
    fs::remove_all(staging);
    fs::create_directories(staging);
    for (auto i : dataset.indices(s)) {
      const auto& im = dataset.images[i];
      auto& model = transfers[static_cast<std::size_t>(im.camera_id - 1)];
      data::write_image(staging / im.source.filename(), gan::generate_unity(data::load_pixels(im), model, im.camera_id));
    }
    fs::remove_all(target);
    fs::rename(staging, target);
  }
  return out_root;
}

fs::path cmd_train_reid(const RunConfig& config, std::ostream& log) {
  const auto dataset = open_dataset(config);
  std::vector<torch::Tensor> unity;
  if (config.variant != Variant::kIde) {
    const auto dir = config.unity_dir(config.variant) / data::kTrainDir;
    if (!fs::exists(dir)) {
      throw MissingArtifactError("unity training images missing at " + dir.string() + "; run gen-unity --variant " +
                                 to_string(config.variant) + " --split train");
    }
    for (auto i : dataset.indices(data::Split::kTrain)) {
      const auto path = dir / dataset.images[i].source.filename();
      if (!fs::exists(path)) throw MissingArtifactError("unity image missing: " + path.string() + "; rerun gen-unity");
      unity.push_back(data::read_image(path));
    }
  }
  const auto ckpt = config.reid_checkpoint(config.variant);
  fs::create_directories(ckpt.parent_path());
  std::ofstream jsonl(fs::path(ckpt).replace_extension(".jsonl"));
  auto result = reid::train_reid(dataset, unity.empty() ? nullptr : &unity, config.reid,
                                 [&](const reid::ReidEpochMetrics& m) {
                                   jsonl << reid::to_json_line(m).dump() << '\n' << std::flush;
                                   log << to_string(config.variant) << " re-ID epoch " << m.epoch << "/"
                                       << config.reid.epochs << " loss " << m.loss << '\n';
                                 });
  nlohmann::json labels = nlohmann::json::object();
  for (const auto& [pid, label] : result.label_map) labels[std::to_string(pid)] = label;
  nlohmann::json history = nlohmann::json::array();
  for (const auto& m : result.history) history.push_back(reid::to_json_line(m));
  save_reid_model(result.model, ckpt,
                  {{"variant", to_string(config.variant)}, {"label_map", labels}, {"training", config.reid},
                   {"history", history}});
  return ckpt;
}

namespace {

eval::EvalReport evaluate_variant(const RunConfig& config, const data::DatasetIndex& dataset, Variant variant,
                                  bool rerank) {
  const auto ckpt = config.reid_checkpoint(variant);
  if (!fs::exists(ckpt)) {
    throw MissingArtifactError("no re-ID checkpoint at " + ckpt.string() + "; run train-reid --variant " +
                               to_string(variant));
  }
  auto model = reid::load_reid_model(ckpt).model;
  const bool unity = variant != Variant::kIde && config.eval.unity_inputs;
  auto inputs = dataset;
  if (unity) {
    for (auto split : {data::Split::kQuery, data::Split::kGallery}) {
      const auto dir = config.unity_dir(variant) / data::split_directory(split);
      if (!fs::exists(dir)) {
        throw MissingArtifactError("unity " + std::string(data::to_string(split)) + " images missing at " +
                                   dir.string() + "; run gen-unity --variant " + to_string(variant) + " --split all");
      }
      for (auto i : inputs.indices(split)) {
        auto& im = inputs.images[i];
        im.source = dir / im.source.filename();
        im.pixels = torch::Tensor();
        if (!fs::exists(im.source)) throw MissingArtifactError("unity image missing: " + im.source.string());
      }
    }
  }
  std::optional<eval::RerankOptions> options;
  if (rerank) options = config.eval.rerank;
  auto report = eval::evaluate(model, inputs, config.eval.protocol, nullptr, options);
  report.meta["unity_inputs"] = unity;
  report.meta["variant"] = to_string(variant);
  report.meta["checkpoint"] = ckpt.string();
  return report;
}

}  // namespace

std::vector<eval::AblationRow> cmd_eval(const RunConfig& config, bool ablation, bool rerank, std::ostream& log) {
  const auto dataset = open_dataset(config);
  struct Entry {
    std::string label;
    Variant variant;
    bool rerank;
  };
  std::vector<Entry> entries;
  if (ablation) {
    entries = {{"IDE", Variant::kIde, false},
               {"UnityGAN", Variant::kUnityGan, false},
               {"UnityStyle", Variant::kUnityStyle, false},
               {"+RE", Variant::kUnityStyle, true}};
  } else {
    entries.push_back({display_name(config.variant), config.variant, false});
    if (rerank) entries.push_back({"+RE", config.variant, true});
  }
  // Fail before any evaluation when an upstream checkpoint is missing.
  for (const auto& e : entries) {
    if (!fs::exists(config.reid_checkpoint(e.variant))) {
      throw MissingArtifactError("no re-ID checkpoint at " + config.reid_checkpoint(e.variant).string() +
                                 "; run train-reid --variant " + to_string(e.variant));
    }
  }
  std::vector<eval::AblationRow> rows;
  for (const auto& e : entries) {
    auto report = evaluate_variant(config, dataset, e.variant, e.rerank);
    const auto stem = to_string(e.variant) + (e.rerank ? "_rerank" : "");
    eval::write_report(report, config.eval_dir() / stem);
    rows.push_back({e.label, report.top(1), report.mAP});
  }
  fs::create_directories(config.eval_dir());
  std::ofstream(config.eval_dir() / (ablation ? "ablation.csv" : "summary.csv")) << eval::ablation_csv(rows);
  log << eval::ablation_text(rows);
  return rows;
}

fs::path cmd_grid(const RunConfig& config, const std::vector<fs::path>& images, int count, const fs::path& output) {
  std::vector<data::PersonImage> sources;
  if (!images.empty()) {
    for (const auto& p : images) {
      if (!fs::exists(p)) throw MissingArtifactError("image not found: " + p.string());
      const auto label = data::parse_reid_filename(p.filename().string(), config.dataset.layout);
      data::PersonImage im;
      im.source = p;
      im.person_id = label.person_id;
      im.camera_id = label.camera_id;
      sources.push_back(im);
    }
  } else {
    if (count < 1) throw ConfigError("grid needs --count >= 1");
    const auto dataset = open_dataset(config);
    std::vector<std::vector<std::size_t>> per_camera;
    for (int c = 1; c <= dataset.num_cameras; ++c) per_camera.push_back(dataset.train_indices_of_camera(c));
    for (std::size_t k = 0; static_cast<int>(sources.size()) < count; ++k) {
      bool any = false;
      for (const auto& list : per_camera) {
        if (k < list.size() && static_cast<int>(sources.size()) < count) {
          sources.push_back(dataset.images[list[k]]);
          any = true;
        }
      }
      if (!any) break;
    }
  }

  std::vector<GridRow> rows(1);
  rows[0].caption = "real";
  for (const auto& s : sources) rows[0].images.push_back(data::load_pixels(s));
  for (auto variant : {Variant::kUnityGan, Variant::kUnityStyle}) {
    std::map<int, gan::TransferModel> transfers;
    bool complete = true;
    for (const auto& s : sources) {
      if (transfers.count(s.camera_id)) continue;
      const auto ckpt = config.transfer_checkpoint(variant, s.camera_id);
      if (!fs::exists(ckpt)) {
        complete = false;
        break;
      }
      transfers.emplace(s.camera_id, gan::TransferModel::load(ckpt));
    }
    if (!complete) continue;
    GridRow row{display_name(variant), {}};
    for (std::size_t i = 0; i < sources.size(); ++i) {
      row.images.push_back(gan::generate_unity(rows[0].images[i], transfers.at(sources[i].camera_id), sources[i].camera_id));
    }
    rows.push_back(std::move(row));
  }
  if (rows.size() == 1) {
    throw MissingArtifactError("no complete transfer set found under " + config.output().string() +
                               "; run train-transfer first");
  }
  const auto target = output.empty() ? config.output() / "grid.png" : output;
  if (target.has_parent_path()) fs::create_directories(target.parent_path());
  data::write_image(target, make_grid(rows));
  return target;
}

int run_cli(int argc, char** argv) {
  CLI::App app{"UnityStyle camera-style unification pipeline for person re-identification"};
  app.require_subcommand(1);
  std::string config_path, output_dir, variant;
  std::optional<uint64_t> seed;
  bool force = false;
  app.add_option("--config", config_path, "JSON run configuration (defaults when omitted)");
  app.add_option("--seed", seed, "seed for the corpus, transfer and re-ID stages");
  app.add_option("--output-dir", output_dir, "run directory (overrides output_dir)");
  app.add_option("--variant", variant, "unitystyle, unitygan or ide (overrides variant)");
  app.add_flag("--force", force, "overwrite existing outputs");

  auto* synth = app.add_subcommand("synth-data", "write the synthetic multi-camera corpus");
  std::string camera = "all";
  bool resume = false;
  auto* transfer = app.add_subcommand("train-transfer", "train per-camera transfer models");
  transfer->add_option("--camera", camera, "camera id or all");
  transfer->add_flag("--resume", resume, "continue from per-epoch checkpoints");
  std::string split = "all";
  auto* gen = app.add_subcommand("gen-unity", "write unity images for a split");
  gen->add_option("--split", split, "train, query, gallery or all");
  auto* train_reid = app.add_subcommand("train-reid", "train the re-ID model");
  bool ablation = false, rerank = false;
  auto* evaluate = app.add_subcommand("eval", "evaluate re-ID models");
  evaluate->add_flag("--ablation", ablation, "evaluate the IDE, UnityGAN, UnityStyle and +RE rows");
  evaluate->add_flag("--rerank", rerank, "add a k-reciprocal re-ranked row");
  int count = 6;
  std::string grid_output;
  std::vector<std::string> grid_images;
  auto* grid = app.add_subcommand("grid", "tile source images and their unity versions into one PNG");
  grid->add_option("--count", count, "number of training images when none are given");
  grid->add_option("--output", grid_output, "PNG path (default <output_dir>/grid.png)");
  grid->add_option("images", grid_images, "source images");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    RunConfig config = config_path.empty() ? RunConfig{} : load_config(config_path);
    if (seed) config.set_seed(*seed);
    if (!output_dir.empty()) config.output_dir = output_dir;
    if (!variant.empty()) config.variant = variant_from_string(variant);
    config.validate();
    write_run_config(config);

    if (synth->parsed()) {
      const auto root = cmd_synth_data(config, force);
      std::cout << "corpus written to " << root.string() << '\n';
    } else if (transfer->parsed()) {
      for (const auto& p : cmd_train_transfer(config, camera, resume, std::cout)) std::cout << "wrote " << p.string() << '\n';
    } else if (gen->parsed()) {
      const auto out = cmd_gen_unity(config, split);
      std::cout << "unity images written to " << out.string() << '\n';
    } else if (train_reid->parsed()) {
      const auto out = cmd_train_reid(config, std::cout);
      std::cout << "wrote " << out.string() << '\n';
    } else if (evaluate->parsed()) {
      cmd_eval(config, ablation, rerank, std::cout);
    } else if (grid->parsed()) {
      std::vector<fs::path> paths(grid_images.begin(), grid_images.end());
      const auto out = cmd_grid(config, paths, count, grid_output);
      std::cout << "wrote " << out.string() << '\n';
    }
    return kExitOk;
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const ArgumentError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const MissingArtifactError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitMissingArtifact;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
}

}  // namespace unitystyle::cli

#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "unitystyle/cli/config.hpp"
#include "unitystyle/eval/report.hpp"

namespace unitystyle::cli {

/// Process exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitMissingArtifact = 3;
inline constexpr int kExitRuntime = 4;

/// Writes the synthetic corpus and its manifest to `config.dataset_root()`. Refuses a
/// non-empty target unless `force`. Returns the corpus directory.
std::filesystem::path cmd_synth_data(const RunConfig& config, bool force);

/// Trains one transfer per requested camera ("all" or a camera id) for `config.variant`,
/// writing `transfer_cam<k>.ckpt` after every epoch and one JSON line per epoch to
/// `transfer_cam<k>.jsonl`. With `resume`, continues from existing per-epoch checkpoints.
std::vector<std::filesystem::path> cmd_train_transfer(const RunConfig& config, const std::string& camera, bool resume,
                                                      std::ostream& log);

/// Writes the unity version of every image of the requested split ("train", "query",
/// "gallery" or "all") into a mirror tree under `config.unity_dir(variant)`, keeping file
/// names. Nothing is written unless every camera's transfer checkpoint exists.
std::filesystem::path cmd_gen_unity(const RunConfig& config, const std::string& split);

/// Trains the re-ID model of `config.variant` and writes its checkpoint and JSON-lines log.
std::filesystem::path cmd_train_reid(const RunConfig& config, std::ostream& log);

/// Evaluates the re-ID model of `config.variant` (report files under `eval/`). With
/// `ablation`, evaluates the IDE, UnityGAN, UnityStyle and UnityStyle + re-ranking rows and
/// writes `eval/ablation.csv`.
std::vector<eval::AblationRow> cmd_eval(const RunConfig& config, bool ablation, bool rerank, std::ostream& log);

/// Grid of source images and their unity versions from every available transfer set.
/// Uses `images` when given, else `count` training images spread over the cameras.
std::filesystem::path cmd_grid(const RunConfig& config, const std::vector<std::filesystem::path>& images, int count,
                               const std::filesystem::path& output);

/// Parses arguments, runs one verb and maps errors to exit codes.
int run_cli(int argc, char** argv);

}  // namespace unitystyle::cli

#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "unitystyle/data/person_image.hpp"

namespace unitystyle::data {

/// Directory names of the Market-1501 / DukeMTMC-reID release layout.
inline constexpr const char* kTrainDir = "bounding_box_train";
inline constexpr const char* kQueryDir = "query";
inline constexpr const char* kGalleryDir = "bounding_box_test";

const char* split_directory(Split split);

/// Immutable, ordered index of a camera-annotated re-ID corpus.
struct DatasetIndex {
  std::vector<PersonImage> images;
  /// Distinct non-distractor identities in the train split.
  int num_identities = 0;
  int num_cameras = 0;
  std::map<Split, int> split_counts;
  std::string layout_name;

  /// Indices into `images` of one split, in index order.
  std::vector<std::size_t> indices(Split split) const;
  /// Indices of train images taken by `camera_id`.
  std::vector<std::size_t> train_indices_of_camera(int camera_id) const;
  /// Maps train person ids to contiguous class labels 0..num_identities-1 (ascending id order).
  std::map<int, int> train_label_map() const;

  /// Recomputes counts from `images` and checks the camera/split invariants.
  void finalize();
};

/// Loads a corpus in the public Market-1501 / DukeMTMC-reID directory convention.
/// Pixels are decoded lazily. Distractors are dropped from the train split.
DatasetIndex load_dataset(const std::filesystem::path& root, const std::string& layout);

/// Writes an in-memory corpus to `root` in Market layout (PNG, lossless).
void write_dataset(const DatasetIndex& dataset, const std::filesystem::path& root);

}  // namespace unitystyle::data

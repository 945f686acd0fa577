#include "unitystyle/data/dataset.hpp"

#include <algorithm>
#include <set>

#include "unitystyle/data/image_io.hpp"
#include "unitystyle/errors.hpp"

namespace unitystyle::data {

namespace fs = std::filesystem;

const char* split_directory(Split split) {
  switch (split) {
    case Split::kTrain:
      return kTrainDir;
    case Split::kQuery:
      return kQueryDir;
    case Split::kGallery:
      return kGalleryDir;
  }
  return "";
}

std::vector<std::size_t> DatasetIndex::indices(Split split) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < images.size(); ++i) {
    if (images[i].split == split) out.push_back(i);
  }
  return out;
}

std::vector<std::size_t> DatasetIndex::train_indices_of_camera(int camera_id) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < images.size(); ++i) {
    if (images[i].split == Split::kTrain && images[i].camera_id == camera_id) out.push_back(i);
  }
  return out;
}

std::map<int, int> DatasetIndex::train_label_map() const {
  std::set<int> ids;
  for (const auto& image : images) {
    if (image.split == Split::kTrain && !image.is_distractor()) ids.insert(image.person_id);
  }
  std::map<int, int> labels;
  int next = 0;
  for (int id : ids) labels[id] = next++;
  return labels;
}

void DatasetIndex::finalize() {
  split_counts = {{Split::kTrain, 0}, {Split::kQuery, 0}, {Split::kGallery, 0}};
  std::set<int> train_ids;
  int max_camera = 0;
  for (const auto& image : images) {
    if (image.camera_id < 1) {
      throw DatasetError("camera id must be >= 1: " + image.source.string());
    }
    max_camera = std::max(max_camera, image.camera_id);
    split_counts[image.split] += 1;
    if (image.split == Split::kTrain && !image.is_distractor()) train_ids.insert(image.person_id);
  }
  if (num_cameras == 0) {
    num_cameras = max_camera;
  } else if (max_camera > num_cameras) {
    throw DatasetError("camera id " + std::to_string(max_camera) + " exceeds camera count " +
                       std::to_string(num_cameras));
  }
  num_identities = static_cast<int>(train_ids.size());
}

namespace {

bool is_image_file(const fs::path& path) {
  auto ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
  return ext == ".jpg" || ext == ".jpeg" || ext == ".png" || ext == ".bmp";
}

}  // namespace

DatasetIndex load_dataset(const fs::path& root, const std::string& layout) {
  if (layout != "market1501" && layout != "dukemtmc") {
    throw ConfigError("unknown dataset layout '" + layout + "' (expected market1501 or dukemtmc)");
  }
  DatasetIndex index;
  index.layout_name = layout;
  for (Split split : {Split::kTrain, Split::kQuery, Split::kGallery}) {
    const fs::path dir = root / split_directory(split);
    if (!fs::is_directory(dir)) {
      throw ConfigError("dataset directory missing: " + dir.string());
    }
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(dir)) {
      if (entry.is_regular_file() && is_image_file(entry.path())) files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    int kept = 0;
    for (const auto& file : files) {
      const auto label = parse_reid_filename(file.filename().string(), layout);
      if (split == Split::kTrain && label.person_id == kDistractorId) continue;
      index.images.push_back(PersonImage{file, label.person_id, label.camera_id, label.sequence_id, split, {}});
      ++kept;
    }
    if (kept == 0) {
      throw DatasetError("split '" + std::string(to_string(split)) + "' has no images under " + dir.string());
    }
  }
  index.finalize();
  return index;
}

void write_dataset(const DatasetIndex& dataset, const fs::path& root) {
  for (Split split : {Split::kTrain, Split::kQuery, Split::kGallery}) {
    fs::create_directories(root / split_directory(split));
  }
  for (const auto& image : dataset.images) {
    write_image(root / split_directory(image.split) / image.source.filename(), load_pixels(image));
  }
}

}  // namespace unitystyle::data

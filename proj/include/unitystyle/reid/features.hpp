#pragma once

#include <filesystem>
#include <vector>

#include <torch/torch.h>

#include "unitystyle/data/person_image.hpp"

namespace unitystyle::reid {

/// Writes `features` (K x D, float32) as `<stem>.npy` and a `<stem>.json` sidecar listing
/// source path, person id and camera id of each row in order.
void export_features(const std::filesystem::path& stem, const torch::Tensor& features,
                     const std::vector<data::PersonImage>& rows);

/// Reads the matrix written by `export_features` (little-endian float32 .npy, C order).
torch::Tensor read_npy(const std::filesystem::path& path);

}  // namespace unitystyle::reid

#pragma once

#include <string>
#include <vector>

#include <torch/torch.h>

namespace unitystyle::cli {

struct GridRow {
  std::string caption;
  std::vector<torch::Tensor> images;  ///< 3xHxW in [0,1], any size
};

struct GridLayout {
  int64_t tile_height = 128;
  int64_t tile_width = 64;
  int64_t caption_width = 120;
  int64_t gap = 4;
};

/// Tiles rows of images into one 3xHxW picture. Each row starts with its caption; images are
/// resized to the tile size; short rows are padded with blank tiles.
torch::Tensor make_grid(const std::vector<GridRow>& rows, const GridLayout& layout = {});

}  // namespace unitystyle::cli

#include "unitystyle/cli/grid.hpp"

#include <algorithm>

#include <opencv2/imgproc.hpp>

#include "unitystyle/data/image_io.hpp"
#include "unitystyle/errors.hpp"

namespace unitystyle::cli {

torch::Tensor make_grid(const std::vector<GridRow>& rows, const GridLayout& layout) {
  if (rows.empty()) throw ArgumentError("grid needs at least one row");
  std::size_t columns = 0;
  for (const auto& r : rows) columns = std::max(columns, r.images.size());
  if (columns == 0) throw ArgumentError("grid rows hold no images");
  const int64_t th = layout.tile_height, tw = layout.tile_width, gap = layout.gap;
  const int64_t height = static_cast<int64_t>(rows.size()) * (th + gap) + gap;
  const int64_t width = layout.caption_width + static_cast<int64_t>(columns) * (tw + gap) + gap;
  auto canvas = torch::ones({3, height, width});

  // Captions are drawn with OpenCV on an 8-bit copy of the caption column.
  cv::Mat text(static_cast<int>(height), static_cast<int>(layout.caption_width), CV_8UC1, cv::Scalar(255));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const int64_t top = gap + static_cast<int64_t>(r) * (th + gap);
    cv::putText(text, rows[r].caption, cv::Point(4, static_cast<int>(top + th / 2)), cv::FONT_HERSHEY_SIMPLEX, 0.4,
                cv::Scalar(0), 1, cv::LINE_AA);
    for (std::size_t c = 0; c < rows[r].images.size(); ++c) {
      const int64_t left = layout.caption_width + gap + static_cast<int64_t>(c) * (tw + gap);
      auto tile = data::resize(rows[r].images[c].to(torch::kFloat32), th, tw).clamp(0.0, 1.0);
      canvas.slice(1, top, top + th).slice(2, left, left + tw).copy_(tile);
    }
  }
  auto caption = torch::from_blob(text.data, {height, layout.caption_width}, torch::kUInt8).to(torch::kFloat32) / 255.0;
  canvas.slice(2, 0, layout.caption_width).copy_(caption.unsqueeze(0).expand({3, height, layout.caption_width}));
  return canvas;
}

}  // namespace unitystyle::cli

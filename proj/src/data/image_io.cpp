#include "unitystyle/data/image_io.hpp"

#include <opencv2/imgcodecs.hpp>
#include <opencv2/imgproc.hpp>

#include "unitystyle/errors.hpp"

namespace unitystyle::data {

namespace fs = std::filesystem;

torch::Tensor read_image(const fs::path& path) {
  cv::Mat bgr = cv::imread(path.string(), cv::IMREAD_COLOR);
  if (bgr.empty()) {
    throw DatasetError("cannot decode image: " + path.string());
  }
  cv::Mat rgb;
  cv::cvtColor(bgr, rgb, cv::COLOR_BGR2RGB);
  auto hwc = torch::from_blob(rgb.data, {rgb.rows, rgb.cols, 3}, torch::kUInt8);
  return hwc.permute({2, 0, 1}).to(torch::kFloat32).div(255.0).contiguous();
}

void write_image(const fs::path& path, const torch::Tensor& pixels) {
  TORCH_CHECK(pixels.dim() == 3 && pixels.size(0) == 3, "write_image expects a 3xHxW tensor");
  auto bytes = pixels.detach().to(torch::kCPU, torch::kFloat32)
                   .clamp(0.0, 1.0)
                   .mul(255.0)
                   .round()
                   .to(torch::kUInt8)
                   .permute({1, 2, 0})
                   .contiguous();
  cv::Mat rgb(static_cast<int>(bytes.size(0)), static_cast<int>(bytes.size(1)), CV_8UC3, bytes.data_ptr<uint8_t>());
  cv::Mat bgr;
  cv::cvtColor(rgb, bgr, cv::COLOR_RGB2BGR);
  if (path.has_parent_path()) {
    fs::create_directories(path.parent_path());
  }
  if (!cv::imwrite(path.string(), bgr)) {
    throw Error("cannot write image: " + path.string());
  }
}

torch::Tensor resize(const torch::Tensor& pixels, int64_t height, int64_t width) {
  const bool batched = pixels.dim() == 4;
  TORCH_CHECK(batched || pixels.dim() == 3, "resize expects CHW or NCHW");
  if (pixels.size(-2) == height && pixels.size(-1) == width) {
    return pixels;
  }
  auto input = batched ? pixels : pixels.unsqueeze(0);
  auto out = torch::nn::functional::interpolate(
      input, torch::nn::functional::InterpolateFuncOptions()
                 .size(std::vector<int64_t>{height, width})
                 .mode(torch::kBilinear)
                 .align_corners(false));
  return batched ? out : out.squeeze(0);
}

torch::Tensor quantize_8bit(const torch::Tensor& pixels) {
  return pixels.clamp(0.0, 1.0).mul(255.0).round().div(255.0);
}

}  // namespace unitystyle::data

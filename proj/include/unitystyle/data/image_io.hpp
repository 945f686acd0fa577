#pragma once

#include <filesystem>

#include <torch/torch.h>

namespace unitystyle::data {

// Pixel tensors throughout the library are float32, CHW, RGB, values in [0,1].

/// Decodes an 8-bit image file into a 3xHxW float tensor in [0,1].
torch::Tensor read_image(const std::filesystem::path& path);

/// Encodes a 3xHxW tensor as 8-bit RGB. Values are clamped and rounded to the nearest level.
void write_image(const std::filesystem::path& path, const torch::Tensor& pixels);

/// Bilinear resize of a CHW or NCHW tensor. Returns the input unchanged when the size already matches.
torch::Tensor resize(const torch::Tensor& pixels, int64_t height, int64_t width);

/// Round-trips through the 8-bit grid, the same quantization a write/read cycle applies.
torch::Tensor quantize_8bit(const torch::Tensor& pixels);

}  // namespace unitystyle::data

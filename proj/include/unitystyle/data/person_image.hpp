#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include <torch/torch.h>

namespace unitystyle::data {

enum class Split { kTrain, kQuery, kGallery };

std::string_view to_string(Split split);
Split split_from_string(std::string_view name);

/// Identity used for distractor/noise images ("-1" and "0000" prefixes).
inline constexpr int kDistractorId = -1;

/// Identity and camera decoded from a re-ID filename.
struct FileLabel {
  int person_id = 0;
  int camera_id = 0;
  /// Recording sequence within the camera (Market "s<k>" token); 0 when the layout has none.
  int sequence_id = 0;

  bool operator==(const FileLabel&) const = default;
};

/// One labelled image. `pixels` is populated for in-memory corpora; otherwise the
/// image is decoded from `source` on demand by `load_pixels`.
struct PersonImage {
  std::filesystem::path source;
  int person_id = 0;
  int camera_id = 0;
  int sequence_id = 0;
  Split split = Split::kTrain;
  torch::Tensor pixels;

  bool is_distractor() const { return person_id == kDistractorId; }
};

/// Parses `<pid>_c<cam>[s<seq>]_...` names. Supported layouts: "market1501", "dukemtmc".
/// Throws ParseError naming the offending token.
FileLabel parse_reid_filename(std::string_view name, std::string_view layout);

/// Inverse of parse_reid_filename for the Market convention; used when writing corpora.
std::string format_market_filename(const FileLabel& label, int frame, std::string_view extension = ".png");

/// Pixels of `image`, decoding from disk when they are not held in memory.
torch::Tensor load_pixels(const PersonImage& image);

}  // namespace unitystyle::data

#include "unitystyle/data/person_image.hpp"

#include <charconv>
#include <cstdio>

#include "unitystyle/data/image_io.hpp"
#include "unitystyle/errors.hpp"

namespace unitystyle::data {

std::string_view to_string(Split split) {
  switch (split) {
    case Split::kTrain:
      return "train";
    case Split::kQuery:
      return "query";
    case Split::kGallery:
      return "gallery";
  }
  return "unknown";
}

Split split_from_string(std::string_view name) {
  if (name == "train") return Split::kTrain;
  if (name == "query") return Split::kQuery;
  if (name == "gallery") return Split::kGallery;
  throw ConfigError("unknown split '" + std::string(name) + "' (expected train, query or gallery)");
}

namespace {

bool parse_int(std::string_view text, int& out) {
  if (text.empty()) return false;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
  return ec == std::errc() && ptr == text.data() + text.size();
}

bool all_digits(std::string_view text) {
  if (text.empty()) return false;
  for (char ch : text) {
    if (ch < '0' || ch > '9') return false;
  }
  return true;
}

}  // namespace

FileLabel parse_reid_filename(std::string_view name, std::string_view layout) {
  if (layout != "market1501" && layout != "dukemtmc") {
    throw ConfigError("unknown dataset layout '" + std::string(layout) + "'");
  }
  // Basename only; directories carry the split, not the label.
  if (auto slash = name.find_last_of("/\\"); slash != std::string_view::npos) {
    name.remove_prefix(slash + 1);
  }

  const auto first = name.find('_');
  if (first == std::string_view::npos) {
    throw ParseError("missing '_' separator in '" + std::string(name) + "'");
  }
  const auto pid_token = name.substr(0, first);
  FileLabel label;
  if (pid_token == "-1") {
    label.person_id = kDistractorId;
  } else if (all_digits(pid_token) && parse_int(pid_token, label.person_id)) {
    if (label.person_id == 0) label.person_id = kDistractorId;
  } else {
    throw ParseError("bad person id token '" + std::string(pid_token) + "' in '" + std::string(name) + "'");
  }

  auto rest = name.substr(first + 1);
  const auto end = rest.find_first_of("_.");
  const auto cam_token = rest.substr(0, end);
  if (cam_token.size() < 2 || cam_token[0] != 'c') {
    throw ParseError("bad camera token '" + std::string(cam_token) + "' in '" + std::string(name) + "'");
  }
  auto digits = cam_token.substr(1);
  const auto s_pos = digits.find('s');
  std::string_view cam_digits = digits.substr(0, s_pos);
  if (!all_digits(cam_digits) || !parse_int(cam_digits, label.camera_id) || label.camera_id < 1) {
    throw ParseError("bad camera token '" + std::string(cam_token) + "' in '" + std::string(name) + "'");
  }
  if (s_pos != std::string_view::npos) {
    auto seq_digits = digits.substr(s_pos + 1);
    if (layout != "market1501" || !all_digits(seq_digits) || !parse_int(seq_digits, label.sequence_id)) {
      throw ParseError("bad camera token '" + std::string(cam_token) + "' in '" + std::string(name) + "'");
    }
  }
  return label;
}

std::string format_market_filename(const FileLabel& label, int frame, std::string_view extension) {
  char buffer[64];
  const int pid = label.person_id == kDistractorId ? -1 : label.person_id;
  if (pid < 0) {
    std::snprintf(buffer, sizeof(buffer), "-1_c%ds%d_%06d_00", label.camera_id, label.sequence_id, frame);
  } else {
    std::snprintf(buffer, sizeof(buffer), "%04d_c%ds%d_%06d_00", pid, label.camera_id, label.sequence_id, frame);
  }
  return std::string(buffer) + std::string(extension);
}

torch::Tensor load_pixels(const PersonImage& image) {
  if (image.pixels.defined()) {
    return image.pixels;
  }
  return read_image(image.source);
}

}  // namespace unitystyle::data

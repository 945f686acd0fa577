#include "unitystyle/reid/features.hpp"

#include <fstream>
#include <regex>
#include <sstream>

#include <nlohmann/json.hpp>

#include "unitystyle/errors.hpp"

namespace unitystyle::reid {

namespace fs = std::filesystem;

void export_features(const fs::path& stem, const torch::Tensor& features, const std::vector<data::PersonImage>& rows) {
  if (features.dim() != 2 || features.size(0) != static_cast<int64_t>(rows.size())) {
    throw ArgumentError("feature matrix rows must match the row metadata");
  }
  if (stem.has_parent_path()) fs::create_directories(stem.parent_path());
  auto matrix = features.to(torch::kFloat32).contiguous();

  std::ostringstream header;
  header << "{'descr': '<f4', 'fortran_order': False, 'shape': (" << matrix.size(0) << ", " << matrix.size(1)
         << "), }";
  std::string text = header.str();
  // magic (6) + version (2) + length (2) + header, padded with spaces to a multiple of 64
  const std::size_t total = 10 + text.size() + 1;
  text.append((64 - total % 64) % 64, ' ');
  text.push_back('\n');

  std::ofstream npy(fs::path(stem.string() + ".npy"), std::ios::binary);
  npy.write("\x93NUMPY\x01\x00", 8);
  const auto len = static_cast<uint16_t>(text.size());
  const char len_bytes[2] = {static_cast<char>(len & 0xff), static_cast<char>(len >> 8)};
  npy.write(len_bytes, 2);
  npy.write(text.data(), static_cast<std::streamsize>(text.size()));
  npy.write(reinterpret_cast<const char*>(matrix.data_ptr<float>()),
            static_cast<std::streamsize>(matrix.numel() * sizeof(float)));
  if (!npy) throw Error("failed to write " + stem.string() + ".npy");

  nlohmann::json sidecar{{"shape", {matrix.size(0), matrix.size(1)}}, {"rows", nlohmann::json::array()}};
  for (const auto& r : rows) {
    sidecar["rows"].push_back({{"path", r.source.generic_string()}, {"person_id", r.person_id}, {"camera_id", r.camera_id}});
  }
  std::ofstream(fs::path(stem.string() + ".json")) << sidecar.dump(2) << '\n';
}

torch::Tensor read_npy(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw MissingArtifactError("feature file not found: " + path.string());
  char magic[10];
  in.read(magic, 10);
  if (!in || std::string(magic, 6) != "\x93NUMPY" || magic[6] != 1) throw ParseError("not a version-1 .npy file");
  const uint16_t len = static_cast<uint8_t>(magic[8]) | (static_cast<uint16_t>(static_cast<uint8_t>(magic[9])) << 8);
  std::string header(len, '\0');
  in.read(header.data(), len);
  std::smatch m;
  if (header.find("'<f4'") == std::string::npos || header.find("False") == std::string::npos ||
      !std::regex_search(header, m, std::regex(R"(\((\d+), (\d+)\))"))) {
    throw ParseError("unsupported .npy header: " + header);
  }
  const int64_t rows = std::stoll(m[1]), cols = std::stoll(m[2]);
  auto out = torch::empty({rows, cols}, torch::kFloat32);
  in.read(reinterpret_cast<char*>(out.data_ptr<float>()), static_cast<std::streamsize>(out.numel() * sizeof(float)));
  if (!in) throw ParseError("truncated .npy file " + path.string());
  return out;
}

}  // namespace unitystyle::reid

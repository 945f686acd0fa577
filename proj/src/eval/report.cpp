#include "unitystyle/eval/report.hpp"

#include <fstream>
#include <iomanip>
#include <sstream>

#include "unitystyle/errors.hpp"

namespace unitystyle::eval {

namespace fs = std::filesystem;

namespace {

std::string cell(const std::optional<double>& v) {
  if (!v) return "NA";
  std::ostringstream out;
  out << std::setprecision(6) << *v;
  return out.str();
}

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path);
  out << text;
  if (!out) throw Error("failed to write " + path.string());
}

}  // namespace

std::string camera_matrix_csv(const CameraMatrix& m) {
  std::ostringstream out;
  out << "query_cam\\gallery_cam";
  for (std::size_t g = 0; g < m.size(); ++g) out << ',' << g + 1;
  out << '\n';
  for (std::size_t q = 0; q < m.size(); ++q) {
    out << q + 1;
    for (const auto& v : m[q]) out << ',' << cell(v);
    out << '\n';
  }
  return out.str();
}

std::string camera_matrix_long_csv(const CameraMatrix& m) {
  std::ostringstream out;
  out << "query_cam,gallery_cam,accuracy\n";
  for (std::size_t q = 0; q < m.size(); ++q) {
    for (std::size_t g = 0; g < m[q].size(); ++g) out << q + 1 << ',' << g + 1 << ',' << cell(m[q][g]) << '\n';
  }
  return out.str();
}

void write_report(const EvalReport& report, const fs::path& stem) {
  write_text(fs::path(stem.string() + ".json"), nlohmann::json(report).dump(2) + "\n");
  write_text(fs::path(stem.string() + "_camera_matrix.csv"), camera_matrix_csv(report.camera_matrix));
  write_text(fs::path(stem.string() + "_camera_long.csv"), camera_matrix_long_csv(report.camera_matrix));
}

std::string ablation_csv(const std::vector<AblationRow>& rows) {
  std::ostringstream out;
  out << "method,top1,mAP\n" << std::fixed << std::setprecision(2);
  for (const auto& r : rows) out << r.method << ',' << 100.0 * r.top1 << ',' << 100.0 * r.mAP << '\n';
  return out.str();
}

std::string ablation_text(const std::vector<AblationRow>& rows) {
  std::ostringstream out;
  out << std::left << std::setw(14) << "method" << std::right << std::setw(9) << "top-1" << std::setw(9) << "mAP"
      << '\n'
      << std::fixed << std::setprecision(2);
  for (const auto& r : rows) {
    out << std::left << std::setw(14) << r.method << std::right << std::setw(9) << 100.0 * r.top1 << std::setw(9)
        << 100.0 * r.mAP << '\n';
  }
  return out.str();
}

}  // namespace unitystyle::eval

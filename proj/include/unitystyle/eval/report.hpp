#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "unitystyle/eval/evaluate.hpp"

namespace unitystyle::eval {

/// Camera matrix as CSV: header "query_cam\gallery_cam,1,..,C", absent cells written as "NA".
std::string camera_matrix_csv(const CameraMatrix& m);

/// Long-format rows (query_cam, gallery_cam, accuracy) for heatmap plotting; absent cells are
/// written with accuracy "NA".
std::string camera_matrix_long_csv(const CameraMatrix& m);

/// Writes `<stem>.json`, `<stem>_camera_matrix.csv` and `<stem>_camera_long.csv`.
void write_report(const EvalReport& report, const std::filesystem::path& stem);

struct AblationRow {
  std::string method;
  double top1 = 0.0;
  double mAP = 0.0;
};

/// CSV "method,top1,mAP" with values in percent, two decimals.
std::string ablation_csv(const std::vector<AblationRow>& rows);
/// The same table as aligned text for terminal output.
std::string ablation_text(const std::vector<AblationRow>& rows);

}  // namespace unitystyle::eval

#include "unitystyle/reid/loss.hpp"

#include <cmath>

#include <c10/util/Logging.h>

#include "unitystyle/errors.hpp"

namespace unitystyle::reid {

void ClassProbabilities::validate(double tolerance) const {
  if (p.empty()) throw ArgumentError("empty probability vector");
  if (ground_truth < 0 || ground_truth >= static_cast<int64_t>(p.size())) {
    throw ArgumentError("label " + std::to_string(ground_truth) + " outside " + std::to_string(p.size()) +
                        " classes");
  }
  double sum = 0.0;
  for (double v : p) {
    if (v < 0.0) throw ArgumentError("negative class probability");
    sum += v;
  }
  if (std::abs(sum - 1.0) > tolerance) throw ArgumentError("class probabilities sum to " + std::to_string(sum));
}

double cross_entropy(const ClassProbabilities& probs) {
  probs.validate();
  double py = probs.p[static_cast<std::size_t>(probs.ground_truth)];
  if (py < kProbabilityFloor) {
    VLOG(1) << "p(y)=" << py << " clamped to " << kProbabilityFloor << " in cross_entropy";
    py = kProbabilityFloor;
  }
  return -std::log(py);
}

torch::Tensor cross_entropy(const torch::Tensor& logits, const torch::Tensor& labels) {
  if (logits.dim() != 2 || labels.dim() != 1 || logits.size(0) != labels.size(0)) {
    throw ArgumentError("cross_entropy expects N x L logits and N labels");
  }
  auto nll = -torch::log_softmax(logits, 1).gather(1, labels.to(torch::kLong).unsqueeze(1)).squeeze(1);
  return nll.clamp_max(-std::log(kProbabilityFloor));
}

namespace {

void check_pair(const std::vector<ClassProbabilities>& real, const std::vector<ClassProbabilities>& unity) {
  if (real.empty()) throw ArgumentError("re-ID loss over an empty batch");
  if (real.size() != unity.size()) throw ArgumentError("real and unity sample counts differ");
}

}  // namespace

double reid_loss(const std::vector<ClassProbabilities>& real, const std::vector<ClassProbabilities>& unity) {
  check_pair(real, unity);
  double sum = 0.0;
  for (std::size_t i = 0; i < real.size(); ++i) sum += cross_entropy(real[i]) + cross_entropy(unity[i]);
  return sum / static_cast<double>(real.size());
}

double reid_loss_product_form(const std::vector<ClassProbabilities>& real,
                              const std::vector<ClassProbabilities>& unity) {
  check_pair(real, unity);
  double sum = 0.0;
  for (std::size_t i = 0; i < real.size(); ++i) {
    real[i].validate();
    unity[i].validate();
    const double pr = std::max(real[i].p[static_cast<std::size_t>(real[i].ground_truth)], kProbabilityFloor);
    const double pu = std::max(unity[i].p[static_cast<std::size_t>(unity[i].ground_truth)], kProbabilityFloor);
    sum += std::log(pr * pu);
  }
  return -sum / static_cast<double>(real.size());
}

torch::Tensor reid_loss(ReidModel& model, const TrainBatch& batch, torch::Tensor* real_logits) {
  const int64_t n = batch.size();
  if (n == 0) throw ArgumentError("re-ID loss over an empty batch");
  if (batch.labels.size(0) != n) throw ArgumentError("label count differs from the real image count");
  if (!batch.unity.defined()) {
    auto logits = model->forward(batch.real).logits;
    if (real_logits != nullptr) *real_logits = logits.detach();
    return cross_entropy(logits, batch.labels).mean();
  }
  if (batch.unity.size(0) != n) throw ArgumentError("real and unity sample counts differ");
  auto logits = model->forward(torch::cat({batch.real, batch.unity}, 0)).logits;
  if (real_logits != nullptr) *real_logits = logits.slice(0, 0, n).detach();
  const auto& unity_labels = batch.unity_labels.defined() ? batch.unity_labels : batch.labels;
  if (unity_labels.size(0) != n) throw ArgumentError("unity label count differs from the unity image count");
  auto ce = cross_entropy(logits, torch::cat({batch.labels, unity_labels}, 0));
  return ce.sum() / static_cast<double>(n);
}

}  // namespace unitystyle::reid

#pragma once

#include <cstdint>
#include <vector>

#include <torch/torch.h>

#include "unitystyle/reid/model.hpp"

namespace unitystyle::reid {

/// Lower clamp on p(y) inside the logarithm.
inline constexpr double kProbabilityFloor = 1e-12;

/// Predicted class distribution for one image together with its label.
struct ClassProbabilities {
  std::vector<double> p;
  int64_t ground_truth = 0;

  /// Throws ArgumentError unless p is a distribution (sum 1 within `tolerance`, no negative
  /// entries) and the label indexes it.
  void validate(double tolerance = 1e-6) const;
};

/// -log p(y). One-hot targets, no label smoothing. p(y)=0 is clamped to kProbabilityFloor.
double cross_entropy(const ClassProbabilities& probs);

/// Per-sample -log softmax(logits)[label], with the same floor on the probability.
torch::Tensor cross_entropy(const torch::Tensor& logits, const torch::Tensor& labels);

/// (1/N) sum_i [CE(real_i) + CE(unity_i)].
double reid_loss(const std::vector<ClassProbabilities>& real, const std::vector<ClassProbabilities>& unity);

/// -(1/N) sum_i log(p_R^i * p_U^i); algebraically equal to `reid_loss`.
double reid_loss_product_form(const std::vector<ClassProbabilities>& real,
                              const std::vector<ClassProbabilities>& unity);

/// N real images and N unity images with their labels. A unity image carries the label of
/// the real image it was generated from; `unity_labels` may be left undefined when the unity
/// images are those of `real` in order. `unity` may be undefined for the real-only baseline.
struct TrainBatch {
  torch::Tensor real;
  torch::Tensor unity;
  torch::Tensor labels;
  torch::Tensor unity_labels;

  int64_t size() const { return real.defined() ? real.size(0) : 0; }
};

/// Training loss of a batch: (1/N) sum_i [CE_R^i + CE_U^i], or the mean real cross-entropy
/// when the batch carries no unity images. Throws ArgumentError for an empty batch or
/// mismatched counts. When `real_logits` is given it receives the logits of the real images.
torch::Tensor reid_loss(ReidModel& model, const TrainBatch& batch, torch::Tensor* real_logits = nullptr);

}  // namespace unitystyle::reid

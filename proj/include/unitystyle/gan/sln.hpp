#pragma once

#include <cstdint>

#include <nlohmann/json.hpp>
#include <torch/torch.h>

namespace unitystyle::gan {

/// Scheduled loss normalization state for one loss term: an exponential running average of
/// the term's magnitude. Dividing by it keeps every term near unit scale.
struct SlnState {
  double decay = 0.99;
  double magnitude = 0.0;
  int64_t steps = 0;
  /// When set, the magnitude is used but never updated.
  bool frozen = false;

  /// State pinned at a fixed magnitude.
  static SlnState frozen_at(double magnitude);
};

void to_json(nlohmann::json& j, const SlnState& s);
void from_json(const nlohmann::json& j, SlnState& s);

inline constexpr double kSlnEpsilon = 1e-8;

/// Updates m <- decay*m + (1-decay)*|loss| and returns loss / (m + eps). A fresh state
/// (steps == 0, magnitude == 0) is seeded with |loss| so the first value is ~1.
double sln(double loss_value, SlnState& state);

/// Tensor form. The update uses the mean absolute value of `loss` (no gradient); the returned
/// tensor keeps `loss`'s shape and gradient path.
torch::Tensor sln(const torch::Tensor& loss, SlnState& state);

}  // namespace unitystyle::gan

#pragma once

#include <nlohmann/json.hpp>

namespace unitystyle::gan {

/// Coefficients of the UnityGAN objective. The four term weights and the two cyclic-mix
/// weights each sum to one.
struct LossWeights {
  double gan = 0.25;
  double feature_matching = 0.1;
  double identity = 0.15;
  double cyclic = 0.5;
  double structural = 0.7;  // weight of L_SS inside the cyclic term
  double l1 = 0.3;          // weight of L_L1 inside the cyclic term

  /// Throws ConfigError unless the simplex constraints hold to 1e-9.
  void validate() const;
};

void to_json(nlohmann::json& j, const LossWeights& w);
void from_json(const nlohmann::json& j, LossWeights& w);

}  // namespace unitystyle::gan

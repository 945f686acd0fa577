#include "unitystyle/gan/loss_weights.hpp"

#include <cmath>

#include "unitystyle/errors.hpp"

namespace unitystyle::gan {

void LossWeights::validate() const {
  for (double v : {gan, feature_matching, identity, cyclic, structural, l1}) {
    if (!(v >= 0.0)) throw ConfigError("loss weights must be non-negative");
  }
  if (std::abs(gan + feature_matching + identity + cyclic - 1.0) > 1e-9) {
    throw ConfigError("loss weights gan + feature_matching + identity + cyclic must sum to 1");
  }
  if (std::abs(structural + l1 - 1.0) > 1e-9) {
    throw ConfigError("cyclic mix weights structural + l1 must sum to 1");
  }
}

void to_json(nlohmann::json& j, const LossWeights& w) {
  j = nlohmann::json{{"gan", w.gan},           {"feature_matching", w.feature_matching},
                     {"identity", w.identity}, {"cyclic", w.cyclic},
                     {"structural", w.structural}, {"l1", w.l1}};
}

void from_json(const nlohmann::json& j, LossWeights& w) {
  LossWeights d;
  w.gan = j.value("gan", d.gan);
  w.feature_matching = j.value("feature_matching", d.feature_matching);
  w.identity = j.value("identity", d.identity);
  w.cyclic = j.value("cyclic", d.cyclic);
  w.structural = j.value("structural", d.structural);
  w.l1 = j.value("l1", d.l1);
}

}  // namespace unitystyle::gan

#include "unitystyle/gan/sln.hpp"

#include <cmath>

#include "unitystyle/errors.hpp"

namespace unitystyle::gan {

SlnState SlnState::frozen_at(double magnitude) {
  SlnState s;
  s.magnitude = magnitude;
  s.frozen = true;
  return s;
}

void to_json(nlohmann::json& j, const SlnState& s) {
  j = nlohmann::json{{"decay", s.decay}, {"magnitude", s.magnitude}, {"steps", s.steps}, {"frozen", s.frozen}};
}

void from_json(const nlohmann::json& j, SlnState& s) {
  s.decay = j.value("decay", 0.99);
  s.magnitude = j.value("magnitude", 0.0);
  s.steps = j.value("steps", int64_t{0});
  s.frozen = j.value("frozen", false);
}

namespace {

void update(double magnitude, SlnState& state) {
  if (state.frozen) return;
  if (!(state.decay > 0.0 && state.decay < 1.0)) throw ConfigError("SLN decay must lie in (0,1)");
  if (state.steps == 0 && state.magnitude == 0.0) {
    state.magnitude = magnitude;
  } else {
    state.magnitude = state.decay * state.magnitude + (1.0 - state.decay) * magnitude;
  }
  ++state.steps;
}

}  // namespace

double sln(double loss_value, SlnState& state) {
  update(std::abs(loss_value), state);
  return loss_value / (state.magnitude + kSlnEpsilon);
}

torch::Tensor sln(const torch::Tensor& loss, SlnState& state) {
  update(loss.detach().abs().mean().item<double>(), state);
  return loss / (state.magnitude + kSlnEpsilon);
}

}  // namespace unitystyle::gan

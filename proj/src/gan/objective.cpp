#include "unitystyle/gan/objective.hpp"

#include "unitystyle/errors.hpp"

namespace unitystyle::gan {

TranslationPass translate(TransferModel& model, const torch::Tensor& x, const torch::Tensor& y, int repeats) {
  auto expand = [repeats](const torch::Tensor& t) { return repeats == 1 ? t : t.repeat_interleave(repeats, 0); };
  TranslationPass pass;
  auto fake_y = model.G->forward(x);
  pass.fake_y = expand(fake_y);
  pass.fake_x = model.F->forward(y);
  pass.reconstructed_x = expand(model.F->forward(fake_y));
  pass.reconstructed_y = model.G->forward(pass.fake_x);
  pass.identity_x = expand(model.F->forward(x));
  auto id = model.G->forward_with_features(y);
  pass.identity_y = id.image;
  pass.first_block_y = id.first_block;
  return pass;
}

UnityGanTerms unitygan_terms(TransferModel& model, const TranslationPass& pass, const torch::Tensor& x,
                             const torch::Tensor& y) {
  UnityGanTerms terms;
  auto dy_fake = model.D_Y->forward_features(pass.fake_y);
  auto dx_fake = model.D_X->forward_features(pass.fake_x);
  auto dy_real = model.D_Y->forward_features(y);
  auto dx_real = model.D_X->forward_features(x);
  terms.gan = generator_adversarial_per_sample(dy_fake.patches) + generator_adversarial_per_sample(dx_fake.patches);
  terms.feature_matching = feature_matching_per_sample(dy_real.features, dy_fake.features) +
                           feature_matching_per_sample(dx_real.features, dx_fake.features);
  terms.identity = mean_l1_per_sample(pass.identity_x, x) + mean_l1_per_sample(pass.identity_y, y);
  terms.cyclic = cyclic_terms_per_sample(x, pass.reconstructed_x, y, pass.reconstructed_y, model.weights.structural,
                                         model.weights.l1)
                     .total;
  return terms;
}

torch::Tensor combine_terms(const UnityGanTerms& terms, const LossWeights& weights, SlnBank& sln_bank) {
  weights.validate();
  return weights.gan * sln(terms.gan, sln_bank.gan) +
         weights.feature_matching * sln(terms.feature_matching, sln_bank.feature_matching) +
         weights.identity * sln(terms.identity, sln_bank.identity) + weights.cyclic * sln(terms.cyclic, sln_bank.cyclic);
}

UnityGanLoss unitygan_loss(TransferModel& model, const torch::Tensor& x, const torch::Tensor& y) {
  model.weights.validate();
  if (x.dim() != 4 || y.dim() != 4 || x.size(0) != y.size(0) || x.size(0) == 0) {
    throw ArgumentError("unitygan_loss expects two non-empty NCHW batches of equal size");
  }
  auto pass = translate(model, x, y);
  UnityGanLoss out;
  out.terms = unitygan_terms(model, pass, x, y);
  out.total = combine_terms(out.terms, model.weights, model.sln).mean();
  return out;
}

torch::Tensor attention_weighted_sum(const torch::Tensor& attention, const torch::Tensor& pair_losses) {
  if (attention.sizes() != pair_losses.sizes()) throw ArgumentError("one attention weight per pair loss expected");
  return (attention * pair_losses).sum();
}

UnityStyleLoss unitystyle_loss_batch(TransferModel& model, const torch::Tensor& x, const torch::Tensor& refs,
                                     int num_cameras) {
  if (!model.G->spec().attention_enabled) {
    throw UnsupportedError("the UnityStyle loss needs a generator with style attention");
  }
  if (num_cameras < 1 || x.dim() != 4 || refs.dim() != 4 || refs.size(0) != x.size(0) * num_cameras) {
    throw ArgumentError("unitystyle loss needs exactly one reference image per camera for every input");
  }
  model.weights.validate();
  const auto batch = x.size(0);
  auto xs = x.repeat_interleave(num_cameras, 0);
  UnityStyleLoss out;
  out.pass = translate(model, x, refs, num_cameras);
  out.terms = unitygan_terms(model, out.pass, xs, refs);
  out.pair_loss = combine_terms(out.terms, model.weights, model.sln);
  out.attention = model.G->attention_from_features(out.pass.first_block_y).weight;
  out.total = (out.attention * out.pair_loss).view({batch, num_cameras}).sum(1).mean();
  return out;
}

UnityStyleLoss unitystyle_loss(TransferModel& model, const torch::Tensor& x, const std::vector<torch::Tensor>& refs) {
  if (refs.empty()) throw ArgumentError("unitystyle loss needs one reference image per camera, got none");
  auto single = x.dim() == 3 ? x.unsqueeze(0) : x;
  if (single.size(0) != 1) throw ArgumentError("unitystyle_loss takes a single input image");
  std::vector<torch::Tensor> batch;
  for (const auto& r : refs) {
    if (!r.defined()) throw ArgumentError("missing camera reference image");
    batch.push_back(r.dim() == 3 ? r : r.squeeze(0));
  }
  return unitystyle_loss_batch(model, single, torch::stack(batch), static_cast<int>(refs.size()));
}

}  // namespace unitystyle::gan

#pragma once

#include <vector>

#include <torch/torch.h>

#include "unitystyle/gan/losses.hpp"
#include "unitystyle/gan/transfer_model.hpp"

namespace unitystyle::gan {

/// Every generator output needed by the objective for one (x, y) batch pair.
struct TranslationPass {
  torch::Tensor fake_y;         // G(x)
  torch::Tensor fake_x;         // F(y)
  torch::Tensor reconstructed_x;  // F(G(x))
  torch::Tensor reconstructed_y;  // G(F(y))
  torch::Tensor identity_x;     // F(x)
  torch::Tensor identity_y;     // G(y)
  torch::Tensor first_block_y;  // G1(y), input of the style attention head
};

/// Runs both generators on a batch pair. When `y` holds `repeats` references per image of `x`,
/// the x-side outputs are computed once per image and repeated to line up with `y`.
TranslationPass translate(TransferModel& model, const torch::Tensor& x, const torch::Tensor& y, int repeats = 1);

/// Raw (un-normalised) per-sample loss terms. `gan` and `feature_matching` already sum the
/// X and Y directions; `cyclic` is the structural/L1 mix.
struct UnityGanTerms {
  torch::Tensor gan;
  torch::Tensor feature_matching;
  torch::Tensor identity;
  torch::Tensor cyclic;
};

UnityGanTerms unitygan_terms(TransferModel& model, const TranslationPass& pass, const torch::Tensor& x,
                             const torch::Tensor& y);

/// lambda_GAN*SLN(L_GAN) + lambda_FM*SLN(L_FM) + lambda_ID*SLN(L_ID) + lambda_CYC*SLN(L_CYC),
/// per sample. Each SLN state is updated once from the batch-mean magnitude of its term.
torch::Tensor combine_terms(const UnityGanTerms& terms, const LossWeights& weights, SlnBank& sln);

struct UnityGanLoss {
  torch::Tensor total;  // scalar
  UnityGanTerms terms;  // per-sample raw terms
};

/// Full UnityGAN objective on a batch of pairs (x_i, y_i), averaged over the batch.
/// Updates the model's SLN states unless they are frozen.
UnityGanLoss unitygan_loss(TransferModel& model, const torch::Tensor& x, const torch::Tensor& y);

/// sum_c weight_c * loss_c.
torch::Tensor attention_weighted_sum(const torch::Tensor& attention, const torch::Tensor& pair_losses);

struct UnityStyleLoss {
  torch::Tensor total;      // scalar
  torch::Tensor attention;  // (C) gate of each camera reference
  torch::Tensor pair_loss;  // (C) L_UnityGAN(x, y^(c))
  UnityGanTerms terms;
  TranslationPass pass;
};

/// sum over cameras c of A(y^(c)) * L_UnityGAN(x, y^(c)) for one image x (CHW or 1xCHW) and one
/// reference per camera. Gates come from the live generator and carry gradients.
/// Throws ArgumentError when no references are given, UnsupportedError without attention.
UnityStyleLoss unitystyle_loss(TransferModel& model, const torch::Tensor& x, const std::vector<torch::Tensor>& refs);

/// Batched form used by the trainer: `x` is B images, `refs` is B*C images ordered
/// x-major (refs[b*C + c]). Returns the mean over b of the per-image camera sums.
UnityStyleLoss unitystyle_loss_batch(TransferModel& model, const torch::Tensor& x, const torch::Tensor& refs,
                                     int num_cameras);

}  // namespace unitystyle::gan

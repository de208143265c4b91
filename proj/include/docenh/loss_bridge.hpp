/*
 * Copyright 2026 The docenh Authors
 */
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "docenh/losses.hpp"

#include <torch/torch.h>

#include <vector>

// Autograd wrappers over the analytic losses: the forward pass evaluates
// the loss in double precision and the backward pass returns the gradient
// computed alongside it.
namespace docenh::ops {

torch::Tensor discriminator_loss(const torch::Tensor& score_real, const torch::Tensor& score_fake);
torch::Tensor generator_adversarial_loss(const torch::Tensor& score_fake,
										 AdversarialForm form = AdversarialForm::NonSaturating);
torch::Tensor pixel_bce(const torch::Tensor& generated, const torch::Tensor& gt);

struct CtcBatch
{
	torch::Tensor loss;		  ///< mean over feasible samples; undefined when none is feasible
	int feasible = 0;
	int skipped = 0;		  ///< samples whose labels need more frames than T
	std::vector<double> per_sample; ///< +infinity for skipped samples
};

/// `log_probs` is (N,T,K); `labels[i]` holds sample i's label indices.
CtcBatch ctc_loss(const torch::Tensor& log_probs, const std::vector<std::vector<int>>& labels, int blank);

} // namespace docenh::ops

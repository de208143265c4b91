/*
 * Copyright 2026 The docenh Authors
 */
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <span>
#include <vector>

namespace docenh {

/// Clamp applied to every argument of a logarithm.
inline constexpr double kLogEpsilon = 1e-7;

/// Weights of the recognizer (CTC) and pixel (BCE) terms in the generator
/// objective: adv + ctc * CTC + bce * BCE.
struct LossWeights
{
	double ctc = 1.0;
	double bce = 10.0;

	void validate() const; ///< throws ConfigError on negative weights
};

/// Generator adversarial term. NonSaturating minimizes -log D(G(x));
/// Saturating minimizes log(1 - D(G(x))) as written in the minimax game.
enum class AdversarialForm { NonSaturating, Saturating };

/// Scalar loss and its gradient with respect to one input array.
struct LossGrad
{
	double value = 0.0;
	std::vector<double> grad;
};

/// mean_i [ -log real_i - log(1 - fake_i) ], arguments clamped to [eps, 1 - eps].
double discriminator_loss(std::span<const double> real, std::span<const double> fake);

struct DiscriminatorLossGrad
{
	double value = 0.0;
	std::vector<double> d_real;
	std::vector<double> d_fake;
};
DiscriminatorLossGrad discriminator_loss_grad(std::span<const double> real, std::span<const double> fake);

double generator_adversarial_loss(std::span<const double> fake, AdversarialForm form = AdversarialForm::NonSaturating);
LossGrad generator_adversarial_loss_grad(std::span<const double> fake,
										 AdversarialForm form = AdversarialForm::NonSaturating);

/// mean over pixels of -[gt log g + (1 - gt) log(1 - g)], g clamped.
double pixel_bce(std::span<const double> generated, std::span<const double> gt);
LossGrad pixel_bce_grad(std::span<const double> generated, std::span<const double> gt);

/// Row-major T x K matrix of per-frame class scores.
struct FrameView
{
	std::span<const double> data;
	int frames = 0;
	int classes = 0;

	double at(int t, int k) const { return data[static_cast<std::size_t>(t) * classes + k]; }
};

struct CtcResult
{
	double loss = 0.0;	  ///< -log P(labels | frames); +infinity when infeasible
	bool feasible = true; ///< false when the labels need more frames than T
	/// d loss / d input, T x K, only filled when requested and feasible.
	std::vector<double> grad;
};

/// Minimum frame count that can emit `labels`: one per label plus one blank
/// between each pair of equal neighbours.
int ctc_min_frames(std::span<const int> labels);

/// CTC negative log-likelihood from log-probabilities, computed with the
/// forward recursion in log space. With `with_grad`, the gradient with
/// respect to each log-probability comes from the forward-backward
/// occupancies.
CtcResult ctc_loss_log(FrameView log_probs, std::span<const int> labels, int blank, bool with_grad = false);

/// Same loss from probabilities; the gradient is with respect to the
/// probabilities themselves.
CtcResult ctc_loss(FrameView probs, std::span<const int> labels, int blank, bool with_grad = false);

/// adv + w.ctc * ctc + w.bce * bce. A zero CTC weight drops the term even
/// when ctc is infinite.
double total_generator_loss(double adv, double ctc, double bce, const LossWeights& w);

} // namespace docenh

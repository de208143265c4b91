/*
 * Copyright 2026 The docenh Authors
 */
// SPDX-License-Identifier: Apache-2.0

#include "docenh/losses.hpp"

#include "docenh/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace docenh {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double clamp_prob(double p)
{
	return std::clamp(p, kLogEpsilon, 1.0 - kLogEpsilon);
}

// d/dp of -log(clamp(p)); zero where the clamp is active.
double neg_log_grad(double p)
{
	return (p < kLogEpsilon || p > 1.0 - kLogEpsilon) ? 0.0 : -1.0 / p;
}

double log_add(double a, double b)
{
	if (a == kNegInf)
		return b;
	if (b == kNegInf)
		return a;
	const double m = std::max(a, b);
	return m + std::log1p(std::exp(-std::abs(a - b)));
}

void require_same_size(std::size_t a, std::size_t b, const char* what)
{
	if (a != b)
		throw ContractError(std::string(what) + ": input sizes differ");
	if (a == 0)
		throw ContractError(std::string(what) + ": empty input");
}

} // namespace

void LossWeights::validate() const
{
	if (!(ctc >= 0.0) || !(bce >= 0.0))
		throw ConfigError("loss weights must be non-negative");
}

double discriminator_loss(std::span<const double> real, std::span<const double> fake)
{
	require_same_size(real.size(), fake.size(), "discriminator_loss");
	double sum = 0.0;
	for (std::size_t i = 0; i < real.size(); ++i)
		sum += -std::log(clamp_prob(real[i])) - std::log(1.0 - clamp_prob(fake[i]));
	return sum / static_cast<double>(real.size());
}

DiscriminatorLossGrad discriminator_loss_grad(std::span<const double> real, std::span<const double> fake)
{
	DiscriminatorLossGrad out;
	out.value = discriminator_loss(real, fake);
	const double n = static_cast<double>(real.size());
	out.d_real.resize(real.size());
	out.d_fake.resize(fake.size());
	for (std::size_t i = 0; i < real.size(); ++i) {
		out.d_real[i] = neg_log_grad(real[i]) / n;
		// d/df of -log(1 - f) = 1 / (1 - f)
		out.d_fake[i] = -neg_log_grad(1.0 - fake[i]) / n;
	}
	return out;
}

double generator_adversarial_loss(std::span<const double> fake, AdversarialForm form)
{
	if (fake.empty())
		throw ContractError("generator_adversarial_loss: empty input");
	double sum = 0.0;
	for (double f : fake)
		sum += form == AdversarialForm::NonSaturating ? -std::log(clamp_prob(f)) : std::log(1.0 - clamp_prob(f));
	return sum / static_cast<double>(fake.size());
}

LossGrad generator_adversarial_loss_grad(std::span<const double> fake, AdversarialForm form)
{
	LossGrad out;
	out.value = generator_adversarial_loss(fake, form);
	const double n = static_cast<double>(fake.size());
	out.grad.resize(fake.size());
	for (std::size_t i = 0; i < fake.size(); ++i)
		out.grad[i] = (form == AdversarialForm::NonSaturating ? neg_log_grad(fake[i]) : neg_log_grad(1.0 - fake[i])) / n;
	return out;
}

double pixel_bce(std::span<const double> generated, std::span<const double> gt)
{
	require_same_size(generated.size(), gt.size(), "pixel_bce");
	double sum = 0.0;
	for (std::size_t i = 0; i < gt.size(); ++i) {
		const double g = clamp_prob(generated[i]);
		sum += -(gt[i] * std::log(g) + (1.0 - gt[i]) * std::log(1.0 - g));
	}
	return sum / static_cast<double>(gt.size());
}

LossGrad pixel_bce_grad(std::span<const double> generated, std::span<const double> gt)
{
	LossGrad out;
	out.value = pixel_bce(generated, gt);
	const double n = static_cast<double>(gt.size());
	out.grad.resize(gt.size());
	for (std::size_t i = 0; i < gt.size(); ++i) {
		const double g = generated[i];
		if (g < kLogEpsilon || g > 1.0 - kLogEpsilon) {
			out.grad[i] = 0.0;
			continue;
		}
		out.grad[i] = (-gt[i] / g + (1.0 - gt[i]) / (1.0 - g)) / n;
	}
	return out;
}

int ctc_min_frames(std::span<const int> labels)
{
	int needed = static_cast<int>(labels.size());
	for (std::size_t i = 1; i < labels.size(); ++i)
		if (labels[i] == labels[i - 1])
			++needed;
	return needed;
}

CtcResult ctc_loss_log(FrameView lp, std::span<const int> labels, int blank, bool with_grad)
{
	const int T = lp.frames;
	const int K = lp.classes;
	if (T < 1 || K < 2 || lp.data.size() != static_cast<std::size_t>(T) * K)
		throw ContractError("ctc_loss: malformed frame matrix");
	if (blank < 0 || blank >= K)
		throw ContractError("ctc_loss: blank index out of range");
	for (int l : labels)
		if (l < 0 || l >= K || l == blank)
			throw ContractError("ctc_loss: label index out of range or equal to blank");

	CtcResult result;
	if (ctc_min_frames(labels) > T) {
		result.feasible = false;
		result.loss = std::numeric_limits<double>::infinity();
		return result;
	}

	// Expanded sequence: blank, l1, blank, l2, ..., blank.
	const int S = 2 * static_cast<int>(labels.size()) + 1;
	std::vector<int> ext(S, blank);
	for (std::size_t i = 0; i < labels.size(); ++i)
		ext[2 * i + 1] = labels[i];
	auto can_skip = [&](int s) { return s >= 2 && ext[s] != blank && ext[s] != ext[s - 2]; };

	std::vector<double> alpha(static_cast<std::size_t>(T) * S, kNegInf);
	auto A = [&](int t, int s) -> double& { return alpha[static_cast<std::size_t>(t) * S + s]; };

	A(0, 0) = lp.at(0, ext[0]);
	if (S > 1)
		A(0, 1) = lp.at(0, ext[1]);
	for (int t = 1; t < T; ++t) {
		for (int s = 0; s < S; ++s) {
			double acc = A(t - 1, s);
			if (s >= 1)
				acc = log_add(acc, A(t - 1, s - 1));
			if (can_skip(s))
				acc = log_add(acc, A(t - 1, s - 2));
			A(t, s) = acc == kNegInf ? kNegInf : acc + lp.at(t, ext[s]);
		}
	}

	double log_p = A(T - 1, S - 1);
	if (S > 1)
		log_p = log_add(log_p, A(T - 1, S - 2));
	result.loss = -log_p;
	if (!with_grad)
		return result;

	if (log_p == kNegInf) {
		// Zero-probability alignment set: no usable gradient direction.
		result.grad.assign(static_cast<std::size_t>(T) * K, 0.0);
		return result;
	}

	std::vector<double> beta(static_cast<std::size_t>(T) * S, kNegInf);
	auto B = [&](int t, int s) -> double& { return beta[static_cast<std::size_t>(t) * S + s]; };
	auto can_skip_forward = [&](int s) { return s + 2 < S && ext[s] != blank && ext[s + 2] != ext[s]; };

	B(T - 1, S - 1) = lp.at(T - 1, ext[S - 1]);
	if (S > 1)
		B(T - 1, S - 2) = lp.at(T - 1, ext[S - 2]);
	for (int t = T - 2; t >= 0; --t) {
		for (int s = 0; s < S; ++s) {
			double acc = B(t + 1, s);
			if (s + 1 < S)
				acc = log_add(acc, B(t + 1, s + 1));
			if (can_skip_forward(s))
				acc = log_add(acc, B(t + 1, s + 2));
			B(t, s) = acc == kNegInf ? kNegInf : acc + lp.at(t, ext[s]);
		}
	}

	// d(-log P)/d log y_t(k) = -(1/P) * sum_{s: ext[s]=k} alpha_t(s) beta_t(s) / y_t(k)
	result.grad.assign(static_cast<std::size_t>(T) * K, 0.0);
	std::vector<double> occupancy(K);
	for (int t = 0; t < T; ++t) {
		std::fill(occupancy.begin(), occupancy.end(), kNegInf);
		for (int s = 0; s < S; ++s) {
			const double a = A(t, s);
			const double b = B(t, s);
			if (a != kNegInf && b != kNegInf)
				occupancy[ext[s]] = log_add(occupancy[ext[s]], a + b);
		}
		for (int k = 0; k < K; ++k) {
			const double y = lp.at(t, k);
			if (occupancy[k] == kNegInf || y == kNegInf)
				continue;
			result.grad[static_cast<std::size_t>(t) * K + k] = -std::exp(occupancy[k] - y - log_p);
		}
	}
	return result;
}

CtcResult ctc_loss(FrameView probs, std::span<const int> labels, int blank, bool with_grad)
{
	std::vector<double> logs(probs.data.size());
	for (std::size_t i = 0; i < logs.size(); ++i) {
		if (probs.data[i] < 0.0)
			throw ContractError("ctc_loss: negative probability");
		logs[i] = probs.data[i] > 0.0 ? std::log(probs.data[i]) : kNegInf;
	}
	auto result = ctc_loss_log({logs, probs.frames, probs.classes}, labels, blank, with_grad);
	for (std::size_t i = 0; i < result.grad.size(); ++i)
		result.grad[i] = probs.data[i] > 0.0 ? result.grad[i] / probs.data[i] : 0.0;
	return result;
}

double total_generator_loss(double adv, double ctc, double bce, const LossWeights& w)
{
	double total = adv + w.bce * bce;
	if (w.ctc != 0.0)
		total += w.ctc * ctc;
	return total;
}

} // namespace docenh

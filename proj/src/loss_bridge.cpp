/*
 * Copyright 2026 The docenh Authors
 */
// SPDX-License-Identifier: Apache-2.0

#include "docenh/loss_bridge.hpp"

#include "docenh/errors.hpp"

#include <limits>

namespace docenh::ops {

using torch::Tensor;
using torch::autograd::AutogradContext;
using torch::autograd::tensor_list;

namespace {

struct OneInput : torch::autograd::Function<OneInput>
{
	static Tensor forward(AutogradContext* ctx, const Tensor& input, double value, const Tensor& grad)
	{
		ctx->save_for_backward({grad});
		return torch::tensor(value, input.options());
	}

	static tensor_list backward(AutogradContext* ctx, tensor_list out_grad)
	{
		const auto grad = ctx->get_saved_variables()[0];
		return {grad * out_grad[0], Tensor(), Tensor()};
	}
};

struct TwoInputs : torch::autograd::Function<TwoInputs>
{
	static Tensor forward(AutogradContext* ctx, const Tensor& a, const Tensor& b, double value, const Tensor& grad_a,
						  const Tensor& grad_b)
	{
		(void)b;
		ctx->save_for_backward({grad_a, grad_b});
		return torch::tensor(value, a.options());
	}

	static tensor_list backward(AutogradContext* ctx, tensor_list out_grad)
	{
		const auto saved = ctx->get_saved_variables();
		return {saved[0] * out_grad[0], saved[1] * out_grad[0], Tensor(), Tensor(), Tensor()};
	}
};

Tensor as_double(const Tensor& t)
{
	return t.detach().to(torch::kCPU, torch::kFloat64).contiguous();
}

std::span<const double> view(const Tensor& t)
{
	return {t.data_ptr<double>(), static_cast<std::size_t>(t.numel())};
}

Tensor like(const std::vector<double>& values, const Tensor& shape_of)
{
	return torch::from_blob(const_cast<double*>(values.data()), shape_of.sizes(), torch::kFloat64)
		.clone()
		.to(shape_of.scalar_type())
		.to(shape_of.device());
}

} // namespace

Tensor discriminator_loss(const Tensor& score_real, const Tensor& score_fake)
{
	if (!score_real.sizes().equals(score_fake.sizes()))
		throw ContractError("discriminator_loss: score maps differ in shape");
	const auto r = as_double(score_real), f = as_double(score_fake);
	const auto g = docenh::discriminator_loss_grad(view(r), view(f));
	return TwoInputs::apply(score_real, score_fake, g.value, like(g.d_real, score_real), like(g.d_fake, score_fake));
}

Tensor generator_adversarial_loss(const Tensor& score_fake, AdversarialForm form)
{
	const auto f = as_double(score_fake);
	const auto g = docenh::generator_adversarial_loss_grad(view(f), form);
	return OneInput::apply(score_fake, g.value, like(g.grad, score_fake));
}

Tensor pixel_bce(const Tensor& generated, const Tensor& gt)
{
	if (!generated.sizes().equals(gt.sizes()))
		throw ContractError("pixel_bce: generated and gt differ in shape");
	const auto x = as_double(generated), y = as_double(gt);
	const auto g = docenh::pixel_bce_grad(view(x), view(y));
	return OneInput::apply(generated, g.value, like(g.grad, generated));
}

CtcBatch ctc_loss(const Tensor& log_probs, const std::vector<std::vector<int>>& labels, int blank)
{
	if (log_probs.dim() != 3 || log_probs.size(0) != static_cast<long>(labels.size()))
		throw ContractError("ctc_loss: expected (N,T,K) log-probabilities and N label sequences");
	const auto lp = as_double(log_probs);
	const int n = static_cast<int>(lp.size(0)), T = static_cast<int>(lp.size(1)), K = static_cast<int>(lp.size(2));
	const std::size_t per = static_cast<std::size_t>(T) * K;
	const double* base = lp.data_ptr<double>();

	CtcBatch out;
	std::vector<double> grad(per * n, 0.0);
	double total = 0.0;
	for (int i = 0; i < n; ++i) {
		const FrameView frames{{base + per * i, per}, T, K};
		auto r = docenh::ctc_loss_log(frames, labels[i], blank, true);
		out.per_sample.push_back(r.loss);
		if (!r.feasible) {
			++out.skipped;
			continue;
		}
		++out.feasible;
		total += r.loss;
		std::copy(r.grad.begin(), r.grad.end(), grad.begin() + static_cast<std::ptrdiff_t>(per * i));
	}
	if (out.feasible == 0)
		return out;
	for (auto& g : grad)
		g /= out.feasible;
	out.loss = OneInput::apply(log_probs, total / out.feasible, like(grad, log_probs));
	return out;
}

} // namespace docenh::ops

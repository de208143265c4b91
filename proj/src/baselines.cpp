/*
 * Copyright 2026 The docenh Authors
 */
// SPDX-License-Identifier: Apache-2.0

#include "docenh/baselines.hpp"

#include "docenh/errors.hpp"
#include "docenh/png_io.hpp"

#include <cmath>
#include <vector>

namespace docenh {

std::array<std::uint64_t, 256> byte_histogram(const LineImage& img)
{
	std::array<std::uint64_t, 256> hist{};
	for (float v : img.values())
		++hist[to_byte(v)];
	return hist;
}

int otsu_threshold(const std::array<std::uint64_t, 256>& hist)
{
	double total = 0.0, weighted = 0.0;
	for (int i = 0; i < 256; ++i) {
		total += static_cast<double>(hist[i]);
		weighted += i * static_cast<double>(hist[i]);
	}
	if (total == 0.0)
		return -1;

	int best = -1;
	double best_var = 0.0;
	double w0 = 0.0, sum0 = 0.0;
	for (int t = 0; t < 255; ++t) {
		w0 += static_cast<double>(hist[t]);
		sum0 += t * static_cast<double>(hist[t]);
		const double w1 = total - w0;
		if (w0 == 0.0 || w1 == 0.0)
			continue;
		const double mu0 = sum0 / w0;
		const double mu1 = (weighted - sum0) / w1;
		const double var = (w0 / total) * (w1 / total) * (mu0 - mu1) * (mu0 - mu1);
		if (var > best_var) {
			best_var = var;
			best = t;
		}
	}
	return best;
}

BinaryImage otsu_binarize(const LineImage& img)
{
	if (img.empty())
		throw ContractError("otsu_binarize: empty image");
	const int t = otsu_threshold(byte_histogram(img));
	std::vector<std::uint8_t> out(img.size(), 1);
	if (t >= 0) {
		const auto v = img.values();
		for (std::size_t i = 0; i < v.size(); ++i)
			out[i] = to_byte(v[i]) <= t ? 0 : 1;
	}
	return BinaryImage(img.height(), img.width(), std::move(out));
}

BinaryImage sauvola_binarize(const LineImage& img, int window, double k)
{
	if (img.empty())
		throw ContractError("sauvola_binarize: empty image");
	if (window < 3 || window % 2 == 0)
		throw ContractError("sauvola_binarize: window must be odd and >= 3");
	if (!(k > 0.0 && k < 1.0))
		throw ContractError("sauvola_binarize: k must lie in (0, 1)");

	const int h = img.height();
	const int w = img.width();
	const std::size_t stride = static_cast<std::size_t>(w) + 1;
	std::vector<double> sum((h + 1) * stride, 0.0), sq((h + 1) * stride, 0.0);
	for (int r = 0; r < h; ++r)
		for (int c = 0; c < w; ++c) {
			const double v = img.at(r, c);
			const std::size_t i = (r + 1) * stride + (c + 1);
			sum[i] = v + sum[i - 1] + sum[i - stride] - sum[i - stride - 1];
			sq[i] = v * v + sq[i - 1] + sq[i - stride] - sq[i - stride - 1];
		}
	auto box = [&](const std::vector<double>& s, int r0, int c0, int r1, int c1) {
		return s[r1 * stride + c1] - s[r0 * stride + c1] - s[r1 * stride + c0] + s[r0 * stride + c0];
	};

	const int half = window / 2;
	std::vector<std::uint8_t> out(img.size());
	for (int r = 0; r < h; ++r) {
		const int r0 = std::max(0, r - half), r1 = std::min(h, r + half + 1);
		for (int c = 0; c < w; ++c) {
			const int c0 = std::max(0, c - half), c1 = std::min(w, c + half + 1);
			const double n = static_cast<double>((r1 - r0) * (c1 - c0));
			const double mean = box(sum, r0, c0, r1, c1) / n;
			const double var = std::max(0.0, box(sq, r0, c0, r1, c1) / n - mean * mean);
			const double t = mean * (1.0 + k * (std::sqrt(var) / kSauvolaRange - 1.0));
			out[static_cast<std::size_t>(r) * w + c] = img.at(r, c) < t ? 0 : 1;
		}
	}
	return BinaryImage(h, w, std::move(out));
}

} // namespace docenh

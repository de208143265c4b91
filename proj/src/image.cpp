/*
 * Copyright 2026 The docenh Authors
 */
// SPDX-License-Identifier: Apache-2.0

#include "docenh/image.hpp"

#include "docenh/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace docenh {

namespace {

void check_dims(int height, int width)
{
	if (height < 1 || width < 1)
		throw ContractError("image dimensions must be positive, got " + std::to_string(height) + "x" +
							std::to_string(width));
}

} // namespace

LineImage::LineImage(int height, int width, float fill) : height_(height), width_(width)
{
	check_dims(height, width);
	if (!(fill >= 0.0f && fill <= 1.0f))
		throw ContractError("fill intensity outside [0, 1]");
	values_.assign(static_cast<std::size_t>(height) * width, fill);
}

LineImage::LineImage(int height, int width, std::vector<float> values)
	: height_(height), width_(width), values_(std::move(values))
{
	check_dims(height, width);
	if (values_.size() != static_cast<std::size_t>(height) * width)
		throw ContractError("value count does not match image dimensions");
	for (float v : values_)
		if (!(v >= 0.0f && v <= 1.0f))
			throw ContractError("intensity outside [0, 1]: " + std::to_string(v));
}

void LineImage::set(int row, int col, float value)
{
	values_[index(row, col)] = std::clamp(value, 0.0f, 1.0f);
}

BinaryImage::BinaryImage(int height, int width, std::uint8_t fill) : height_(height), width_(width)
{
	check_dims(height, width);
	values_.assign(static_cast<std::size_t>(height) * width, fill ? 1 : 0);
}

BinaryImage::BinaryImage(int height, int width, std::vector<std::uint8_t> values)
	: height_(height), width_(width), values_(std::move(values))
{
	check_dims(height, width);
	if (values_.size() != static_cast<std::size_t>(height) * width)
		throw ContractError("value count does not match image dimensions");
	for (auto v : values_)
		if (v > 1)
			throw ContractError("binary image values must be 0 or 1");
}

std::size_t BinaryImage::ink_count() const noexcept
{
	return static_cast<std::size_t>(std::count(values_.begin(), values_.end(), std::uint8_t{0}));
}

LineImage resize_bilinear(const LineImage& img, int height, int width)
{
	check_dims(height, width);
	if (height == img.height() && width == img.width())
		return img;

	const double sy = static_cast<double>(img.height()) / height;
	const double sx = static_cast<double>(img.width()) / width;

	// Precompute horizontal taps once per column.
	std::vector<int> x0(width), x1(width);
	std::vector<float> fx(width);
	for (int c = 0; c < width; ++c) {
		double x = (c + 0.5) * sx - 0.5;
		x = std::clamp(x, 0.0, static_cast<double>(img.width() - 1));
		x0[c] = static_cast<int>(std::floor(x));
		x1[c] = std::min(x0[c] + 1, img.width() - 1);
		fx[c] = static_cast<float>(x - x0[c]);
	}

	std::vector<float> out(static_cast<std::size_t>(height) * width);
	for (int r = 0; r < height; ++r) {
		double y = (r + 0.5) * sy - 0.5;
		y = std::clamp(y, 0.0, static_cast<double>(img.height() - 1));
		const int y0 = static_cast<int>(std::floor(y));
		const int y1 = std::min(y0 + 1, img.height() - 1);
		const float fy = static_cast<float>(y - y0);
		const auto top = img.row(y0);
		const auto bottom = img.row(y1);
		for (int c = 0; c < width; ++c) {
			const float t = top[x0[c]] + (top[x1[c]] - top[x0[c]]) * fx[c];
			const float b = bottom[x0[c]] + (bottom[x1[c]] - bottom[x0[c]]) * fx[c];
			out[static_cast<std::size_t>(r) * width + c] = std::clamp(t + (b - t) * fy, 0.0f, 1.0f);
		}
	}
	return LineImage(height, width, std::move(out));
}

LineImage normalize_to_model_size(const LineImage& img, int target_h, int target_w)
{
	if (img.empty())
		throw ContractError("cannot normalize an empty image");
	check_dims(target_h, target_w);
	if (img.height() == target_h && img.width() == target_w)
		return img;

	const double scale = std::min(static_cast<double>(target_h) / img.height(),
								  static_cast<double>(target_w) / img.width());
	const int h = std::clamp(static_cast<int>(std::lround(img.height() * scale)), 1, target_h);
	const int w = std::clamp(static_cast<int>(std::lround(img.width() * scale)), 1, target_w);

	LineImage out(target_h, target_w, kWhite);
	paste(out, resize_bilinear(img, h, w), 0, 0);
	return out;
}

LineImage flip_vertical(const LineImage& img)
{
	std::vector<float> out;
	out.reserve(img.size());
	for (int r = img.height() - 1; r >= 0; --r) {
		const auto row = img.row(r);
		out.insert(out.end(), row.begin(), row.end());
	}
	return LineImage(img.height(), img.width(), std::move(out));
}

BinaryImage flip_vertical(const BinaryImage& img)
{
	BinaryImage out(img.height(), img.width());
	for (int r = 0; r < img.height(); ++r)
		for (int c = 0; c < img.width(); ++c)
			out.set(r, c, img.at(img.height() - 1 - r, c));
	return out;
}

BinaryImage threshold(const LineImage& img, float t)
{
	if (!(t >= 0.0f && t <= 1.0f))
		throw ContractError("threshold must lie in [0, 1]");
	std::vector<std::uint8_t> out(img.size());
	const auto v = img.values();
	for (std::size_t i = 0; i < v.size(); ++i)
		out[i] = v[i] < t ? 0 : 1;
	return BinaryImage(img.height(), img.width(), std::move(out));
}

LineImage to_line_image(const BinaryImage& img)
{
	std::vector<float> out(img.size());
	const auto v = img.values();
	for (std::size_t i = 0; i < v.size(); ++i)
		out[i] = v[i] ? 1.0f : 0.0f;
	return LineImage(img.height(), img.width(), std::move(out));
}

LineImage crop(const LineImage& img, int row, int col, int height, int width)
{
	LineImage out(height, width, kWhite);
	for (int r = 0; r < height; ++r) {
		const int sr = row + r;
		if (sr < 0 || sr >= img.height())
			continue;
		for (int c = 0; c < width; ++c) {
			const int sc = col + c;
			if (sc >= 0 && sc < img.width())
				out.set(r, c, img.at(sr, sc));
		}
	}
	return out;
}

void paste(LineImage& dst, const LineImage& patch, int row, int col)
{
	for (int r = 0; r < patch.height(); ++r) {
		const int dr = row + r;
		if (dr < 0 || dr >= dst.height())
			continue;
		for (int c = 0; c < patch.width(); ++c) {
			const int dc = col + c;
			if (dc >= 0 && dc < dst.width())
				dst.set(dr, dc, patch.at(r, c));
		}
	}
}

} // namespace docenh

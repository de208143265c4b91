/*
 * Copyright 2026 The docenh Authors
 */
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace docenh {

/// Canonical model input size for line images and page patches.
inline constexpr int kModelHeight = 128;
inline constexpr int kModelWidth = 1024;

inline constexpr float kWhite = 1.0f;
inline constexpr float kInk = 0.0f;

/// Single-channel intensity image, row-major, values in [0, 1] where
/// 1.0 is white background and 0.0 is black ink.
class LineImage
{
public:
	LineImage() = default;

	/// Filled with `fill`. Throws ContractError on empty dimensions or a
	/// fill outside [0, 1].
	LineImage(int height, int width, float fill = kWhite);

	/// Takes ownership of row-major `values`; validates size and range.
	LineImage(int height, int width, std::vector<float> values);

	int height() const noexcept { return height_; }
	int width() const noexcept { return width_; }
	std::size_t size() const noexcept { return values_.size(); }
	bool empty() const noexcept { return values_.empty(); }

	float at(int row, int col) const { return values_[index(row, col)]; }

	/// Stores `value` clamped into [0, 1].
	void set(int row, int col, float value);

	std::span<const float> values() const noexcept { return values_; }
	std::span<const float> row(int r) const
	{
		return std::span<const float>(values_).subspan(static_cast<std::size_t>(r) * width_, width_);
	}

	friend bool operator==(const LineImage&, const LineImage&) = default;

private:
	std::size_t index(int row, int col) const noexcept
	{
		return static_cast<std::size_t>(row) * static_cast<std::size_t>(width_) + static_cast<std::size_t>(col);
	}

	int height_ = 0;
	int width_ = 0;
	std::vector<float> values_;
};

/// Two-level image: 0 = foreground (ink), 1 = background.
class BinaryImage
{
public:
	BinaryImage() = default;
	BinaryImage(int height, int width, std::uint8_t fill = 1);
	BinaryImage(int height, int width, std::vector<std::uint8_t> values);

	int height() const noexcept { return height_; }
	int width() const noexcept { return width_; }
	std::size_t size() const noexcept { return values_.size(); }

	std::uint8_t at(int row, int col) const { return values_[index(row, col)]; }
	void set(int row, int col, std::uint8_t value) { values_[index(row, col)] = value ? 1 : 0; }
	bool is_ink(int row, int col) const { return at(row, col) == 0; }

	std::span<const std::uint8_t> values() const noexcept { return values_; }
	std::size_t ink_count() const noexcept;

	friend bool operator==(const BinaryImage&, const BinaryImage&) = default;

private:
	std::size_t index(int row, int col) const noexcept
	{
		return static_cast<std::size_t>(row) * static_cast<std::size_t>(width_) + static_cast<std::size_t>(col);
	}

	int height_ = 0;
	int width_ = 0;
	std::vector<std::uint8_t> values_;
};

/// Aspect-preserving fit into target_h x target_w: the image is scaled by
/// min(target_h / h, target_w / w) with bilinear interpolation, placed at
/// the top-left corner and padded with white on the right and bottom.
LineImage normalize_to_model_size(const LineImage& img, int target_h = kModelHeight, int target_w = kModelWidth);

/// Bilinear resize (pixel-centre aligned) to exactly height x width.
LineImage resize_bilinear(const LineImage& img, int height, int width);

/// Row r of the output is row (height - 1 - r) of the input.
LineImage flip_vertical(const LineImage& img);
BinaryImage flip_vertical(const BinaryImage& img);

/// 0 where value < t, else 1.
BinaryImage threshold(const LineImage& img, float t);

/// Binary image as intensities (0 -> 0.0, 1 -> 1.0).
LineImage to_line_image(const BinaryImage& img);

/// Copy of the rectangle [row, row + height) x [col, col + width); areas
/// outside the source are filled with white.
LineImage crop(const LineImage& img, int row, int col, int height, int width);

/// Writes `patch` into `dst` with its top-left at (row, col), clipping to dst.
void paste(LineImage& dst, const LineImage& patch, int row, int col);

} // namespace docenh

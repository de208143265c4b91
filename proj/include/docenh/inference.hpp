/*
 * Copyright 2026 The docenh Authors
 */
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "docenh/image.hpp"

#include <functional>
#include <vector>

namespace docenh {

/// Row-major layout of model-sized patches over a white-padded page.
struct PatchGrid
{
	int page_h = 0, page_w = 0;
	int patch_h = kModelHeight, patch_w = kModelWidth;
	int stride_h = kModelHeight, stride_w = kModelWidth; ///< equal to the patch size unless overlapping
	int rows = 0, cols = 0;
	int pad_bottom = 0, pad_right = 0;

	int count() const noexcept { return rows * cols; }
	int padded_h() const noexcept { return page_h + pad_bottom; }
	int padded_w() const noexcept { return page_w + pad_right; }
	int row_origin(int patch_row) const noexcept { return patch_row * stride_h; }
	int col_origin(int patch_col) const noexcept { return patch_col * stride_w; }
};

/// Non-overlapping grid by default; `overlap` uses half-patch strides.
PatchGrid make_grid(int page_h, int page_w, bool overlap = false, int patch_h = kModelHeight,
					int patch_w = kModelWidth);

/// Pads the page with white and cuts it into grid.count() patches, row-major.
std::vector<LineImage> tile_page(const LineImage& page, const PatchGrid& grid);

/// Inverse of tile_page: overlapping areas are averaged, padding cropped.
LineImage stitch(const PatchGrid& grid, const std::vector<LineImage>& patches);

/// Pixel is ink only when ink in both inputs.
BinaryImage flip_vote(const BinaryImage& a, const BinaryImage& b);

/// Maps a batch of model-sized patches to enhanced patches of the same size.
using PatchEnhancer = std::function<std::vector<LineImage>(const std::vector<LineImage>&)>;

struct EnhanceOptions
{
	bool flip_vote = true;
	float threshold = 0.5f;
	bool overlap = false;
	int patch_h = kModelHeight;
	int patch_w = kModelWidth;
};

/// Enhances each patch as-is and (optionally) upside down, thresholds both
/// stitched results and fuses them with flip_vote. Output has the page size.
BinaryImage enhance_page(const PatchEnhancer& enhancer, const LineImage& page, const EnhanceOptions& options = {});

/// Grayscale stitched generator output without thresholding (single pass).
LineImage enhance_page_gray(const PatchEnhancer& enhancer, const LineImage& page, const EnhanceOptions& options = {});

/// Two images side by side with a 4 px grey gutter, for visual inspection.
LineImage side_by_side(const LineImage& left, const LineImage& right);

} // namespace docenh

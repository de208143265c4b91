/*
 * Copyright 2026 The docenh Authors
 */
// SPDX-License-Identifier: Apache-2.0

#include "docenh/inference.hpp"

#include "docenh/errors.hpp"

#include <algorithm>

namespace docenh {

namespace {

int tiles_along(int extent, int patch, int stride)
{
	if (extent <= patch)
		return 1;
	return (extent - patch + stride - 1) / stride + 1;
}

} // namespace

PatchGrid make_grid(int page_h, int page_w, bool overlap, int patch_h, int patch_w)
{
	if (page_h < 1 || page_w < 1)
		throw ContractError("make_grid: empty page");
	if (patch_h < 2 || patch_w < 2)
		throw ContractError("make_grid: patch too small");
	PatchGrid g;
	g.page_h = page_h;
	g.page_w = page_w;
	g.patch_h = patch_h;
	g.patch_w = patch_w;
	g.stride_h = overlap ? patch_h / 2 : patch_h;
	g.stride_w = overlap ? patch_w / 2 : patch_w;
	g.rows = tiles_along(page_h, patch_h, g.stride_h);
	g.cols = tiles_along(page_w, patch_w, g.stride_w);
	g.pad_bottom = (g.rows - 1) * g.stride_h + patch_h - page_h;
	g.pad_right = (g.cols - 1) * g.stride_w + patch_w - page_w;
	return g;
}

std::vector<LineImage> tile_page(const LineImage& page, const PatchGrid& grid)
{
	if (page.height() != grid.page_h || page.width() != grid.page_w)
		throw ContractError("tile_page: grid was built for a different page size");
	std::vector<LineImage> patches;
	patches.reserve(static_cast<std::size_t>(grid.count()));
	for (int r = 0; r < grid.rows; ++r)
		for (int c = 0; c < grid.cols; ++c)
			patches.push_back(crop(page, grid.row_origin(r), grid.col_origin(c), grid.patch_h, grid.patch_w));
	return patches;
}

LineImage stitch(const PatchGrid& grid, const std::vector<LineImage>& patches)
{
	if (patches.size() != static_cast<std::size_t>(grid.count()))
		throw ContractError("stitch: patch count does not match the grid");

	const int h = grid.page_h;
	const int w = grid.page_w;
	std::vector<double> sum(static_cast<std::size_t>(h) * w, 0.0);
	std::vector<int> hits(sum.size(), 0);
	for (int r = 0; r < grid.rows; ++r)
		for (int c = 0; c < grid.cols; ++c) {
			const auto& p = patches[static_cast<std::size_t>(r) * grid.cols + c];
			if (p.height() != grid.patch_h || p.width() != grid.patch_w)
				throw ContractError("stitch: patch has the wrong size");
			const int r0 = grid.row_origin(r), c0 = grid.col_origin(c);
			for (int y = 0; y < grid.patch_h && r0 + y < h; ++y)
				for (int x = 0; x < grid.patch_w && c0 + x < w; ++x) {
					const std::size_t i = static_cast<std::size_t>(r0 + y) * w + (c0 + x);
					sum[i] += p.at(y, x);
					++hits[i];
				}
		}

	std::vector<float> out(sum.size());
	for (std::size_t i = 0; i < sum.size(); ++i)
		out[i] = hits[i] == 1 ? static_cast<float>(sum[i]) : static_cast<float>(sum[i] / hits[i]);
	return LineImage(h, w, std::move(out));
}

BinaryImage flip_vote(const BinaryImage& a, const BinaryImage& b)
{
	if (a.height() != b.height() || a.width() != b.width())
		throw ContractError("flip_vote: image dimensions differ");
	std::vector<std::uint8_t> out(a.size());
	const auto va = a.values();
	const auto vb = b.values();
	for (std::size_t i = 0; i < out.size(); ++i)
		out[i] = (va[i] == 0 && vb[i] == 0) ? 0 : 1;
	return BinaryImage(a.height(), a.width(), std::move(out));
}

namespace {

std::vector<LineImage> run_enhancer(const PatchEnhancer& enhancer, const std::vector<LineImage>& patches,
									const PatchGrid& grid)
{
	auto out = enhancer(patches);
	if (out.size() != patches.size())
		throw ContractError("enhancer returned a different number of patches");
	for (const auto& p : out)
		if (p.height() != grid.patch_h || p.width() != grid.patch_w)
			throw ContractError("enhancer changed the patch size");
	return out;
}

} // namespace

LineImage enhance_page_gray(const PatchEnhancer& enhancer, const LineImage& page, const EnhanceOptions& options)
{
	const auto grid = make_grid(page.height(), page.width(), options.overlap, options.patch_h, options.patch_w);
	return stitch(grid, run_enhancer(enhancer, tile_page(page, grid), grid));
}

BinaryImage enhance_page(const PatchEnhancer& enhancer, const LineImage& page, const EnhanceOptions& options)
{
	const auto grid = make_grid(page.height(), page.width(), options.overlap, options.patch_h, options.patch_w);
	const auto patches = tile_page(page, grid);

	const BinaryImage normal = threshold(stitch(grid, run_enhancer(enhancer, patches, grid)), options.threshold);
	if (!options.flip_vote)
		return normal;

	std::vector<LineImage> flipped;
	flipped.reserve(patches.size());
	for (const auto& p : patches)
		flipped.push_back(flip_vertical(p));
	auto restored = run_enhancer(enhancer, flipped, grid);
	for (auto& p : restored)
		p = flip_vertical(p);
	const BinaryImage from_flipped = threshold(stitch(grid, restored), options.threshold);
	return flip_vote(normal, from_flipped);
}

LineImage side_by_side(const LineImage& left, const LineImage& right)
{
	constexpr int kGutter = 4;
	const int h = std::max(left.height(), right.height());
	LineImage out(h, left.width() + kGutter + right.width(), kWhite);
	for (int r = 0; r < h; ++r)
		for (int c = 0; c < kGutter; ++c)
			out.set(r, left.width() + c, 0.5f);
	paste(out, left, 0, 0);
	paste(out, right, 0, left.width() + kGutter);
	return out;
}

} // namespace docenh

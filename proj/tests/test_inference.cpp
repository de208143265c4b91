/*
 * Copyright 2026 The docenh Authors
 */
// SPDX-License-Identifier: Apache-2.0

#include "docenh/errors.hpp"
#include "docenh/inference.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <random>

using namespace docenh;

namespace {

const PatchEnhancer kIdentity = [](const std::vector<LineImage>& batch) { return batch; };

} // namespace

TEST_CASE("make_grid")
{
	const auto exact = make_grid(256, 2048);
	CHECK(exact.rows == 2);
	CHECK(exact.cols == 2);
	CHECK(exact.count() == 4);
	CHECK(exact.pad_bottom == 0);
	CHECK(exact.pad_right == 0);

	const auto ragged = make_grid(300, 1100);
	CHECK(ragged.rows == 3);
	CHECK(ragged.cols == 2);
	CHECK(ragged.pad_bottom == 84);
	CHECK(ragged.pad_right == 948);

	const auto tiny = make_grid(1, 1);
	CHECK(tiny.count() == 1);
	CHECK(tiny.padded_h() == kModelHeight);
	CHECK(tiny.padded_w() == kModelWidth);

	const auto over = make_grid(256, 2048, true);
	CHECK(over.stride_h == kModelHeight / 2);
	CHECK(over.stride_w == kModelWidth / 2);
	CHECK(over.row_origin(over.rows - 1) + kModelHeight == over.padded_h());
	CHECK(over.col_origin(over.cols - 1) + kModelWidth == over.padded_w());
}

TEST_CASE("tile then stitch is the identity")
{
	std::mt19937_64 rng(41);
	for (auto [h, w, overlap] : {std::tuple{37, 53, false}, {70, 20, true}, {16, 16, false}, {40, 90, true}}) {
		const LineImage page = oracle::random_gray(rng, h, w);
		const auto grid = make_grid(h, w, overlap, 16, 32);
		const auto patches = tile_page(page, grid);
		REQUIRE(static_cast<int>(patches.size()) == grid.count());
		for (const auto& p : patches) {
			REQUIRE(p.height() == 16);
			REQUIRE(p.width() == 32);
		}
		REQUIRE(stitch(grid, patches) == page);
	}
}

TEST_CASE("flip_vote")
{
	BinaryImage a(1, 2), b(1, 2);
	a.set(0, 0, 0);
	CHECK(flip_vote(a, b).ink_count() == 0);
	CHECK(flip_vote(a, a) == a);
	CHECK_THROWS_AS(flip_vote(BinaryImage(1, 2), BinaryImage(2, 1)), ContractError);

	std::mt19937_64 rng(42);
	for (int trial = 0; trial < 100; ++trial) {
		const auto x = oracle::random_binary(rng, 6, 7, 0.4);
		const auto y = oracle::random_binary(rng, 6, 7, 0.4);
		const auto v = flip_vote(x, y);
		REQUIRE(v == flip_vote(y, x));
		REQUIRE(v.ink_count() <= std::min(x.ink_count(), y.ink_count()));
	}
}

TEST_CASE("enhance_page with an identity enhancer")
{
	LineImage page(200, 1500, 1.0f);
	CHECK(enhance_page(kIdentity, page).ink_count() == 0);

	for (int c = 100; c < 140; ++c)
		page.set(50, c, 0.0f);
	page.set(10, 10, 0.0f);
	const BinaryImage out = enhance_page(kIdentity, page);
	CHECK(out.height() == 200);
	CHECK(out.width() == 1500);
	CHECK(out == threshold(page, 0.5f));

	EnhanceOptions opts;
	opts.overlap = true;
	CHECK(enhance_page_gray(kIdentity, page, opts) == page);

	const auto pair = side_by_side(page, page);
	CHECK(pair.width() == 2 * 1500 + 4);
}

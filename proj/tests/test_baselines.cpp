/*
 * Copyright 2026 The docenh Authors
 */
// SPDX-License-Identifier: Apache-2.0

#include "docenh/baselines.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace docenh;

namespace {

std::vector<int> bytes_of(const LineImage& img)
{
	std::vector<int> out;
	for (float v : img.values())
		out.push_back(static_cast<int>(std::lround(v * 255.0f)));
	return out;
}

} // namespace

TEST_CASE("otsu on a two-level image splits the halves")
{
	LineImage img(8, 8, 0.9f);
	for (int r = 0; r < 8; ++r)
		for (int c = 0; c < 4; ++c)
			img.set(r, c, 0.1f);
	const int t = otsu_threshold(byte_histogram(img));
	CHECK(t == oracle::otsu_exhaustive(bytes_of(img)));
	const BinaryImage b = otsu_binarize(img);
	for (int r = 0; r < 8; ++r)
		for (int c = 0; c < 8; ++c)
			REQUIRE(b.is_ink(r, c) == (c < 4));
}

TEST_CASE("otsu on a constant image is all background")
{
	const LineImage img(5, 7, 0.4f);
	CHECK(otsu_threshold(byte_histogram(img)) == -1);
	CHECK(otsu_binarize(img).ink_count() == 0);
}

TEST_CASE("otsu threshold matches exhaustive search")
{
	std::mt19937_64 rng(31);
	for (int trial = 0; trial < 25; ++trial) {
		const LineImage img = oracle::random_gray(rng, 12, 12);
		REQUIRE(otsu_threshold(byte_histogram(img)) == oracle::otsu_exhaustive(bytes_of(img)));
	}
}

TEST_CASE("sauvola")
{
	CHECK(sauvola_binarize(LineImage(9, 9, 0.6f)).ink_count() == 0);

	LineImage patch(9, 9, 1.0f);
	for (int r = 0; r < 9; ++r)
		patch.set(r, 4, 0.1f);
	const BinaryImage b = sauvola_binarize(patch);
	for (int r = 0; r < 9; ++r)
		for (int c = 0; c < 9; ++c)
			REQUIRE(b.is_ink(r, c) == (c == 4));

	std::mt19937_64 rng(32);
	for (int trial = 0; trial < 5; ++trial) {
		const LineImage img = oracle::random_gray(rng, 20, 30);
		const int window = 5 + 2 * trial;
		REQUIRE(sauvola_binarize(img, window, 0.2) == oracle::sauvola_direct(img, window, 0.2));
	}
}

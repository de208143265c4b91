/*
 * Copyright 2026 The docenh Authors
 */
// SPDX-License-Identifier: Apache-2.0

#include "docenh/errors.hpp"
#include "docenh/image.hpp"
#include "docenh/png_io.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <filesystem>

using namespace docenh;

TEST_CASE("LineImage enforces its invariants")
{
	CHECK_THROWS_AS(LineImage(0, 4), ContractError);
	CHECK_THROWS_AS(LineImage(2, 2, std::vector<float>{0.0f, 0.5f, 1.0f, 1.5f}), ContractError);
	CHECK_THROWS_AS(LineImage(2, 2, std::vector<float>{0.0f}), ContractError);
	LineImage img(2, 3, 0.25f);
	img.set(0, 0, 7.0f);
	CHECK(img.at(0, 0) == 1.0f);
}

TEST_CASE("normalize_to_model_size")
{
	std::mt19937_64 rng(1);
	SUBCASE("identity at model size")
	{
		const auto img = oracle::random_gray(rng, 128, 1024);
		CHECK(normalize_to_model_size(img) == img);
	}
	SUBCASE("proportional upscale fills the target")
	{
		LineImage img(64, 512, 1.0f);
		for (int c = 0; c < 512; ++c)
			img.set(32, c, 0.0f);
		const auto out = normalize_to_model_size(img);
		CHECK(out.height() == 128);
		CHECK(out.width() == 1024);
		// Content reaches the last column: the ink row spans the full width.
		CHECK(out.at(64, 1023) < 0.75f);
	}
	SUBCASE("narrow input is padded with white")
	{
		LineImage img(128, 500, 0.0f);
		const auto out = normalize_to_model_size(img);
		for (int r = 0; r < 128; ++r) {
			CHECK(out.at(r, 0) == 0.0f);
			CHECK(out.at(r, 499) == 0.0f);
			for (int c = 500; c < 1024; ++c)
				REQUIRE(out.at(r, c) == 1.0f);
		}
	}
	SUBCASE("wide input is scaled to fit the width")
	{
		LineImage img(128, 4096, 0.0f);
		const auto out = normalize_to_model_size(img);
		CHECK(out.at(0, 1023) == 0.0f);
		CHECK(out.at(31, 1023) == 0.0f);
		CHECK(out.at(32, 0) == 1.0f);
	}
	SUBCASE("always returns the requested size")
	{
		for (int trial = 0; trial < 20; ++trial) {
			std::uniform_int_distribution<int> dim(1, 300);
			const auto img = oracle::random_gray(rng, dim(rng), dim(rng));
			const auto out = normalize_to_model_size(img, 32, 128);
			REQUIRE(out.height() == 32);
			REQUIRE(out.width() == 128);
		}
	}
}

TEST_CASE("flip_vertical")
{
	const LineImage col(2, 1, std::vector<float>{0.0f, 1.0f});
	CHECK(flip_vertical(col) == LineImage(2, 1, std::vector<float>{1.0f, 0.0f}));

	std::mt19937_64 rng(2);
	const auto row = oracle::random_gray(rng, 1, 9);
	CHECK(flip_vertical(row) == row);

	for (int i = 0; i < 20; ++i) {
		const auto img = oracle::random_gray(rng, 1 + i, 3 + i);
		REQUIRE(flip_vertical(flip_vertical(img)) == img);
	}
}

TEST_CASE("threshold")
{
	CHECK(threshold(LineImage(3, 3, 0.0f), 0.5f).ink_count() == 9);
	CHECK(threshold(LineImage(3, 3, 1.0f), 0.5f).ink_count() == 0);
	const auto b = threshold(LineImage(1, 2, std::vector<float>{0.2f, 0.8f}), 0.5f);
	CHECK(b.at(0, 0) == 0);
	CHECK(b.at(0, 1) == 1);
	CHECK_THROWS_AS(threshold(LineImage(1, 1), 1.5f), ContractError);

	// Lowering t never turns background into ink.
	std::mt19937_64 rng(3);
	const auto img = oracle::random_gray(rng, 16, 16);
	for (float t = 1.0f; t > 0.06f; t -= 0.05f) {
		const auto hi = threshold(img, t);
		const auto lo = threshold(img, t - 0.05f);
		for (int r = 0; r < 16; ++r)
			for (int c = 0; c < 16; ++c)
				if (hi.at(r, c) == 1)
					REQUIRE(lo.at(r, c) == 1);
	}
}

TEST_CASE("PNG round trip keeps byte-quantized intensities")
{
	std::mt19937_64 rng(4);
	const auto img = oracle::random_gray(rng, 7, 13);
	const auto path = std::filesystem::temp_directory_path() / "docenh_png_roundtrip.png";
	write_png(path, img);
	CHECK(read_png(path) == img);
	std::filesystem::remove(path);
	CHECK_THROWS(read_png("/nonexistent/file.png"));
}

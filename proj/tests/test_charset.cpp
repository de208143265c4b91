/*
 * Copyright 2026 The docenh Authors
 */
// SPDX-License-Identifier: Apache-2.0

#include "docenh/charset.hpp"
#include "docenh/errors.hpp"
#include "docenh/text.hpp"

#include <doctest.h>

#include <random>

using namespace docenh;

TEST_CASE("charset indexing")
{
	const Charset cs(U"ab");
	CHECK(cs.blank_index() == 2);
	CHECK(cs.class_count() == 3);
	CHECK(cs.index_of(U'b') == 1);
	CHECK_THROWS_AS(Charset(U"aba"), ContractError);
}

TEST_CASE("encode_transcription")
{
	const Charset cs(U"ab");
	CHECK(encode_transcription(U"", cs).empty());
	CHECK(encode_transcription(U"ab", cs) == std::vector<int>{0, 1});
	try {
		encode_transcription(U"ax", cs);
		FAIL("expected VocabularyError");
	} catch (const VocabularyError& e) {
		CHECK(e.character() == U'x');
		CHECK(std::string(e.what()).find('x') != std::string::npos);
	}
}

TEST_CASE("ctc decoding")
{
	const Charset cs(U"ab");
	const int blank = cs.blank_index();
	CHECK(collapse_path(std::vector<int>{0, 0, blank, 1}, cs) == U"ab");
	CHECK(collapse_path(std::vector<int>{blank, blank}, cs) == U"");
	CHECK(collapse_path(std::vector<int>{0, blank, 0}, cs) == U"aa");

	const std::vector<float> frames{0.7f, 0.2f, 0.1f, 0.6f, 0.3f, 0.1f, 0.1f, 0.1f, 0.8f, 0.2f, 0.7f, 0.1f};
	CHECK(greedy_ctc_decode(frames, 4, cs) == U"ab");
}

TEST_CASE("encode then decode with blanks between labels round-trips")
{
	const Charset cs(U"abc ");
	std::mt19937_64 rng(51);
	for (int trial = 0; trial < 100; ++trial) {
		std::u32string text;
		for (std::size_t i = rng() % 10; i > 0; --i)
			text.push_back(cs.at(static_cast<int>(rng() % cs.size())));
		std::vector<int> path;
		for (int l : encode_transcription(text, cs)) {
			path.push_back(l);
			path.push_back(cs.blank_index());
		}
		REQUIRE(collapse_path(path, cs) == text);
	}
}

TEST_CASE("utf8 and seeds")
{
	const std::string s = "a\xd8\xa8\xe2\x82\xac\xf0\x9f\x98\x80";
	const auto u = utf8_decode(s);
	CHECK(u == U"aب€\U0001F600");
	CHECK(utf8_encode(u) == s);
	CHECK_THROWS(utf8_decode("\xc3"));
	CHECK(split_words(U"  a b  c ") == std::vector<std::u32string>{U"a", U"b", U"c"});
	CHECK(derive_seed(7, "x") == derive_seed(7, "x"));
	CHECK(derive_seed(7, "x") != derive_seed(8, "x"));
	CHECK(hex64(255) == "00000000000000ff");
}

/*
 * Copyright 2026 The docenh Authors
 */
// SPDX-License-Identifier: Apache-2.0

#include "docenh/text.hpp"

#include <cstdio>
#include <stdexcept>

namespace docenh {

std::u32string utf8_decode(std::string_view text)
{
	std::u32string out;
	out.reserve(text.size());
	std::size_t i = 0;
	while (i < text.size()) {
		const auto b0 = static_cast<unsigned char>(text[i]);
		int extra = 0;
		char32_t cp = 0;
		if (b0 < 0x80) {
			cp = b0;
		} else if ((b0 & 0xE0) == 0xC0) {
			cp = b0 & 0x1F;
			extra = 1;
		} else if ((b0 & 0xF0) == 0xE0) {
			cp = b0 & 0x0F;
			extra = 2;
		} else if ((b0 & 0xF8) == 0xF0) {
			cp = b0 & 0x07;
			extra = 3;
		} else {
			throw std::invalid_argument("malformed UTF-8 lead byte");
		}
		for (int k = 1; k <= extra; ++k) {
			if (i + k >= text.size())
				throw std::invalid_argument("truncated UTF-8 sequence");
			const auto b = static_cast<unsigned char>(text[i + k]);
			if ((b & 0xC0) != 0x80)
				throw std::invalid_argument("malformed UTF-8 continuation byte");
			cp = (cp << 6) | (b & 0x3F);
		}
		out.push_back(cp);
		i += static_cast<std::size_t>(extra) + 1;
	}
	return out;
}

std::string utf8_encode(char32_t c)
{
	std::string out;
	if (c < 0x80) {
		out.push_back(static_cast<char>(c));
	} else if (c < 0x800) {
		out.push_back(static_cast<char>(0xC0 | (c >> 6)));
		out.push_back(static_cast<char>(0x80 | (c & 0x3F)));
	} else if (c < 0x10000) {
		out.push_back(static_cast<char>(0xE0 | (c >> 12)));
		out.push_back(static_cast<char>(0x80 | ((c >> 6) & 0x3F)));
		out.push_back(static_cast<char>(0x80 | (c & 0x3F)));
	} else {
		out.push_back(static_cast<char>(0xF0 | (c >> 18)));
		out.push_back(static_cast<char>(0x80 | ((c >> 12) & 0x3F)));
		out.push_back(static_cast<char>(0x80 | ((c >> 6) & 0x3F)));
		out.push_back(static_cast<char>(0x80 | (c & 0x3F)));
	}
	return out;
}

std::string utf8_encode(std::u32string_view text)
{
	std::string out;
	out.reserve(text.size());
	for (char32_t c : text)
		out += utf8_encode(c);
	return out;
}

namespace {

bool is_space(char32_t c)
{
	switch (c) {
	case U' ': case U'\t': case U'\n': case U'\r': case U'\v': case U'\f':
	case 0x00A0: case 0x1680: case 0x2028: case 0x2029: case 0x202F: case 0x205F: case 0x3000:
		return true;
	default:
		return c >= 0x2000 && c <= 0x200A;
	}
}

} // namespace

std::vector<std::u32string> split_words(std::u32string_view text)
{
	std::vector<std::u32string> words;
	std::u32string current;
	for (char32_t c : text) {
		if (is_space(c)) {
			if (!current.empty())
				words.push_back(std::move(current));
			current.clear();
		} else {
			current.push_back(c);
		}
	}
	if (!current.empty())
		words.push_back(std::move(current));
	return words;
}

std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t basis)
{
	std::uint64_t h = basis;
	for (char c : bytes) {
		h ^= static_cast<unsigned char>(c);
		h *= 0x100000001b3ULL;
	}
	return h;
}

std::uint64_t mix64(std::uint64_t x)
{
	x += 0x9e3779b97f4a7c15ULL;
	x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
	x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
	return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t master_seed, std::string_view item_id)
{
	return mix64(master_seed ^ fnv1a64(item_id));
}

std::string hex64(std::uint64_t v)
{
	char buf[17];
	std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
	return buf;
}

} // namespace docenh

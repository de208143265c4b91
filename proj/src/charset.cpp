/*
 * Copyright 2026 The docenh Authors
 */
// SPDX-License-Identifier: Apache-2.0

#include "docenh/charset.hpp"

#include "docenh/errors.hpp"
#include "docenh/text.hpp"

#include <algorithm>

namespace docenh {

Charset::Charset(std::u32string chars) : chars_(std::move(chars))
{
	for (std::size_t i = 0; i < chars_.size(); ++i)
		if (!index_.emplace(chars_[i], static_cast<int>(i)).second)
			throw ContractError("charset contains duplicate character '" + utf8_encode(chars_[i]) + "'");
}

int Charset::index_of(char32_t c) const
{
	auto it = index_.find(c);
	if (it == index_.end())
		throw VocabularyError("character '" + utf8_encode(c) + "' (U+" + hex64(c).substr(10) +
								  ") is not in the charset",
							  c);
	return it->second;
}

std::vector<int> encode_transcription(std::u32string_view text, const Charset& charset)
{
	std::vector<int> labels;
	labels.reserve(text.size());
	for (char32_t c : text)
		labels.push_back(charset.index_of(c));
	return labels;
}

std::u32string collapse_path(std::span<const int> path, const Charset& charset)
{
	std::u32string out;
	int prev = -1;
	for (int k : path) {
		if (k != prev && k != charset.blank_index())
			out.push_back(charset.at(k));
		prev = k;
	}
	return out;
}

std::u32string greedy_ctc_decode(std::span<const float> frames, int frame_count, const Charset& charset)
{
	const int classes = charset.class_count();
	if (frames.size() != static_cast<std::size_t>(frame_count) * classes)
		throw ContractError("greedy_ctc_decode: frame matrix does not match the charset");
	std::vector<int> path(frame_count);
	for (int t = 0; t < frame_count; ++t) {
		const auto row = frames.subspan(static_cast<std::size_t>(t) * classes, classes);
		path[t] = static_cast<int>(std::max_element(row.begin(), row.end()) - row.begin());
	}
	return collapse_path(path, charset);
}

} // namespace docenh

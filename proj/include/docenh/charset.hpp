/*
 * Copyright 2026 The docenh Authors
 */
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace docenh {

/// Ordered recognizer vocabulary. Class index i < size() is chars()[i];
/// index size() is the CTC blank.
class Charset
{
public:
	Charset() = default;
	explicit Charset(std::u32string chars); ///< throws ContractError on duplicates

	const std::u32string& chars() const noexcept { return chars_; }
	int size() const noexcept { return static_cast<int>(chars_.size()); }
	int blank_index() const noexcept { return size(); }
	int class_count() const noexcept { return size() + 1; }

	bool contains(char32_t c) const { return index_.contains(c); }
	int index_of(char32_t c) const; ///< throws VocabularyError
	char32_t at(int index) const { return chars_.at(static_cast<std::size_t>(index)); }

	friend bool operator==(const Charset& a, const Charset& b) { return a.chars_ == b.chars_; }

private:
	std::u32string chars_;
	std::unordered_map<char32_t, int> index_;
};

/// One label index per code point. Throws VocabularyError naming the first
/// character missing from the charset.
std::vector<int> encode_transcription(std::u32string_view text, const Charset& charset);

/// Best path over a row-major frames x class_count score matrix: argmax per
/// frame, merge adjacent repeats, drop blanks.
std::u32string greedy_ctc_decode(std::span<const float> frames, int frame_count, const Charset& charset);

/// Decodes an explicit class path (already argmaxed).
std::u32string collapse_path(std::span<const int> path, const Charset& charset);

} // namespace docenh

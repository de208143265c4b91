/*
 * Copyright 2026 The docenh Authors
 */
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace docenh {

/// Decodes UTF-8 into code points. Malformed bytes raise std::invalid_argument.
std::u32string utf8_decode(std::string_view text);
std::string utf8_encode(std::u32string_view text);
std::string utf8_encode(char32_t c);

/// Splits on runs of Unicode/ASCII whitespace, dropping empty tokens.
std::vector<std::u32string> split_words(std::u32string_view text);

/// 64-bit FNV-1a over bytes, used for stable seeds and config hashes.
std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t basis = 0xcbf29ce484222325ULL);

/// SplitMix64 finalizer; decorrelates combined seeds.
std::uint64_t mix64(std::uint64_t x);

/// Stable per-item seed: independent of processing order.
std::uint64_t derive_seed(std::uint64_t master_seed, std::string_view item_id);

std::string hex64(std::uint64_t v);

} // namespace docenh

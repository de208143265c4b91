/*
 * Copyright 2026 The docenh Authors
 */
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace docenh {

/// Invalid user-supplied configuration (ranges, missing paths, bad flags).
/// The CLI maps this to exit status 2.
class ConfigError : public std::runtime_error
{
public:
	using std::runtime_error::runtime_error;
};

/// A caller broke a shape or value precondition of an operation.
class ContractError : public std::logic_error
{
public:
	using std::logic_error::logic_error;
};

/// A transcription contains a character missing from the charset.
class VocabularyError : public std::runtime_error
{
public:
	VocabularyError(const std::string& message, char32_t character)
		: std::runtime_error(message), character_(character)
	{}

	char32_t character() const noexcept { return character_; }

private:
	char32_t character_;
};

/// A named resource (background asset, manifest id) could not be found.
class LookupError : public std::runtime_error
{
public:
	using std::runtime_error::runtime_error;
};

} // namespace docenh

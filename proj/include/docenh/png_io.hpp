/*
 * Copyright 2026 The docenh Authors
 */
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "docenh/image.hpp"

#include <filesystem>

namespace docenh {

/// Reads any PNG (palette, gray, RGB, alpha, 16-bit) as 8-bit gray and maps
/// byte b to b / 255. Throws std::runtime_error on IO or decode failure.
LineImage read_png(const std::filesystem::path& path);

/// Writes an 8-bit single-channel PNG; intensity i maps to round(i * 255).
void write_png(const std::filesystem::path& path, const LineImage& img);
void write_png(const std::filesystem::path& path, const BinaryImage& img);

inline std::uint8_t to_byte(float v) noexcept
{
	return static_cast<std::uint8_t>(v <= 0.0f ? 0 : v >= 1.0f ? 255 : static_cast<int>(v * 255.0f + 0.5f));
}

} // namespace docenh

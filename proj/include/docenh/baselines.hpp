/*
 * Copyright 2026 The docenh Authors
 */
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "docenh/image.hpp"

#include <array>
#include <cstdint>

namespace docenh {

/// 256-bin histogram of round(v * 255).
std::array<std::uint64_t, 256> byte_histogram(const LineImage& img);

/// Bin t maximizing the between-class variance of {0..t} vs {t+1..255};
/// the first maximum wins. Returns -1 when every split has zero variance.
int otsu_threshold(const std::array<std::uint64_t, 256>& hist);

/// Global Otsu: ink where the pixel byte is <= the selected bin. A constant
/// image is all background.
BinaryImage otsu_binarize(const LineImage& img);

inline constexpr int kSauvolaWindow = 25;
inline constexpr double kSauvolaK = 0.2;
inline constexpr double kSauvolaRange = 0.5;

/// Local threshold m * (1 + k (s / R - 1)) from the mean m and standard
/// deviation s of a window x window neighbourhood (clipped at borders).
BinaryImage sauvola_binarize(const LineImage& img, int window = kSauvolaWindow, double k = kSauvolaK);

} // namespace docenh

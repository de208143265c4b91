/*
 * Copyright 2026 The docenh Authors
 */
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "docenh/image.hpp"

#include <json.hpp>

#include <algorithm>
#include <array>
#include <cstddef>
#include <filesystem>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace docenh {

/// Reported in place of +infinity when prediction and ground truth match.
inline constexpr double kPsnrIdentical = 99.99;

/// 10 log10(1 / MSE) on the [0, 1] range.
double psnr(const LineImage& pred, const LineImage& gt);
double psnr(const BinaryImage& pred, const BinaryImage& gt);

/// Harmonic mean of precision and recall over ink pixels, in percent.
double f_measure(const BinaryImage& pred, const BinaryImage& gt);

/// Thinned (Zhang-Suen) ink skeleton; same conventions as the input.
BinaryImage skeletonize(const BinaryImage& img);

/// F-measure whose recall counts only skeleton pixels of the GT ink.
double pseudo_f_measure(const BinaryImage& pred, const BinaryImage& gt);

/// Normalized 5x5 reciprocal-distance weights, row-major, centre 0.
std::array<double, 25> drd_weights();

/// Number of 8x8 GT blocks holding both ink and background (edge blocks are
/// clipped to the image).
std::size_t count_nonuniform_blocks(const BinaryImage& gt);

/// Distance reciprocal distortion. Throws std::domain_error when GT has no
/// non-uniform block but pixels were flipped.
double drd(const BinaryImage& pred, const BinaryImage& gt);

/// (psnr + fm + fps + (100 - drd)) / 4
double avg_score(double psnr_db, double fm, double fps, double drd_value);

/// Unit-cost insert/delete/substitute edit distance.
template <typename Seq>
std::size_t levenshtein(const Seq& a, const Seq& b)
{
	const std::size_t n = std::size(b);
	std::vector<std::size_t> prev(n + 1), cur(n + 1);
	std::iota(prev.begin(), prev.end(), std::size_t{0});
	std::size_t i = 0;
	for (const auto& x : a) {
		cur[0] = ++i;
		std::size_t j = 0;
		for (const auto& y : b) {
			++j;
			cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + (x == y ? 0 : 1)});
		}
		std::swap(prev, cur);
	}
	return prev[n];
}

/// 100 * edits / |gt| over code points. Throws std::invalid_argument on empty gt.
double cer(std::u32string_view gt, std::u32string_view hyp);
/// 100 * edits / |gt words| over whitespace-delimited tokens.
double wer(std::u32string_view gt, std::u32string_view hyp);

struct BinarizationRecord
{
	std::string id;
	double psnr = 0, fm = 0, fps = 0, drd = 0, avg = 0;
};

struct BinarizationReport
{
	std::vector<BinarizationRecord> items;
	BinarizationRecord mean; ///< unweighted means; id = "mean"
	std::vector<std::string> unmatched;
};

struct RecognitionRecord
{
	std::string id;
	std::size_t char_edits = 0, gt_chars = 0, hyp_chars = 0;
	std::size_t word_edits = 0, gt_words = 0, hyp_words = 0;
	double cer = 0, wer = 0;
};

struct RecognitionReport
{
	std::vector<RecognitionRecord> items;
	double cer = 0, wer = 0;			 ///< macro: mean of per-line rates (headline)
	double micro_cer = 0, micro_wer = 0; ///< total edits / total GT length
	std::vector<std::string> unmatched;
};

BinarizationRecord evaluate_binarization(const std::string& id, const BinaryImage& pred, const BinaryImage& gt);
RecognitionRecord evaluate_recognition(const std::string& id, std::u32string_view gt, std::u32string_view hyp);

BinarizationReport summarize(std::vector<BinarizationRecord> items);
RecognitionReport summarize(std::vector<RecognitionRecord> items);

/// Pairs PNGs by file stem, thresholds both sides at 0.5 and scores the
/// intersection. Throws std::runtime_error when no ids match.
BinarizationReport evaluate_binarization_dirs(const std::filesystem::path& pred_dir,
											  const std::filesystem::path& gt_dir, int jobs = 1);

/// Pairs UTF-8 .txt files by stem.
RecognitionReport evaluate_recognition_dirs(const std::filesystem::path& hyp_dir, const std::filesystem::path& gt_dir);

nlohmann::json to_json(const BinarizationReport& report);
nlohmann::json to_json(const RecognitionReport& report);

/// Plain-text table with 2-decimal numbers.
std::string format_table(const BinarizationReport& report);
std::string format_table(const RecognitionReport& report);

} // namespace docenh

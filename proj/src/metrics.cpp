/*
 * Copyright 2026 The docenh Authors
 */
// SPDX-License-Identifier: Apache-2.0

#include "docenh/metrics.hpp"

#include "docenh/errors.hpp"
#include "docenh/png_io.hpp"
#include "docenh/text.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace fs = std::filesystem;
using nlohmann::json;

namespace docenh {

namespace {

template <typename A, typename B>
void require_same_shape(const A& a, const B& b, const char* what)
{
	if (a.height() != b.height() || a.width() != b.width())
		throw ContractError(std::string(what) + ": image dimensions differ");
}

double psnr_from_sse(double sse, std::size_t n)
{
	if (sse == 0.0)
		return kPsnrIdentical;
	return 10.0 * std::log10(1.0 / (sse / static_cast<double>(n)));
}

struct Counts
{
	std::size_t tp = 0, fp = 0, fn = 0;
};

double f_score(double precision, double recall)
{
	if (precision + recall == 0.0)
		return 0.0;
	return 100.0 * 2.0 * precision * recall / (precision + recall);
}

} // namespace

double psnr(const LineImage& pred, const LineImage& gt)
{
	require_same_shape(pred, gt, "psnr");
	double sse = 0.0;
	const auto p = pred.values();
	const auto g = gt.values();
	for (std::size_t i = 0; i < p.size(); ++i) {
		const double d = static_cast<double>(p[i]) - g[i];
		sse += d * d;
	}
	return psnr_from_sse(sse, p.size());
}

double psnr(const BinaryImage& pred, const BinaryImage& gt)
{
	require_same_shape(pred, gt, "psnr");
	std::size_t flips = 0;
	const auto p = pred.values();
	const auto g = gt.values();
	for (std::size_t i = 0; i < p.size(); ++i)
		flips += p[i] != g[i];
	return psnr_from_sse(static_cast<double>(flips), p.size());
}

double f_measure(const BinaryImage& pred, const BinaryImage& gt)
{
	require_same_shape(pred, gt, "f_measure");
	Counts c;
	const auto p = pred.values();
	const auto g = gt.values();
	for (std::size_t i = 0; i < p.size(); ++i) {
		const bool pi = p[i] == 0, gi = g[i] == 0;
		c.tp += pi && gi;
		c.fp += pi && !gi;
		c.fn += !pi && gi;
	}
	const std::size_t pred_ink = c.tp + c.fp;
	const std::size_t gt_ink = c.tp + c.fn;
	if (gt_ink == 0 && pred_ink == 0)
		return 100.0;
	if (pred_ink == 0 || gt_ink == 0)
		return 0.0;
	return f_score(static_cast<double>(c.tp) / pred_ink, static_cast<double>(c.tp) / gt_ink);
}

BinaryImage skeletonize(const BinaryImage& img)
{
	const int h = img.height();
	const int w = img.width();
	std::vector<std::uint8_t> ink(static_cast<std::size_t>(h) * w);
	for (int r = 0; r < h; ++r)
		for (int c = 0; c < w; ++c)
			ink[static_cast<std::size_t>(r) * w + c] = img.is_ink(r, c) ? 1 : 0;

	auto px = [&](int r, int c) -> int {
		if (r < 0 || r >= h || c < 0 || c >= w)
			return 0;
		return ink[static_cast<std::size_t>(r) * w + c];
	};

	std::vector<std::size_t> to_clear;
	bool changed = true;
	while (changed) {
		changed = false;
		for (int pass = 0; pass < 2; ++pass) {
			to_clear.clear();
			for (int r = 0; r < h; ++r) {
				for (int c = 0; c < w; ++c) {
					if (!px(r, c))
						continue;
					// Neighbours P2..P9 clockwise from north.
					const int n[8] = {px(r - 1, c), px(r - 1, c + 1), px(r, c + 1), px(r + 1, c + 1),
									  px(r + 1, c), px(r + 1, c - 1), px(r, c - 1), px(r - 1, c - 1)};
					int count = 0, transitions = 0;
					for (int i = 0; i < 8; ++i) {
						count += n[i];
						transitions += (n[i] == 0 && n[(i + 1) % 8] == 1);
					}
					if (count < 2 || count > 6 || transitions != 1)
						continue;
					const bool cond = pass == 0 ? (n[0] * n[2] * n[4] == 0 && n[2] * n[4] * n[6] == 0)
												: (n[0] * n[2] * n[6] == 0 && n[0] * n[4] * n[6] == 0);
					if (cond)
						to_clear.push_back(static_cast<std::size_t>(r) * w + c);
				}
			}
			for (auto i : to_clear)
				ink[i] = 0;
			changed = changed || !to_clear.empty();
		}
	}

	std::vector<std::uint8_t> out(ink.size());
	for (std::size_t i = 0; i < ink.size(); ++i)
		out[i] = ink[i] ? 0 : 1;
	return BinaryImage(h, w, std::move(out));
}

double pseudo_f_measure(const BinaryImage& pred, const BinaryImage& gt)
{
	require_same_shape(pred, gt, "pseudo_f_measure");
	const BinaryImage skel = skeletonize(gt);
	std::size_t tp = 0, pred_ink = 0, skel_hit = 0, skel_ink = 0;
	const auto p = pred.values();
	const auto g = gt.values();
	const auto s = skel.values();
	for (std::size_t i = 0; i < p.size(); ++i) {
		const bool pi = p[i] == 0;
		pred_ink += pi;
		tp += pi && g[i] == 0;
		skel_ink += s[i] == 0;
		skel_hit += pi && s[i] == 0;
	}
	if (skel_ink == 0 && pred_ink == 0)
		return 100.0;
	if (pred_ink == 0 || skel_ink == 0)
		return 0.0;
	return f_score(static_cast<double>(tp) / pred_ink, static_cast<double>(skel_hit) / skel_ink);
}

std::array<double, 25> drd_weights()
{
	std::array<double, 25> w{};
	double sum = 0.0;
	for (int i = -2; i <= 2; ++i)
		for (int j = -2; j <= 2; ++j) {
			if (i == 0 && j == 0)
				continue;
			const double v = 1.0 / std::sqrt(static_cast<double>(i * i + j * j));
			w[(i + 2) * 5 + (j + 2)] = v;
			sum += v;
		}
	for (auto& v : w)
		v /= sum;
	return w;
}

std::size_t count_nonuniform_blocks(const BinaryImage& gt)
{
	std::size_t nubn = 0;
	for (int br = 0; br < gt.height(); br += 8)
		for (int bc = 0; bc < gt.width(); bc += 8) {
			bool has_ink = false, has_bg = false;
			for (int r = br; r < std::min(br + 8, gt.height()); ++r)
				for (int c = bc; c < std::min(bc + 8, gt.width()); ++c)
					(gt.is_ink(r, c) ? has_ink : has_bg) = true;
			nubn += has_ink && has_bg;
		}
	return nubn;
}

double drd(const BinaryImage& pred, const BinaryImage& gt)
{
	require_same_shape(pred, gt, "drd");
	static const auto weights = drd_weights();
	double total = 0.0;
	std::size_t flips = 0;
	for (int r = 0; r < gt.height(); ++r)
		for (int c = 0; c < gt.width(); ++c) {
			const int value = pred.at(r, c);
			if (value == gt.at(r, c))
				continue;
			++flips;
			double acc = 0.0, norm = 0.0;
			for (int i = -2; i <= 2; ++i)
				for (int j = -2; j <= 2; ++j) {
					const int rr = r + i, cc = c + j;
					if (rr < 0 || rr >= gt.height() || cc < 0 || cc >= gt.width())
						continue;
					const double wgt = weights[(i + 2) * 5 + (j + 2)];
					norm += wgt;
					acc += wgt * std::abs(static_cast<int>(gt.at(rr, cc)) - value);
				}
			total += norm > 0.0 ? acc / norm : 0.0;
		}
	if (flips == 0)
		return 0.0;
	const std::size_t nubn = count_nonuniform_blocks(gt);
	if (nubn == 0)
		throw std::domain_error("drd undefined: ground truth has no non-uniform 8x8 block");
	return total / static_cast<double>(nubn);
}

double avg_score(double psnr_db, double fm, double fps, double drd_value)
{
	return (psnr_db + fm + fps + (100.0 - drd_value)) / 4.0;
}

double cer(std::u32string_view gt, std::u32string_view hyp)
{
	if (gt.empty())
		throw std::invalid_argument("cer: ground-truth text is empty");
	return 100.0 * static_cast<double>(levenshtein(gt, hyp)) / static_cast<double>(gt.size());
}

double wer(std::u32string_view gt, std::u32string_view hyp)
{
	const auto g = split_words(gt);
	if (g.empty())
		throw std::invalid_argument("wer: ground-truth text has no words");
	const auto h = split_words(hyp);
	return 100.0 * static_cast<double>(levenshtein(g, h)) / static_cast<double>(g.size());
}

BinarizationRecord evaluate_binarization(const std::string& id, const BinaryImage& pred, const BinaryImage& gt)
{
	BinarizationRecord r;
	r.id = id;
	r.psnr = psnr(pred, gt);
	r.fm = f_measure(pred, gt);
	r.fps = pseudo_f_measure(pred, gt);
	r.drd = drd(pred, gt);
	r.avg = avg_score(r.psnr, r.fm, r.fps, r.drd);
	return r;
}

RecognitionRecord evaluate_recognition(const std::string& id, std::u32string_view gt, std::u32string_view hyp)
{
	RecognitionRecord r;
	r.id = id;
	const auto gw = split_words(gt);
	const auto hw = split_words(hyp);
	r.char_edits = levenshtein(gt, hyp);
	r.gt_chars = gt.size();
	r.hyp_chars = hyp.size();
	r.word_edits = levenshtein(gw, hw);
	r.gt_words = gw.size();
	r.hyp_words = hw.size();
	r.cer = cer(gt, hyp);
	r.wer = wer(gt, hyp);
	return r;
}

BinarizationReport summarize(std::vector<BinarizationRecord> items)
{
	BinarizationReport rep;
	rep.mean.id = "mean";
	if (!items.empty()) {
		for (const auto& r : items) {
			rep.mean.psnr += r.psnr;
			rep.mean.fm += r.fm;
			rep.mean.fps += r.fps;
			rep.mean.drd += r.drd;
			rep.mean.avg += r.avg;
		}
		const double n = static_cast<double>(items.size());
		rep.mean.psnr /= n;
		rep.mean.fm /= n;
		rep.mean.fps /= n;
		rep.mean.drd /= n;
		rep.mean.avg /= n;
	}
	rep.items = std::move(items);
	return rep;
}

RecognitionReport summarize(std::vector<RecognitionRecord> items)
{
	RecognitionReport rep;
	std::size_t ce = 0, gc = 0, we = 0, gw = 0;
	for (const auto& r : items) {
		rep.cer += r.cer;
		rep.wer += r.wer;
		ce += r.char_edits;
		gc += r.gt_chars;
		we += r.word_edits;
		gw += r.gt_words;
	}
	if (!items.empty()) {
		rep.cer /= static_cast<double>(items.size());
		rep.wer /= static_cast<double>(items.size());
		rep.micro_cer = 100.0 * static_cast<double>(ce) / static_cast<double>(gc);
		rep.micro_wer = 100.0 * static_cast<double>(we) / static_cast<double>(gw);
	}
	rep.items = std::move(items);
	return rep;
}

namespace {

std::map<std::string, fs::path> files_by_stem(const fs::path& dir, const std::string& ext)
{
	if (!fs::is_directory(dir))
		throw ConfigError("directory not found: " + dir.string());
	std::map<std::string, fs::path> out;
	for (const auto& e : fs::directory_iterator(dir))
		if (e.is_regular_file() && e.path().extension() == ext)
			out[e.path().stem().string()] = e.path();
	return out;
}

std::vector<std::string> match_ids(const std::map<std::string, fs::path>& a, const std::map<std::string, fs::path>& b,
								   std::vector<std::string>& unmatched)
{
	std::vector<std::string> ids;
	for (const auto& [id, _] : a)
		(b.contains(id) ? ids : unmatched).push_back(id);
	for (const auto& [id, _] : b)
		if (!a.contains(id))
			unmatched.push_back(id);
	std::sort(unmatched.begin(), unmatched.end());
	if (ids.empty())
		throw std::runtime_error("no matching ids between prediction and ground-truth directories");
	return ids;
}

std::u32string read_text(const fs::path& p)
{
	std::ifstream in(p, std::ios::binary);
	if (!in)
		throw std::runtime_error("cannot read " + p.string());
	std::stringstream ss;
	ss << in.rdbuf();
	std::string s = ss.str();
	while (!s.empty() && (s.back() == '\n' || s.back() == '\r'))
		s.pop_back();
	return utf8_decode(s);
}

} // namespace

BinarizationReport evaluate_binarization_dirs(const fs::path& pred_dir, const fs::path& gt_dir, int jobs)
{
	const auto preds = files_by_stem(pred_dir, ".png");
	const auto gts = files_by_stem(gt_dir, ".png");
	std::vector<std::string> unmatched;
	const auto ids = match_ids(preds, gts, unmatched);

	std::vector<BinarizationRecord> items(ids.size());
	std::atomic<std::size_t> next{0};
	std::exception_ptr error;
	std::mutex error_mutex;
	auto worker = [&] {
		for (std::size_t i = next++; i < ids.size(); i = next++) {
			try {
				const auto pred = threshold(read_png(preds.at(ids[i])), 0.5f);
				const auto gt = threshold(read_png(gts.at(ids[i])), 0.5f);
				items[i] = evaluate_binarization(ids[i], pred, gt);
			} catch (...) {
				std::lock_guard lock(error_mutex);
				if (!error)
					error = std::current_exception();
			}
		}
	};
	{
		std::vector<std::jthread> threads;
		for (int t = 1; t < std::max(1, jobs); ++t)
			threads.emplace_back(worker);
		worker();
	}
	if (error)
		std::rethrow_exception(error);

	auto rep = summarize(std::move(items));
	rep.unmatched = std::move(unmatched);
	return rep;
}

RecognitionReport evaluate_recognition_dirs(const fs::path& hyp_dir, const fs::path& gt_dir)
{
	const auto hyps = files_by_stem(hyp_dir, ".txt");
	const auto gts = files_by_stem(gt_dir, ".txt");
	std::vector<std::string> unmatched;
	const auto ids = match_ids(hyps, gts, unmatched);
	std::vector<RecognitionRecord> items;
	for (const auto& id : ids)
		items.push_back(evaluate_recognition(id, read_text(gts.at(id)), read_text(hyps.at(id))));
	auto rep = summarize(std::move(items));
	rep.unmatched = std::move(unmatched);
	return rep;
}

json to_json(const BinarizationReport& report)
{
	auto rec = [](const BinarizationRecord& r) {
		return json{{"id", r.id}, {"psnr", r.psnr}, {"fm", r.fm}, {"fps", r.fps}, {"drd", r.drd}, {"avg", r.avg}};
	};
	json items = json::array();
	for (const auto& r : report.items)
		items.push_back(rec(r));
	json summary = rec(report.mean);
	summary.erase("id");
	summary["count"] = report.items.size();
	return json{{"mode", "binarization"}, {"items", items}, {"summary", summary}, {"unmatched", report.unmatched}};
}

json to_json(const RecognitionReport& report)
{
	json items = json::array();
	for (const auto& r : report.items)
		items.push_back(json{{"id", r.id},
							 {"cer", r.cer},
							 {"wer", r.wer},
							 {"char_edits", r.char_edits},
							 {"gt_chars", r.gt_chars},
							 {"hyp_chars", r.hyp_chars},
							 {"word_edits", r.word_edits},
							 {"gt_words", r.gt_words},
							 {"hyp_words", r.hyp_words}});
	json summary{{"cer", report.cer},
				 {"wer", report.wer},
				 {"micro_cer", report.micro_cer},
				 {"micro_wer", report.micro_wer},
				 {"count", report.items.size()}};
	return json{{"mode", "recognition"}, {"items", items}, {"summary", summary}, {"unmatched", report.unmatched}};
}

std::string format_table(const BinarizationReport& report)
{
	std::string out;
	char buf[256];
	std::snprintf(buf, sizeof buf, "%-24s %8s %8s %8s %8s %8s\n", "id", "PSNR", "FM", "Fps", "DRD", "Avg");
	out += buf;
	auto row = [&](const BinarizationRecord& r) {
		std::snprintf(buf, sizeof buf, "%-24s %8.2f %8.2f %8.2f %8.2f %8.2f\n", r.id.c_str(), r.psnr, r.fm, r.fps, r.drd,
					  r.avg);
		out += buf;
	};
	for (const auto& r : report.items)
		row(r);
	row(report.mean);
	return out;
}

std::string format_table(const RecognitionReport& report)
{
	std::string out;
	char buf[256];
	std::snprintf(buf, sizeof buf, "%-24s %8s %8s\n", "id", "CER", "WER");
	out += buf;
	for (const auto& r : report.items) {
		std::snprintf(buf, sizeof buf, "%-24s %8.2f %8.2f\n", r.id.c_str(), r.cer, r.wer);
		out += buf;
	}
	std::snprintf(buf, sizeof buf, "%-24s %8.2f %8.2f\n%-24s %8.2f %8.2f\n", "mean", report.cer, report.wer, "micro",
				  report.micro_cer, report.micro_wer);
	out += buf;
	return out;
}

} // namespace docenh

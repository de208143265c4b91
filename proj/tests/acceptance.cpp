/*
 * Copyright 2026 The docenh Authors
 */
// SPDX-License-Identifier: Apache-2.0

// Acceptance gate: runs every acceptance criterion at its stated tolerance
// and prints one PASS/FAIL line per criterion. Exit status is non-zero when
// any criterion fails.

#include "docenh/baselines.hpp"
#include "docenh/inference.hpp"
#include "docenh/loss_bridge.hpp"
#include "docenh/losses.hpp"
#include "docenh/metrics.hpp"
#include "docenh/models.hpp"
#include "docenh/training.hpp"
#include "oracles.hpp"
#include "reference_scores.hpp"
#include "toy_corpus.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

using namespace docenh;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start)
{
	return std::chrono::duration<double>(Clock::now() - start).count();
}

struct Outcome
{
	bool pass = false;
	std::string detail;
};

std::string fmt(const char* f, auto... args)
{
	char buf[256];
	std::snprintf(buf, sizeof buf, f, args...);
	return buf;
}

fs::path scratch(const std::string& name)
{
	return fs::temp_directory_path() / ("docenh_acceptance_" + name);
}

std::vector<double> random_rows(std::mt19937_64& rng, int T, int K)
{
	std::uniform_real_distribution<double> u(0.05, 1.0);
	std::vector<double> p(static_cast<std::size_t>(T) * K);
	for (int t = 0; t < T; ++t) {
		double s = 0;
		for (int k = 0; k < K; ++k)
			s += p[t * K + k] = u(rng);
		for (int k = 0; k < K; ++k)
			p[t * K + k] /= s;
	}
	return p;
}

// Elementwise |a - f| / max(|a|, |f|), with near-zero entries measured
// against a floor of 1e-3 so that both vanishing does not divide by zero.
double max_relative_error(const std::vector<double>& analytic, const std::vector<double>& numeric)
{
	double worst = 0;
	for (std::size_t i = 0; i < analytic.size(); ++i) {
		const double scale = std::max({std::abs(analytic[i]), std::abs(numeric[i]), 1e-3});
		worst = std::max(worst, std::abs(analytic[i] - numeric[i]) / scale);
	}
	return worst;
}

Outcome ctc_oracle()
{
	const auto start = Clock::now();
	std::mt19937_64 rng(101);
	double worst = 0;
	int infeasible = 0;
	bool ok = true;
	for (int trial = 0; trial < 200; ++trial) {
		const int K = 2 + static_cast<int>(rng() % 3); // up to 3 symbols + blank
		const int T = 1 + static_cast<int>(rng() % 6);
		const int L = static_cast<int>(rng() % 4);
		std::vector<int> labels(L);
		for (auto& l : labels)
			l = static_cast<int>(rng() % (K - 1));
		const auto p = random_rows(rng, T, K);
		std::vector<double> logs(p.size());
		std::transform(p.begin(), p.end(), logs.begin(), [](double v) { return std::log(v); });

		const double expected = oracle::ctc_bruteforce(p, T, K, labels, K - 1);
		const auto r = ctc_loss_log({logs, T, K}, labels, K - 1);
		if (std::isinf(expected)) {
			++infeasible;
			ok = ok && !r.feasible && std::isinf(r.loss);
			continue;
		}
		const double diff = std::abs(r.loss - expected);
		worst = std::max(worst, diff);
		ok = ok && r.feasible && diff <= 1e-9;
	}
	const double elapsed = seconds_since(start);
	ok = ok && elapsed < 10.0;
	return {ok, fmt("200 instances (%d infeasible), max |diff| %.3g, %.2f s", infeasible, worst, elapsed)};
}

Outcome gradient_checks()
{
	std::mt19937_64 rng(102);
	std::uniform_real_distribution<double> u(0.05, 0.95);
	auto draw = [&](std::size_t n) {
		std::vector<double> v(n);
		for (auto& x : v)
			x = u(rng);
		return v;
	};
	std::map<std::string, double> worst;
	auto record = [&](const std::string& name, double err) { worst[name] = std::max(worst[name], err); };

	for (int trial = 0; trial < 20; ++trial) {
		int T, K, L;
		std::vector<int> labels;
		do {
			K = 2 + static_cast<int>(rng() % 3);
			T = 1 + static_cast<int>(rng() % 6);
			L = 1 + static_cast<int>(rng() % 3);
			labels.assign(L, 0);
			for (auto& l : labels)
				l = static_cast<int>(rng() % (K - 1));
		} while (ctc_min_frames(labels) > T);
		const auto p = random_rows(rng, T, K);
		std::vector<double> logs(p.size());
		std::transform(p.begin(), p.end(), logs.begin(), [](double v) { return std::log(v); });

		const auto rl = ctc_loss_log({logs, T, K}, labels, K - 1, true);
		record("ctc(log)", max_relative_error(rl.grad, oracle::finite_difference(
															   [&](const std::vector<double>& x) {
																   return ctc_loss_log({x, T, K}, labels, K - 1).loss;
															   },
															   logs)));
		const auto rp = ctc_loss({p, T, K}, labels, K - 1, true);
		record("ctc(prob)", max_relative_error(rp.grad, oracle::finite_difference(
															[&](const std::vector<double>& x) {
																return ctc_loss({x, T, K}, labels, K - 1).loss;
															},
															p)));

		const std::size_t n = 1 + rng() % 8;
		const auto gen = draw(n), gt = draw(n), real = draw(n), fake = draw(n);
		record("pixel_bce",
			   max_relative_error(pixel_bce_grad(gen, gt).grad,
								  oracle::finite_difference([&](const auto& x) { return pixel_bce(x, gt); }, gen)));

		const auto dg = discriminator_loss_grad(real, fake);
		record("adv_D", max_relative_error(dg.d_real, oracle::finite_difference(
														  [&](const auto& x) { return discriminator_loss(x, fake); },
														  real)));
		record("adv_D", max_relative_error(dg.d_fake, oracle::finite_difference(
														  [&](const auto& x) { return discriminator_loss(real, x); },
														  fake)));
		for (auto form : {AdversarialForm::NonSaturating, AdversarialForm::Saturating})
			record(form == AdversarialForm::NonSaturating ? "adv_G" : "adv_G(sat)",
				   max_relative_error(generator_adversarial_loss_grad(fake, form).grad,
									  oracle::finite_difference(
										  [&](const auto& x) { return generator_adversarial_loss(x, form); }, fake)));
	}
	bool ok = true;
	std::string detail = "20 instances each; max rel err";
	for (const auto& [name, err] : worst) {
		ok = ok && err <= 1e-3;
		detail += fmt(" %s %.2g", name.c_str(), err);
	}
	return {ok, detail};
}

Outcome metric_oracles()
{
	std::mt19937_64 rng(103);
	std::uniform_real_distribution<double> density(0.1, 0.6);
	int mismatches = 0;
	double drd_worst = 0;
	for (int trial = 0; trial < 50; ++trial) {
		const BinaryImage gt = oracle::random_binary(rng, 16, 16, density(rng));
		BinaryImage pred = gt;
		// Half the pairs are independent, half are sparse corruptions of gt.
		if (trial % 2 == 0) {
			pred = oracle::random_binary(rng, 16, 16, density(rng));
		} else {
			for (int k = 0; k < 12; ++k) {
				const int r = static_cast<int>(rng() % 16), c = static_cast<int>(rng() % 16);
				pred.set(r, c, pred.is_ink(r, c) ? 1 : 0);
			}
		}
		mismatches += psnr(pred, gt) != oracle::psnr_direct(pred, gt);
		mismatches += f_measure(pred, gt) != oracle::fmeasure_direct(pred, gt);
		const double d = std::abs(drd(pred, gt) - oracle::drd_direct(pred, gt));
		drd_worst = std::max(drd_worst, d);
		mismatches += !(d <= 1e-9);
	}
	int edit_mismatches = 0;
	for (int trial = 0; trial < 50; ++trial) {
		auto word = [&] {
			std::u32string s(rng() % 8, U'a');
			for (auto& ch : s)
				ch = U'a' + static_cast<char32_t>(rng() % 4);
			return s;
		};
		const std::u32string a = word(), b = word();
		const std::vector<char32_t> va(a.begin(), a.end()), vb(b.begin(), b.end());
		edit_mismatches += levenshtein(a, b) != oracle::levenshtein_recursive(va, 0, vb, 0);
	}
	return {mismatches == 0 && edit_mismatches == 0,
			fmt("50 image pairs: %d mismatches (max drd diff %.3g); 50 string pairs: %d mismatches", mismatches,
				drd_worst, edit_mismatches)};
}

Outcome score_table()
{
	double worst = 0;
	for (const auto& row : reference::kScoreRows)
		worst = std::max(worst, std::abs(avg_score(row.psnr, row.fm, row.fps, row.drd) - row.avg));
	return {worst <= 0.01 + 1e-12, fmt("%zu rows, max |diff| %.4f", reference::kScoreRows.size(), worst)};
}

Outcome shape_contracts()
{
	std::u32string chars;
	for (char32_t c = U'a'; c <= U'z'; ++c)
		chars += c;
	for (char32_t c = U'A'; c <= U'Z'; ++c)
		chars += c;
	chars += U" .,;'-0123456789";
	auto bundle = ModelBundle::create({}, {}, {}, Charset(chars), 7);
	bundle.eval();
	torch::NoGradGuard guard;
	torch::manual_seed(1);
	const auto x = torch::rand({1, 1, kModelHeight, kModelWidth});
	const auto y = bundle.generator->forward(x);
	const bool g_ok = y.sizes() == x.sizes() && y.min().item<float>() >= 0.0f && y.max().item<float>() <= 1.0f;

	const auto s = bundle.discriminator->forward(x, y);
	const bool d_ok = s.sizes() == torch::IntArrayRef{1, 1, 8, 64} && s.min().item<float>() >= 0.0f &&
					  s.max().item<float>() <= 1.0f;

	const auto probs = recognizer_probabilities(bundle, to_images(x));
	const int K = bundle.charset.class_count();
	const std::size_t T = probs[0].size() / K;
	double worst = 0;
	for (std::size_t t = 0; t < T; ++t) {
		double sum = 0;
		for (int k = 0; k < K; ++k)
			sum += probs[0][t * K + k];
		worst = std::max(worst, std::abs(sum - 1.0));
	}
	const bool r_ok = probs[0].size() == T * K && T == 128 && K == static_cast<int>(chars.size()) + 1 && worst <= 1e-5;
	return {g_ok && d_ok && r_ok,
			fmt("G %s; D map %lldx%lld; R %zux%d rows, max |sum-1| %.2g", g_ok ? "ok" : "bad",
				static_cast<long long>(s.size(2)), static_cast<long long>(s.size(3)), T, K, worst)};
}

double training_bce(const ModelBundle& bundle, const std::vector<LineSample>& samples)
{
	std::vector<LineImage> degraded, gt;
	for (const auto& s : samples) {
		degraded.push_back(s.degraded);
		gt.push_back(s.gt);
	}
	const auto out = generate(bundle, degraded);
	std::vector<double> a, b;
	for (std::size_t i = 0; i < out.size(); ++i) {
		a.insert(a.end(), out[i].values().begin(), out[i].values().end());
		b.insert(b.end(), gt[i].values().begin(), gt[i].values().end());
	}
	return pixel_bce(a, b);
}

Outcome toy_overfit()
{
	const auto start = Clock::now();
	const auto manifest = toy::build_toy_corpus(scratch("overfit"));
	const TrainingConfig config = toy::toy_config();
	std::vector<LineSample> samples;
	double bce = 1.0, cer_value = 1.0;
	std::int64_t reached = -1;
	TrainOptions options;
	options.stop_when = [&](const ModelBundle& bundle, std::int64_t iteration) {
		if (iteration % 50 != 0)
			return false;
		if (samples.empty())
			samples = load_line_samples(manifest, Split::Train, bundle.charset, config.image_height,
										config.image_width);
		bce = training_bce(bundle, samples);
		cer_value = evaluate_lines(bundle, samples).cer;
		if (bce < 0.05 && cer_value == 0.0) {
			reached = iteration;
			return true;
		}
		return false;
	};
	train(manifest, config, options);
	const double elapsed = seconds_since(start);
	fs::remove_all(scratch("overfit"));
	const bool ok = reached > 0 && reached <= 2000 && elapsed < 1800.0;
	return {ok, fmt("%s at iteration %lld: train BCE %.4f, train CER %.3f, %.0f s",
					reached > 0 ? "reached" : "not reached", static_cast<long long>(reached > 0 ? reached : 2000), bce,
					cer_value, elapsed)};
}

Outcome scenario_contracts()
{
	const auto manifest = toy::build_toy_corpus(scratch("scenario_a"), 5);
	const auto second = toy::build_toy_corpus(scratch("scenario_b"), 6);
	TrainingConfig config = toy::toy_config();
	config.max_iterations = 6;
	config.checkpoint_every = 6;

	auto all_sources = [&](Scenario scenario, RecognizerSource expected) {
		config.scenario = scenario;
		const auto result = train(manifest, config);
		return result.reports.size() == 6 &&
			   std::all_of(result.reports.begin(), result.reports.end(),
						   [&](const IterationReport& r) { return r.recognizer_source == expected; });
	};
	const bool s1 = all_sources(Scenario::S1, RecognizerSource::GroundTruth);
	const bool s2 = all_sources(Scenario::S2, RecognizerSource::Generated);

	config.scenario = Scenario::S1;
	const auto trained = train(manifest, config).best;
	const auto before = normalization_state(*trained.generator);
	const auto tuned = fine_tune(trained.clone(), {manifest, second}, config);
	const auto after = normalization_state(*tuned.bundle.generator);
	bool frozen = before.size() == after.size() && !before.empty();
	for (std::size_t i = 0; frozen && i < before.size(); ++i)
		frozen = torch::equal(before[i], after[i]);

	const std::size_t patches = manifest.records().size() + second.records().size();
	const std::set<std::string> unique(tuned.visit_order.begin(), tuned.visit_order.end());
	const auto expected_iterations = static_cast<std::int64_t>((patches + config.batch_size - 1) / config.batch_size);
	const bool one_epoch = tuned.epochs == 1 && tuned.visit_order.size() == patches && unique.size() == patches &&
						   tuned.iterations == expected_iterations;
	fs::remove_all(scratch("scenario_a"));
	fs::remove_all(scratch("scenario_b"));
	return {s1 && s2 && frozen && one_epoch,
			fmt("S1 sources %s; S2 sources %s; %zu normalization tensors %s; %zu patches once in %lld iterations",
				s1 ? "ground_truth" : "WRONG", s2 ? "generated" : "WRONG", before.size(),
				frozen ? "bit-identical" : "CHANGED", tuned.visit_order.size(),
				static_cast<long long>(tuned.iterations))};
}

Outcome inference_pipeline()
{
	std::mt19937_64 rng(108);
	int tile_failures = 0;
	const std::vector<std::pair<int, int>> sizes{{128, 1024}, {300, 1100}, {77, 2050}, {129, 1023}, {1, 1}};
	for (const auto& [h, w] : sizes)
		for (bool overlap : {false, true}) {
			const LineImage page = oracle::random_gray(rng, h, w);
			const auto grid = make_grid(h, w, overlap);
			const PatchEnhancer identity = [](const std::vector<LineImage>& p) { return p; };
			tile_failures += !(stitch(grid, identity(tile_page(page, grid))) == page);
		}

	int vote_failures = 0;
	std::uniform_real_distribution<double> density(0.0, 1.0);
	for (int trial = 0; trial < 1000; ++trial) {
		const int h = 1 + static_cast<int>(rng() % 12), w = 1 + static_cast<int>(rng() % 12);
		const BinaryImage a = oracle::random_binary(rng, h, w, density(rng));
		const BinaryImage b = oracle::random_binary(rng, h, w, density(rng));
		const BinaryImage ab = flip_vote(a, b);
		bool ok = ab == flip_vote(b, a) && flip_vote(a, a) == a && flip_vote(ab, b) == ab;
		for (int r = 0; ok && r < h; ++r)
			for (int c = 0; c < w; ++c)
				if (ab.is_ink(r, c) && !(a.is_ink(r, c) && b.is_ink(r, c)))
					ok = false;
		vote_failures += !ok;
	}
	return {tile_failures == 0 && vote_failures == 0,
			fmt("%zu tile/stitch round trips, %d failures; 1000 flip_vote pairs, %d failures", sizes.size() * 2,
				tile_failures, vote_failures)};
}

std::map<std::string, std::string> directory_bytes(const fs::path& root)
{
	std::map<std::string, std::string> out;
	for (const auto& entry : fs::recursive_directory_iterator(root))
		if (entry.is_regular_file()) {
			std::ifstream in(entry.path(), std::ios::binary);
			out[fs::relative(entry.path(), root).generic_string()] =
				std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
		}
	return out;
}

Outcome determinism()
{
	const auto first = toy::build_toy_corpus(scratch("det_a"), 9, 1);
	toy::build_toy_corpus(scratch("det_b"), 9, 2);
	const auto a = directory_bytes(scratch("det_a") / "corpus");
	const auto b = directory_bytes(scratch("det_b") / "corpus");
	const bool corpus_same = !a.empty() && a == b;

	TrainingConfig config = toy::toy_config();
	config.max_iterations = 10;
	config.checkpoint_every = 10;
	auto trace = [&] {
		std::vector<double> out;
		for (const auto& r : train(first, config).reports)
			for (double v : {r.loss_d, r.loss_g_total, r.loss_g_adv, r.loss_ctc, r.loss_bce, r.loss_r})
				out.push_back(v);
		return out;
	};
	const auto t1 = trace(), t2 = trace();
	const bool trace_same = !t1.empty() && t1 == t2;
	fs::remove_all(scratch("det_a"));
	fs::remove_all(scratch("det_b"));
	return {corpus_same && trace_same, fmt("%zu corpus files %s (1 vs 2 jobs); %zu loss values %s", a.size(),
										   corpus_same ? "byte-identical" : "DIFFER", t1.size(),
										   trace_same ? "identical" : "DIFFER")};
}

Outcome baselines()
{
	std::mt19937_64 rng(110);
	int otsu_failures = 0;
	for (int trial = 0; trial < 50; ++trial) {
		const LineImage img = oracle::random_gray(rng, 8 + static_cast<int>(rng() % 24), 8 + static_cast<int>(rng() % 24));
		std::vector<int> bytes;
		for (float v : img.values())
			bytes.push_back(static_cast<int>(std::lround(v * 255.0f)));
		const int t = oracle::otsu_exhaustive(bytes);
		BinaryImage expected(img.height(), img.width());
		for (int r = 0; r < img.height(); ++r)
			for (int c = 0; c < img.width(); ++c)
				expected.set(r, c, bytes[static_cast<std::size_t>(r) * img.width() + c] <= t ? 0 : 1);
		otsu_failures += !(otsu_binarize(img) == expected);
	}
	int sauvola_failures = 0;
	for (int trial = 0; trial < 10; ++trial) {
		const LineImage img = oracle::random_gray(rng, 20 + static_cast<int>(rng() % 40), 30 + static_cast<int>(rng() % 60));
		sauvola_failures += !(sauvola_binarize(img, 25, 0.2) == oracle::sauvola_direct(img, 25, 0.2));
	}
	return {otsu_failures == 0 && sauvola_failures == 0,
			fmt("otsu 50 images, %d mismatches; sauvola 10 images (window 25, k 0.2), %d mismatches", otsu_failures,
				sauvola_failures)};
}

} // namespace

int main()
{
	torch::set_num_threads(1);
	const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
		{"CTC oracle equivalence", ctc_oracle},
		{"gradient checks", gradient_checks},
		{"metric oracles", metric_oracles},
		{"avg-score table", score_table},
		{"shape contracts", shape_contracts},
		{"toy overfit", toy_overfit},
		{"scenario contracts", scenario_contracts},
		{"inference pipeline", inference_pipeline},
		{"determinism", determinism},
		{"baselines", baselines},
	};
	int failed = 0;
	for (std::size_t i = 0; i < criteria.size(); ++i) {
		Outcome o;
		try {
			o = criteria[i].second();
		} catch (const std::exception& e) {
			o = {false, std::string("exception: ") + e.what()};
		}
		failed += !o.pass;
		std::printf("criterion %2zu %-24s %s  %s\n", i + 1, criteria[i].first.c_str(), o.pass ? "PASS" : "FAIL",
					o.detail.c_str());
		std::fflush(stdout);
	}
	std::printf("%zu/%zu criteria passed\n", criteria.size() - failed, criteria.size());
	return failed == 0 ? 0 : 1;
}

/*
 * Copyright 2026 The docenh Authors
 */
// SPDX-License-Identifier: Apache-2.0

#include "docenh/checkpoint.hpp"
#include "docenh/errors.hpp"
#include "docenh/training.hpp"
#include "oracles.hpp"
#include "toy_corpus.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <set>

using namespace docenh;
namespace fs = std::filesystem;

namespace {

TrainingConfig quick_config()
{
	auto c = toy::toy_config();
	c.batch_size = 4;
	c.max_iterations = 6;
	c.checkpoint_every = 3;
	return c;
}

ModelBundle bundle_for(const TrainingConfig& c, const Charset& cs)
{
	return ModelBundle::create(c.generator, c.discriminator, c.recognizer, cs, c.seed);
}

Batch random_batch(std::mt19937_64& rng, int n, const std::vector<std::vector<int>>& labels)
{
	std::vector<LineImage> d, g;
	for (int i = 0; i < n; ++i) {
		d.push_back(oracle::random_gray(rng, toy::kHeight, toy::kWidth));
		g.push_back(oracle::random_gray(rng, toy::kHeight, toy::kWidth));
	}
	return Batch{to_tensor(d), to_tensor(g), labels};
}

const CorpusManifest& shared_corpus()
{
	static const CorpusManifest m = toy::build_toy_corpus(fs::temp_directory_path() / "docenh_train_corpus");
	return m;
}

bool same_reports(const IterationReport& a, const IterationReport& b)
{
	return a.iteration == b.iteration && a.loss_d == b.loss_d && a.loss_g_total == b.loss_g_total &&
		   a.loss_g_adv == b.loss_g_adv && a.loss_ctc == b.loss_ctc && a.loss_bce == b.loss_bce &&
		   a.loss_r == b.loss_r && a.recognizer_source == b.recognizer_source;
}

} // namespace

TEST_CASE("training config JSON")
{
	const auto c = toy::toy_config();
	const auto again = training_config_from_json(to_json(c));
	CHECK(to_json(again) == to_json(c));
	CHECK(config_hash(again) == config_hash(c));
	auto other = c;
	other.seed += 1;
	CHECK(config_hash(other) != config_hash(c));

	CHECK_THROWS_AS(training_config_from_json(nlohmann::json{{"batch_sise", 4}}), ConfigError);
	CHECK_THROWS_AS(training_config_from_json(nlohmann::json{{"optimizer_g", {{"lr", 0.0}}}}), ConfigError);
	CHECK_THROWS_AS(training_config_from_json(nlohmann::json{{"scenario", "S3"}}), ConfigError);
	CHECK_THROWS_AS(training_config_from_json(nlohmann::json{{"image_height", 100}}), ConfigError);
	CHECK_THROWS_AS(training_config_from_json(nlohmann::json{{"weights", {{"ctc", -1.0}}}}), ConfigError);
	const auto defaults = training_config_from_json(nlohmann::json::object());
	CHECK(defaults.weights.ctc == 1.0);
	CHECK(defaults.weights.bce == 10.0);
	CHECK(defaults.optimizer_g.lr == 2e-4);
	CHECK(defaults.optimizer_r.lr == 1e-4);
	for (double lambda : {0.5, 1.0, 5.0, 10.0, 20.0})
		CHECK_NOTHROW(training_config_from_json(nlohmann::json{{"weights", {{"ctc", lambda}}}}));
}

TEST_CASE("sample stream visits every sample once per epoch")
{
	SampleStream a(7, 5), b(7, 5);
	for (std::uint64_t epoch = 0; epoch < 4; ++epoch) {
		std::set<std::size_t> seen;
		for (std::uint64_t i = 0; i < 5; ++i)
			seen.insert(a.at(epoch * 5 + i));
		CHECK(seen.size() == 5);
	}
	for (std::uint64_t p : {13u, 2u, 19u, 0u})
		CHECK(a.at(p) == b.at(p));
}

TEST_CASE("each stage updates only its own network")
{
	const auto c = quick_config();
	const Charset cs(U"abc");
	for (auto scenario : {Scenario::S1, Scenario::S2}) {
		auto cfg = c;
		cfg.scenario = scenario;
		Trainer t(bundle_for(cfg, cs), cfg);
		std::mt19937_64 rng(4);
		const Batch batch = random_batch(rng, 2, {{0, 1}, {2}});

		struct Hashes
		{
			std::uint64_t g, d, r;
		};
		auto snapshot = [](const ModelBundle& b) {
			return Hashes{hash_module(*b.generator), hash_module(*b.discriminator), hash_module(*b.recognizer)};
		};
		Hashes prev = snapshot(t.bundle());
		std::vector<Stage> stages;
		t.set_stage_observer([&](const StageEvent& e) {
			const Hashes now = snapshot(e.bundle);
			stages.push_back(e.stage);
			switch (e.stage) {
			case Stage::Generate: // only G's normalization statistics may move
				CHECK(now.d == prev.d);
				CHECK(now.r == prev.r);
				break;
			case Stage::Discriminator:
				CHECK(now.g == prev.g);
				CHECK(now.d != prev.d);
				CHECK(now.r == prev.r);
				break;
			case Stage::Recognizer:
				CHECK(now.g == prev.g);
				CHECK(now.d == prev.d);
				CHECK(now.r != prev.r);
				REQUIRE(e.recognizer_input != nullptr);
				if (scenario == Scenario::S1)
					CHECK(torch::equal(*e.recognizer_input, batch.gt));
				else
					CHECK(torch::equal(*e.recognizer_input, e.generated.detach()));
				break;
			case Stage::Generator:
				CHECK(now.g != prev.g);
				CHECK(now.d == prev.d);
				CHECK(now.r == prev.r);
				break;
			}
			prev = now;
		});
		const auto rep = t.train_step(batch);
		CHECK((stages == std::vector<Stage>{Stage::Generate, Stage::Discriminator, Stage::Recognizer, Stage::Generator}));
		CHECK(rep.recognizer_source ==
			  (scenario == Scenario::S1 ? RecognizerSource::GroundTruth : RecognizerSource::Generated));
		CHECK(t.iteration() == 1);
	}
}

TEST_CASE("zero CTC weight keeps the recognizer out of the generator update")
{
	auto cfg = quick_config();
	cfg.weights = LossWeights{0.0, 10.0};
	const Charset cs(U"abc");
	const auto base = bundle_for(cfg, cs);
	auto perturbed = base.clone();
	{
		torch::NoGradGuard guard;
		for (auto& p : perturbed.recognizer->parameters())
			p.mul_(1.5);
	}
	Trainer a(base.clone(), cfg), b(std::move(perturbed), cfg);
	std::mt19937_64 r1(5), r2(5);
	const auto ra = a.train_step(random_batch(r1, 2, {{0}, {1, 2}}));
	const auto rb = b.train_step(random_batch(r2, 2, {{0}, {1, 2}}));
	CHECK(std::isfinite(ra.loss_ctc));
	CHECK(ra.loss_ctc != rb.loss_ctc);
	CHECK(hash_module(*a.bundle().generator) == hash_module(*b.bundle().generator));
	CHECK(ra.loss_g_total == doctest::Approx(ra.loss_g_adv + 10.0 * ra.loss_bce));
}

TEST_CASE("infeasible CTC samples are skipped and counted")
{
	const auto cfg = quick_config();
	Trainer t(bundle_for(cfg, Charset(U"ab")), cfg);
	std::mt19937_64 rng(6);
	// 16 frames cannot emit 9 copies of the same label (17 frames needed).
	const std::vector<int> too_long(9, 0);
	const auto rep = t.train_step(random_batch(rng, 2, {too_long, {1}}));
	CHECK(rep.ctc_skipped == 1);
	CHECK(std::isfinite(rep.loss_r));

	const auto none = t.train_step(random_batch(rng, 1, {too_long}));
	CHECK(none.ctc_skipped == 1);
	CHECK(std::isinf(none.loss_r));
}

TEST_CASE("identical seeds give identical loss traces")
{
	const auto& m = shared_corpus();
	auto cfg = quick_config();
	cfg.max_iterations = 4;
	cfg.checkpoint_every = 100;
	const auto a = train(m, cfg);
	const auto b = train(m, cfg);
	REQUIRE(a.reports.size() == 4);
	for (std::size_t i = 0; i < a.reports.size(); ++i)
		REQUIRE(same_reports(a.reports[i], b.reports[i]));
	CHECK(hash_module(*a.best.generator) == hash_module(*b.best.generator));
}

TEST_CASE("resume continues exactly where the checkpoint stopped")
{
	const auto& m = shared_corpus();
	const fs::path root = fs::temp_directory_path() / "docenh_resume_test";
	fs::remove_all(root);
	auto cfg = quick_config();

	TrainOptions full_opts;
	full_opts.output_dir = root / "full";
	const auto full = train(m, cfg, full_opts);
	REQUIRE(full.reports.size() == 6);

	auto first_cfg = cfg;
	first_cfg.max_iterations = 3;
	TrainOptions first_opts;
	first_opts.output_dir = root / "split";
	train(m, first_cfg, first_opts);

	TrainOptions resumed_opts;
	resumed_opts.output_dir = root / "split";
	resumed_opts.resume_from = root / "split" / "checkpoints" / "last.ckpt";
	const auto resumed = train(m, cfg, resumed_opts);
	REQUIRE(resumed.reports.size() == 3);
	for (std::size_t i = 0; i < 3; ++i)
		REQUIRE(same_reports(resumed.reports[i], full.reports[i + 3]));

	const auto a = load_checkpoint(root / "full" / "checkpoints" / "last.ckpt");
	const auto b = load_checkpoint(root / "split" / "checkpoints" / "last.ckpt");
	CHECK(hash_module(*a.bundle.generator) == hash_module(*b.bundle.generator));
	CHECK(hash_module(*a.bundle.recognizer) == hash_module(*b.bundle.recognizer));

	std::ifstream reports(root / "split" / "reports.jsonl");
	int lines = 0;
	for (std::string line; std::getline(reports, line);)
		++lines;
	CHECK(lines == 6);

	auto changed = cfg;
	changed.optimizer_g.lr *= 2;
	CHECK_THROWS_AS(train(m, changed, resumed_opts), ConfigError);
	fs::remove_all(root);
}

TEST_CASE("best bundle has the lowest validation CER")
{
	const auto& m = shared_corpus();
	auto cfg = quick_config();
	cfg.max_iterations = 6;
	cfg.checkpoint_every = 2;
	const auto r = train(m, cfg);
	REQUIRE(r.checkpoints.size() == 3);
	REQUIRE(r.best.provenance.validation_cer.has_value());
	for (const auto& ck : r.checkpoints)
		CHECK(*r.best.provenance.validation_cer <= ck.validation.cer);
	CHECK(r.best.provenance.iteration == r.best_iteration);
}

TEST_CASE("train rejects corpora without a valid split")
{
	const auto& m = shared_corpus();
	std::vector<ManifestRecord> only_train = m.records(Split::Train);
	const CorpusManifest no_valid(m.root(), only_train);
	CHECK_THROWS_AS(train(no_valid, quick_config()), ConfigError);
}

TEST_CASE("fine_tune freezes generator normalization and runs one epoch")
{
	const fs::path root = fs::temp_directory_path() / "docenh_finetune_test";
	fs::remove_all(root);
	fs::create_directories(root / "a");
	fs::create_directories(root / "b");
	std::mt19937_64 rng(12);
	auto page = [&](const fs::path& dir, const std::string& id, int h, int w) {
		const auto gt = oracle::random_binary(rng, h, w, 0.2);
		write_png(dir / (id + "_gt.png"), gt);
		write_png(dir / (id + ".png"), oracle::random_gray(rng, h, w));
		ManifestRecord r;
		r.id = id;
		r.clean_path = id + "_gt.png";
		r.degraded_path = fs::path(id + ".png");
		r.split = Split::Test;
		return r;
	};
	const CorpusManifest ma(root / "a", {page(root / "a", "p1", 40, 150), page(root / "a", "p2", 20, 100)});
	const CorpusManifest mb(root / "b", {page(root / "b", "q1", 60, 60), page(root / "b", "q2", 30, 200)});

	auto cfg = quick_config();
	cfg.batch_size = 3;
	cfg.max_iterations = 50;
	auto bundle = bundle_for(cfg, Charset(U"ab"));
	{
		// Non-default running statistics make the freeze observable.
		bundle.train();
		torch::NoGradGuard guard;
		bundle.generator->forward(torch::rand({2, 1, 32, 128}));
	}
	const auto before = normalization_state(*bundle.generator);
	const auto g_before = hash_module(*bundle.generator);
	const auto r_before = hash_module(*bundle.recognizer);

	const auto result = fine_tune(bundle.clone(), {ma, mb}, cfg);
	const auto after = normalization_state(*result.bundle.generator);
	REQUIRE(before.size() == after.size());
	REQUIRE(!before.empty());
	for (std::size_t i = 0; i < before.size(); ++i)
		CHECK(torch::equal(before[i], after[i]));
	CHECK(hash_module(*result.bundle.generator) != g_before);
	CHECK(hash_module(*result.bundle.recognizer) == r_before);

	// p1: 2x2 patches, p2: 1x1, q1: 2x1, q2: 1x2 at 32x128.
	const std::size_t patches = 4 + 1 + 2 + 2;
	CHECK(result.epochs == 1);
	CHECK(result.visit_order.size() == patches);
	CHECK(std::set<std::string>(result.visit_order.begin(), result.visit_order.end()).size() == patches);
	CHECK(result.iterations == 3);
	CHECK(result.reports.size() == 3);
	for (const auto& rep : result.reports)
		CHECK(rep.recognizer_source == RecognizerSource::None);
	// Manifests are mixed rather than visited one after the other.
	std::vector<char> sources;
	for (const auto& key : result.visit_order)
		sources.push_back(key[0]);
	CHECK_FALSE(std::is_sorted(sources.begin(), sources.end()));

	auto missing = ma.records();
	missing[0].degraded_path.reset();
	CHECK_THROWS_AS(fine_tune(bundle.clone(), {CorpusManifest(root / "a", missing)}, cfg), ConfigError);
	fs::remove_all(root);
}

/*
 * Copyright 2026 The docenh Authors
 */
// SPDX-License-Identifier: Apache-2.0

#include "docenh/training.hpp"

#include "docenh/checkpoint.hpp"
#include "docenh/errors.hpp"
#include "docenh/inference.hpp"
#include "docenh/loss_bridge.hpp"
#include "docenh/metrics.hpp"
#include "docenh/png_io.hpp"
#include "docenh/text.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <random>

namespace docenh {

using nlohmann::json;
namespace fs = std::filesystem;

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string to_string(Scenario s)
{
	return s == Scenario::S1 ? "S1" : "S2";
}

std::string to_string(RecognizerSource s)
{
	switch (s) {
	case RecognizerSource::GroundTruth:
		return "ground_truth";
	case RecognizerSource::Generated:
		return "generated";
	case RecognizerSource::None:
		break;
	}
	return "none";
}

Scenario parse_scenario(const std::string& s)
{
	if (s == "S1" || s == "s1")
		return Scenario::S1;
	if (s == "S2" || s == "s2")
		return Scenario::S2;
	throw ConfigError("unknown scenario '" + s + "' (expected S1 or S2)");
}

void TrainingConfig::validate() const
{
	weights.validate();
	for (const auto* a : {&optimizer_g, &optimizer_d})
		if (!(a->lr > 0) || a->beta1 < 0 || a->beta1 >= 1 || a->beta2 < 0 || a->beta2 >= 1)
			throw ConfigError("Adam settings need lr > 0 and betas in [0, 1)");
	if (!(optimizer_r.lr > 0) || optimizer_r.decay < 0 || optimizer_r.decay >= 1)
		throw ConfigError("RMSProp settings need lr > 0 and decay in [0, 1)");
	if (batch_size < 1)
		throw ConfigError("batch_size must be >= 1");
	if (max_iterations < 1)
		throw ConfigError("max_iterations must be >= 1");
	if (checkpoint_every < 1)
		throw ConfigError("checkpoint_every must be >= 1");
	if (recognizer_pretrain_iterations < 0)
		throw ConfigError("recognizer_pretrain_iterations must be >= 0");
	constexpr int f = GeneratorSpec::downsample_factor();
	if (image_height < f || image_height % f != 0 || image_width < f || image_width % f != 0)
		throw ConfigError("image_height and image_width must be positive multiples of " + std::to_string(f));
	generator.validate();
	discriminator.validate();
	RecognizerSpec r = recognizer;
	r.class_count = std::max(r.class_count, 2);
	r.validate();
}

namespace {

json adam_json(const AdamSettings& a)
{
	return json{{"lr", a.lr}, {"beta1", a.beta1}, {"beta2", a.beta2}};
}

AdamSettings adam_from(const json& j, AdamSettings a)
{
	a.lr = j.value("lr", a.lr);
	a.beta1 = j.value("beta1", a.beta1);
	a.beta2 = j.value("beta2", a.beta2);
	return a;
}

std::string form_name(AdversarialForm f)
{
	return f == AdversarialForm::NonSaturating ? "non_saturating" : "saturating";
}

AdversarialForm parse_form(const std::string& s)
{
	if (s == "non_saturating")
		return AdversarialForm::NonSaturating;
	if (s == "saturating")
		return AdversarialForm::Saturating;
	throw ConfigError("unknown adversarial_form '" + s + "'");
}

SelectionMetric parse_selection(const std::string& s)
{
	if (s == "cer")
		return SelectionMetric::Cer;
	if (s == "psnr")
		return SelectionMetric::Psnr;
	throw ConfigError("unknown selection metric '" + s + "' (expected cer or psnr)");
}

const char* const kConfigKeys[] = {"scenario",
								   "weights",
								   "adversarial_form",
								   "optimizer_g",
								   "optimizer_d",
								   "optimizer_r",
								   "batch_size",
								   "max_iterations",
								   "seed",
								   "checkpoint_every",
								   "recognizer_pretrain_iterations",
								   "selection",
								   "image_height",
								   "image_width",
								   "generator",
								   "discriminator",
								   "recognizer"};

} // namespace

json to_json(const TrainingConfig& c)
{
	json r = to_json(c.recognizer);
	r.erase("class_count");
	return json{{"scenario", to_string(c.scenario)},
				{"weights", {{"ctc", c.weights.ctc}, {"bce", c.weights.bce}}},
				{"adversarial_form", form_name(c.adversarial_form)},
				{"optimizer_g", adam_json(c.optimizer_g)},
				{"optimizer_d", adam_json(c.optimizer_d)},
				{"optimizer_r", {{"lr", c.optimizer_r.lr}, {"decay", c.optimizer_r.decay}}},
				{"batch_size", c.batch_size},
				{"max_iterations", c.max_iterations},
				{"seed", c.seed},
				{"checkpoint_every", c.checkpoint_every},
				{"recognizer_pretrain_iterations", c.recognizer_pretrain_iterations},
				{"selection", c.selection == SelectionMetric::Cer ? "cer" : "psnr"},
				{"image_height", c.image_height},
				{"image_width", c.image_width},
				{"generator", to_json(c.generator)},
				{"discriminator", to_json(c.discriminator)},
				{"recognizer", r}};
}

TrainingConfig training_config_from_json(const json& j)
{
	if (!j.is_object())
		throw ConfigError("training config must be a JSON object");
	for (const auto& item : j.items())
		if (std::find(std::begin(kConfigKeys), std::end(kConfigKeys), item.key()) == std::end(kConfigKeys))
			throw ConfigError("unknown training config key '" + item.key() + "'");
	TrainingConfig c;
	try {
		if (j.contains("scenario"))
			c.scenario = parse_scenario(j.at("scenario").get<std::string>());
		if (j.contains("weights")) {
			c.weights.ctc = j.at("weights").value("ctc", c.weights.ctc);
			c.weights.bce = j.at("weights").value("bce", c.weights.bce);
		}
		if (j.contains("adversarial_form"))
			c.adversarial_form = parse_form(j.at("adversarial_form").get<std::string>());
		if (j.contains("optimizer_g"))
			c.optimizer_g = adam_from(j.at("optimizer_g"), c.optimizer_g);
		if (j.contains("optimizer_d"))
			c.optimizer_d = adam_from(j.at("optimizer_d"), c.optimizer_d);
		if (j.contains("optimizer_r")) {
			c.optimizer_r.lr = j.at("optimizer_r").value("lr", c.optimizer_r.lr);
			c.optimizer_r.decay = j.at("optimizer_r").value("decay", c.optimizer_r.decay);
		}
		c.batch_size = j.value("batch_size", c.batch_size);
		c.max_iterations = j.value("max_iterations", c.max_iterations);
		c.seed = j.value("seed", c.seed);
		c.checkpoint_every = j.value("checkpoint_every", c.checkpoint_every);
		c.recognizer_pretrain_iterations = j.value("recognizer_pretrain_iterations", c.recognizer_pretrain_iterations);
		if (j.contains("selection"))
			c.selection = parse_selection(j.at("selection").get<std::string>());
		c.image_height = j.value("image_height", c.image_height);
		c.image_width = j.value("image_width", c.image_width);
		if (j.contains("generator"))
			c.generator = generator_spec_from_json(j.at("generator"));
		if (j.contains("discriminator"))
			c.discriminator = discriminator_spec_from_json(j.at("discriminator"));
		if (j.contains("recognizer"))
			c.recognizer = recognizer_spec_from_json(j.at("recognizer"));
	} catch (const json::exception& e) {
		throw ConfigError(std::string("training config: ") + e.what());
	}
	c.validate();
	return c;
}

TrainingConfig load_training_config(const fs::path& file)
{
	std::ifstream in(file);
	if (!in)
		throw ConfigError("cannot open training config " + file.string());
	try {
		return training_config_from_json(json::parse(in));
	} catch (const json::parse_error& e) {
		throw ConfigError("training config " + file.string() + ": " + e.what());
	}
}

std::string config_hash(const TrainingConfig& c)
{
	return hex64(fnv1a64(to_json(c).dump()));
}

namespace {

// Hash of everything that must not change across a resume.
std::string resume_hash(const TrainingConfig& c)
{
	json j = to_json(c);
	j.erase("max_iterations");
	j.erase("checkpoint_every");
	return hex64(fnv1a64(j.dump()));
}

} // namespace

std::vector<LineSample> load_line_samples(const CorpusManifest& manifest, Split split, const Charset& charset,
										  int height, int width)
{
	std::vector<LineSample> out;
	for (const auto& r : manifest.records(split)) {
		if (!r.degraded_path)
			throw ConfigError("record '" + r.id + "' has no degraded image; build the corpus first");
		LineSample s;
		s.id = r.id;
		s.degraded = normalize_to_model_size(read_png(manifest.resolve(*r.degraded_path)), height, width);
		s.gt = normalize_to_model_size(read_png(manifest.resolve(r.clean_path)), height, width);
		s.text = r.text;
		s.labels = encode_transcription(r.text, charset);
		out.push_back(std::move(s));
	}
	return out;
}

Batch make_batch(const std::vector<LineSample>& samples, const std::vector<std::size_t>& indices)
{
	std::vector<LineImage> degraded, gt;
	Batch b;
	for (std::size_t i : indices) {
		degraded.push_back(samples.at(i).degraded);
		gt.push_back(samples.at(i).gt);
		b.labels.push_back(samples.at(i).labels);
	}
	b.degraded = to_tensor(degraded);
	b.gt = to_tensor(gt);
	return b;
}

SampleStream::SampleStream(std::uint64_t seed, std::size_t count) : seed_(seed), count_(count)
{
	if (count == 0)
		throw ConfigError("cannot draw batches from an empty split");
}

std::size_t SampleStream::at(std::uint64_t position)
{
	const std::uint64_t epoch = position / count_;
	if (epoch != epoch_) {
		order_.resize(count_);
		std::iota(order_.begin(), order_.end(), std::size_t{0});
		std::mt19937_64 rng(mix64(seed_ ^ mix64(epoch)));
		std::shuffle(order_.begin(), order_.end(), rng);
		epoch_ = epoch;
	}
	return order_[position % count_];
}

json to_json(const IterationReport& r)
{
	auto num = [](double v) { return std::isfinite(v) ? json(v) : json(nullptr); };
	return json{{"iteration", r.iteration},
				{"loss_D", num(r.loss_d)},
				{"loss_G_total", num(r.loss_g_total)},
				{"loss_G_adv", num(r.loss_g_adv)},
				{"loss_ctc", num(r.loss_ctc)},
				{"loss_bce", num(r.loss_bce)},
				{"loss_R", num(r.loss_r)},
				{"recognizer_source", to_string(r.recognizer_source)},
				{"ctc_skipped", r.ctc_skipped}};
}

Trainer::Trainer(ModelBundle bundle, TrainingConfig config) : bundle_(std::move(bundle)), config_(std::move(config))
{
	config_.validate();
	if (bundle_.recognizer_spec.class_count != bundle_.charset.class_count())
		throw ContractError("recognizer class count does not match the charset");
	using namespace torch::optim;
	const auto& g = config_.optimizer_g;
	const auto& d = config_.optimizer_d;
	opt_g_ = std::make_unique<Adam>(bundle_.generator->parameters(),
									AdamOptions(g.lr).betas({g.beta1, g.beta2}));
	opt_d_ = std::make_unique<Adam>(bundle_.discriminator->parameters(),
									AdamOptions(d.lr).betas({d.beta1, d.beta2}));
	opt_r_ = std::make_unique<RMSprop>(bundle_.recognizer->parameters(),
									   RMSpropOptions(config_.optimizer_r.lr).alpha(config_.optimizer_r.decay));
}

void Trainer::seed_iteration() const
{
	torch::manual_seed(mix64(config_.seed ^ mix64(static_cast<std::uint64_t>(iteration_) + 1)));
}

void Trainer::notify(Stage stage, const torch::Tensor& generated, const torch::Tensor* recognizer_input) const
{
	if (observer_)
		observer_(StageEvent{stage, bundle_, generated, recognizer_input});
}

IterationReport Trainer::train_step(const Batch& batch)
{
	if (batch.degraded.size(0) != static_cast<long>(batch.labels.size()) ||
		!batch.degraded.sizes().equals(batch.gt.sizes()))
		throw ContractError("train_step: batch tensors and labels disagree");
	seed_iteration();
	bundle_.train();
	auto& G = bundle_.generator;
	auto& D = bundle_.discriminator;
	auto& R = bundle_.recognizer;
	const int blank = bundle_.charset.blank_index();

	IterationReport rep;
	rep.iteration = iteration_;
	rep.recognizer_source =
		config_.scenario == Scenario::S1 ? RecognizerSource::GroundTruth : RecognizerSource::Generated;

	const torch::Tensor fake = G->forward(batch.degraded);
	notify(Stage::Generate, fake);

	// Discriminator: generator output enters as a constant.
	opt_d_->zero_grad();
	const auto loss_d =
		ops::discriminator_loss(D->forward(batch.degraded, batch.gt), D->forward(batch.degraded, fake.detach()));
	loss_d.backward();
	opt_d_->step();
	rep.loss_d = loss_d.item<double>();
	notify(Stage::Discriminator, fake);

	// Recognizer on GT (S1) or on this iteration's generator output (S2).
	const torch::Tensor r_input = config_.scenario == Scenario::S1 ? batch.gt : fake.detach();
	opt_r_->zero_grad();
	const auto r_ctc = ops::ctc_loss(R->forward(r_input), batch.labels, blank);
	rep.ctc_skipped = r_ctc.skipped;
	if (r_ctc.loss.defined()) {
		r_ctc.loss.backward();
		opt_r_->step();
		rep.loss_r = r_ctc.loss.item<double>();
	} else {
		rep.loss_r = kInf;
	}
	notify(Stage::Recognizer, fake, &r_input);

	// Generator, with D and R frozen in evaluation mode.
	D->eval();
	R->eval();
	opt_g_->zero_grad();
	const auto adv = ops::generator_adversarial_loss(D->forward(batch.degraded, fake), config_.adversarial_form);
	const auto bce = ops::pixel_bce(fake, batch.gt);
	const auto ctc = ops::ctc_loss(R->forward(fake), batch.labels, blank);
	torch::Tensor total = adv + config_.weights.bce * bce;
	if (config_.weights.ctc > 0 && ctc.loss.defined())
		total = total + config_.weights.ctc * ctc.loss;
	total.backward();
	opt_g_->step();
	D->zero_grad();
	R->zero_grad();
	D->train();
	R->train();

	rep.loss_g_adv = adv.item<double>();
	rep.loss_bce = bce.item<double>();
	rep.loss_ctc = ctc.loss.defined() ? ctc.loss.item<double>() : kInf;
	rep.loss_g_total = total.item<double>();
	notify(Stage::Generator, fake);
	++iteration_;
	return rep;
}

double Trainer::pretrain_recognizer_step(const Batch& batch)
{
	torch::manual_seed(mix64(config_.seed ^ fnv1a64("pretrain") ^ static_cast<std::uint64_t>(iteration_)));
	auto& R = bundle_.recognizer;
	R->train();
	opt_r_->zero_grad();
	const auto ctc = ops::ctc_loss(R->forward(batch.gt), batch.labels, bundle_.charset.blank_index());
	if (!ctc.loss.defined())
		return kInf;
	ctc.loss.backward();
	opt_r_->step();
	return ctc.loss.item<double>();
}

void Trainer::save(const fs::path& file, const json& metadata) const
{
	ModelBundle snapshot = bundle_;
	snapshot.provenance.iteration = iteration_;
	snapshot.provenance.config_hash = config_hash(config_);
	snapshot.provenance.scenario = to_string(config_.scenario);
	CheckpointExtras extras;
	extras.metadata = metadata;
	extras.metadata["trainer"] = json{{"iteration", iteration_},
									  {"config_hash", config_hash(config_)},
									  {"resume_hash", resume_hash(config_)},
									  {"config", to_json(config_)}};
	extras.blobs["optimizer_g"] = serialize_optimizer(*opt_g_);
	extras.blobs["optimizer_d"] = serialize_optimizer(*opt_d_);
	extras.blobs["optimizer_r"] = serialize_optimizer(*opt_r_);
	save_checkpoint(file, snapshot, extras);
}

Trainer Trainer::resume(const fs::path& file, const TrainingConfig& config, json* metadata)
{
	auto loaded = load_checkpoint(file);
	const auto& meta = loaded.extras.metadata;
	if (!meta.contains("trainer"))
		throw ConfigError(file.string() + " holds no trainer state");
	if (meta["trainer"].value("resume_hash", "") != resume_hash(config))
		throw ConfigError(file.string() + " was written under a different training configuration");
	Trainer t(std::move(loaded.bundle), config);
	for (const auto& [name, opt] :
		 std::initializer_list<std::pair<const char*, torch::optim::Optimizer*>>{
			 {"optimizer_g", t.opt_g_.get()}, {"optimizer_d", t.opt_d_.get()}, {"optimizer_r", t.opt_r_.get()}}) {
		const auto it = loaded.extras.blobs.find(name);
		if (it == loaded.extras.blobs.end())
			throw ConfigError(file.string() + " lacks " + name + " state");
		deserialize_optimizer(*opt, it->second);
	}
	t.iteration_ = meta["trainer"].at("iteration").get<std::int64_t>();
	if (metadata)
		*metadata = meta;
	return t;
}

ValidationResult evaluate_lines(const ModelBundle& bundle, const std::vector<LineSample>& samples, int batch_size)
{
	ValidationResult v;
	if (samples.empty())
		return v;
	std::vector<RecognitionRecord> records;
	double psnr_sum = 0.0;
	for (std::size_t start = 0; start < samples.size(); start += static_cast<std::size_t>(batch_size)) {
		const std::size_t end = std::min(samples.size(), start + static_cast<std::size_t>(batch_size));
		std::vector<LineImage> degraded;
		for (std::size_t i = start; i < end; ++i)
			degraded.push_back(samples[i].degraded);
		const auto enhanced = generate(bundle, degraded);
		const auto hyps = recognize(bundle, enhanced);
		for (std::size_t i = start; i < end; ++i) {
			psnr_sum += psnr(enhanced[i - start], samples[i].gt);
			records.push_back(evaluate_recognition(samples[i].id, samples[i].text, hyps[i - start]));
		}
	}
	const auto report = summarize(std::move(records));
	v.cer = report.cer;
	v.wer = report.wer;
	v.psnr = psnr_sum / static_cast<double>(samples.size());
	return v;
}

namespace {

bool better(const ValidationResult& a, const ValidationResult& b, SelectionMetric m)
{
	return m == SelectionMetric::Cer ? a.cer < b.cer : a.psnr > b.psnr;
}

json validation_json(const ValidationResult& v)
{
	return json{{"cer", v.cer}, {"wer", v.wer}, {"psnr", v.psnr}};
}

ValidationResult validation_from(const json& j)
{
	return ValidationResult{j.at("cer").get<double>(), j.at("wer").get<double>(), j.at("psnr").get<double>()};
}

std::string iteration_name(std::int64_t it)
{
	char buf[32];
	std::snprintf(buf, sizeof buf, "iter_%08lld.ckpt", static_cast<long long>(it));
	return buf;
}

} // namespace

TrainResult train(const CorpusManifest& manifest, const TrainingConfig& config, const TrainOptions& options)
{
	config.validate();
	if (manifest.count(Split::Train) == 0)
		throw ConfigError("manifest has an empty train split");
	if (manifest.count(Split::Valid) == 0)
		throw ConfigError("manifest has an empty valid split");
	const Charset charset(manifest.charset());
	const auto train_set = load_line_samples(manifest, Split::Train, charset, config.image_height, config.image_width);
	const auto valid_set = load_line_samples(manifest, Split::Valid, charset, config.image_height, config.image_width);

	const bool on_disk = !options.output_dir.empty();
	const fs::path ckpt_dir = options.output_dir / "checkpoints";
	if (on_disk)
		fs::create_directories(ckpt_dir);

	TrainResult result;
	std::optional<ValidationResult> best_score;
	json meta;
	std::optional<Trainer> trainer;
	if (options.resume_from) {
		trainer.emplace(Trainer::resume(*options.resume_from, config, &meta));
		if (!(trainer->bundle().charset == charset))
			throw ConfigError("checkpoint charset differs from the manifest charset");
		if (meta.contains("best")) {
			best_score = validation_from(meta["best"]["validation"]);
			result.best_iteration = meta["best"]["iteration"].get<std::int64_t>();
			const fs::path best_file = options.resume_from->parent_path() / "best.ckpt";
			result.best = fs::exists(best_file) ? load_bundle(best_file) : trainer->bundle().clone();
		}
	} else {
		trainer.emplace(ModelBundle::create(config.generator, config.discriminator, config.recognizer, charset,
											config.seed),
						config);
	}

	std::ofstream report_file;
	if (on_disk) {
		report_file.open(options.output_dir / "reports.jsonl", options.resume_from ? std::ios::app : std::ios::trunc);
		std::ofstream(options.output_dir / "effective_config.json") << to_json(config).dump(2) << "\n";
	}

	const auto B = static_cast<std::uint64_t>(config.batch_size);
	if (trainer->iteration() == 0 && config.recognizer_pretrain_iterations > 0) {
		SampleStream pre(derive_seed(config.seed, "pretrain"), train_set.size());
		for (std::int64_t k = 0; k < config.recognizer_pretrain_iterations; ++k) {
			std::vector<std::size_t> idx;
			for (std::uint64_t j = 0; j < B; ++j)
				idx.push_back(pre.at(static_cast<std::uint64_t>(k) * B + j));
			trainer->pretrain_recognizer_step(make_batch(train_set, idx));
		}
	}

	SampleStream stream(derive_seed(config.seed, "train"), train_set.size());
	while (trainer->iteration() < config.max_iterations) {
		const auto it = static_cast<std::uint64_t>(trainer->iteration());
		std::vector<std::size_t> idx;
		for (std::uint64_t j = 0; j < B; ++j)
			idx.push_back(stream.at(it * B + j));
		const auto rep = trainer->train_step(make_batch(train_set, idx));
		result.reports.push_back(rep);
		if (report_file.is_open())
			report_file << to_json(rep).dump() << "\n" << std::flush;
		if (options.on_report)
			options.on_report(rep);

		const std::int64_t done = trainer->iteration();
		const bool stopping = options.stop_when && options.stop_when(trainer->bundle(), done);
		if (!stopping && done % config.checkpoint_every != 0 && done != config.max_iterations)
			continue;

		const auto v = evaluate_lines(trainer->bundle(), valid_set, config.batch_size);
		auto& prov = trainer->bundle().provenance;
		prov.iteration = done;
		prov.config_hash = config_hash(config);
		prov.scenario = to_string(config.scenario);
		prov.validation_cer = v.cer;
		prov.validation_psnr = v.psnr;
		const bool improved = !best_score || better(v, *best_score, config.selection);
		if (improved) {
			best_score = v;
			result.best_iteration = done;
			result.best = trainer->bundle().clone();
		}
		CheckpointRecord record{done, {}, v};
		if (on_disk) {
			record.path = ckpt_dir / iteration_name(done);
			save_checkpoint(record.path, trainer->bundle());
			if (improved)
				save_checkpoint(ckpt_dir / "best.ckpt", result.best);
			json m{{"best", {{"iteration", result.best_iteration}, {"validation", validation_json(*best_score)}}}};
			trainer->save(ckpt_dir / "last.ckpt", m);
		}
		result.checkpoints.push_back(record);
		if (options.log)
			*options.log << "iteration " << done << ": valid CER " << v.cer << " WER " << v.wer << " PSNR " << v.psnr
						 << (improved ? " (best)" : "") << "\n";
		if (stopping)
			break;
	}
	if (!result.best.generator)
		result.best = trainer->bundle().clone();
	return result;
}

namespace {

struct PatchPair
{
	std::string key;
	LineImage degraded;
	LineImage gt;
};

} // namespace

FineTuneResult fine_tune(ModelBundle bundle, const std::vector<CorpusManifest>& manifests,
						 const TrainingConfig& config, std::ostream* log)
{
	config.validate();
	if (manifests.empty())
		throw ConfigError("fine-tuning needs at least one manifest");

	std::vector<PatchPair> patches;
	for (std::size_t m = 0; m < manifests.size(); ++m) {
		for (const auto& r : manifests[m].records()) {
			if (!r.degraded_path)
				throw ConfigError("record '" + r.id + "' lacks a degraded image paired with its ground truth");
			const fs::path gt_path = manifests[m].resolve(r.clean_path);
			if (!fs::exists(gt_path))
				throw ConfigError("ground truth " + gt_path.string() + " for record '" + r.id + "' does not exist");
			const auto degraded = read_png(manifests[m].resolve(*r.degraded_path));
			const auto gt = read_png(gt_path);
			if (degraded.height() != gt.height() || degraded.width() != gt.width())
				throw ConfigError("record '" + r.id + "': degraded and ground-truth sizes differ");
			const auto grid = make_grid(gt.height(), gt.width(), false, config.image_height, config.image_width);
			auto dp = tile_page(degraded, grid);
			auto gp = tile_page(gt, grid);
			for (std::size_t k = 0; k < dp.size(); ++k)
				patches.push_back(PatchPair{std::to_string(m) + ":" + r.id + ":" + std::to_string(k),
											std::move(dp[k]), std::move(gp[k])});
		}
	}
	if (patches.empty())
		throw ConfigError("fine-tuning manifests hold no records");

	std::vector<std::size_t> order(patches.size());
	std::iota(order.begin(), order.end(), std::size_t{0});
	std::mt19937_64 rng(derive_seed(config.seed, "fine-tune"));
	std::shuffle(order.begin(), order.end(), rng);

	auto& G = bundle.generator;
	auto& D = bundle.discriminator;
	std::vector<torch::nn::BatchNorm2dImpl*> frozen;
	for (const auto& m : G->modules(false))
		if (auto* bn = m->as<torch::nn::BatchNorm2dImpl>())
			frozen.push_back(bn);
	std::vector<torch::Tensor> g_params;
	{
		std::vector<const torch::TensorImpl*> excluded;
		for (auto* bn : frozen)
			for (auto& p : bn->parameters())
				excluded.push_back(p.unsafeGetTensorImpl());
		for (auto& p : G->parameters())
			if (std::find(excluded.begin(), excluded.end(), p.unsafeGetTensorImpl()) == excluded.end())
				g_params.push_back(p);
	}
	for (auto* bn : frozen)
		for (auto& p : bn->parameters())
			p.set_requires_grad(false);

	using namespace torch::optim;
	Adam opt_g(g_params, AdamOptions(config.optimizer_g.lr).betas({config.optimizer_g.beta1, config.optimizer_g.beta2}));
	Adam opt_d(D->parameters(),
			   AdamOptions(config.optimizer_d.lr).betas({config.optimizer_d.beta1, config.optimizer_d.beta2}));

	FineTuneResult result;
	const auto B = static_cast<std::size_t>(config.batch_size);
	for (std::size_t start = 0; start < order.size(); start += B) {
		torch::manual_seed(mix64(config.seed ^ fnv1a64("fine-tune") ^ start));
		std::vector<LineImage> degraded, gt;
		for (std::size_t i = start; i < std::min(order.size(), start + B); ++i) {
			degraded.push_back(patches[order[i]].degraded);
			gt.push_back(patches[order[i]].gt);
			result.visit_order.push_back(patches[order[i]].key);
		}
		const auto xd = to_tensor(degraded), xg = to_tensor(gt);

		G->train();
		for (auto* bn : frozen)
			bn->eval();
		D->train();
		const auto fake = G->forward(xd);

		opt_d.zero_grad();
		const auto loss_d = ops::discriminator_loss(D->forward(xd, xg), D->forward(xd, fake.detach()));
		loss_d.backward();
		opt_d.step();

		D->eval();
		opt_g.zero_grad();
		const auto adv = ops::generator_adversarial_loss(D->forward(xd, fake), config.adversarial_form);
		const auto bce = ops::pixel_bce(fake, xg);
		const auto total = adv + config.weights.bce * bce;
		total.backward();
		opt_g.step();
		D->zero_grad();

		IterationReport rep;
		rep.iteration = result.iterations++;
		rep.loss_d = loss_d.item<double>();
		rep.loss_g_adv = adv.item<double>();
		rep.loss_bce = bce.item<double>();
		rep.loss_g_total = total.item<double>();
		rep.loss_ctc = 0.0;
		rep.loss_r = 0.0;
		rep.recognizer_source = RecognizerSource::None;
		result.reports.push_back(rep);
		if (log)
			*log << to_json(rep).dump() << "\n";
	}

	for (auto* bn : frozen)
		for (auto& p : bn->parameters())
			p.set_requires_grad(true);
	bundle.eval();
	bundle.provenance.iteration += result.iterations;
	result.bundle = std::move(bundle);
	return result;
}

} // namespace docenh

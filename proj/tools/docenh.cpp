/*
 * Copyright 2026 The docenh Authors
 */
// SPDX-License-Identifier: Apache-2.0

// docenh command line: corpus building, training, fine-tuning, page
// enhancement and evaluation.
//
// Exit status: 0 success, 1 runtime failure, 2 configuration error.
// Relative input paths that do not exist under the working directory are
// looked up under $DOCENH_DATA_ROOT when it is set.

#include "docenh/baselines.hpp"
#include "docenh/checkpoint.hpp"
#include "docenh/corpus.hpp"
#include "docenh/enhancer.hpp"
#include "docenh/errors.hpp"
#include "docenh/inference.hpp"
#include "docenh/metrics.hpp"
#include "docenh/png_io.hpp"
#include "docenh/text.hpp"
#include "docenh/training.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

using namespace docenh;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

constexpr int kExitRuntime = 1;
constexpr int kExitConfig = 2;

bool g_quiet = false;

std::ostream* log_stream()
{
	return g_quiet ? nullptr : &std::cerr;
}

fs::path input_path(const std::string& arg)
{
	fs::path p(arg);
	if (p.is_relative() && !fs::exists(p))
		if (const char* root = std::getenv("DOCENH_DATA_ROOT"); root && *root && fs::exists(fs::path(root) / p))
			return fs::path(root) / p;
	return p;
}

fs::path require_file(const std::string& arg, const std::string& what)
{
	const fs::path p = input_path(arg);
	if (!fs::is_regular_file(p))
		throw ConfigError(what + " not found: " + p.string());
	return p;
}

fs::path require_dir(const std::string& arg, const std::string& what)
{
	const fs::path p = input_path(arg);
	if (!fs::is_directory(p))
		throw ConfigError(what + " not found: " + p.string());
	return p;
}

json read_json(const fs::path& file)
{
	std::ifstream in(file);
	try {
		return json::parse(in);
	} catch (const json::parse_error& e) {
		throw ConfigError(file.string() + ": " + e.what());
	}
}

// Provenance record written next to every command's outputs.
void write_run_record(const fs::path& dir, const std::string& command, const json& effective)
{
	fs::create_directories(dir);
	const json record{{"command", command},
					  {"config", effective},
					  {"config_hash", hex64(fnv1a64(effective.dump()))}};
	std::ofstream(dir / "run.json") << record.dump(2) << "\n";
}

std::vector<fs::path> png_files(const fs::path& input)
{
	if (fs::is_regular_file(input))
		return {input};
	std::vector<fs::path> out;
	for (const auto& e : fs::directory_iterator(input))
		if (e.is_regular_file() && e.path().extension() == ".png")
			out.push_back(e.path());
	std::sort(out.begin(), out.end());
	return out;
}

// Patch size a bundle was trained at, from the trainer metadata if present.
std::pair<int, int> trained_size(const LoadedCheckpoint& ckpt)
{
	const json& m = ckpt.extras.metadata;
	if (m.contains("trainer") && m["trainer"].contains("config")) {
		const json& c = m["trainer"]["config"];
		return {c.value("image_height", kModelHeight), c.value("image_width", kModelWidth)};
	}
	return {kModelHeight, kModelWidth};
}

LoadedCheckpoint open_checkpoint(const std::string& arg)
{
	const fs::path p = require_file(arg, "checkpoint");
	try {
		return load_checkpoint(p);
	} catch (const ConfigError&) {
		throw;
	} catch (const std::runtime_error& e) {
		throw ConfigError(std::string("cannot load checkpoint: ") + e.what());
	}
}

std::string two_decimals(double v)
{
	char buf[32];
	std::snprintf(buf, sizeof buf, "%.2f", v);
	return buf;
}

void print_summary(const std::map<Split, std::size_t>& counts)
{
	for (const auto& [split, n] : counts)
		std::cout << to_string(split) << ": " << n << "\n";
}

// --- build-corpus ---------------------------------------------------------

struct BuildArgs
{
	std::string manifest, backgrounds, output, degradation;
	std::uint64_t seed = 0;
	int jobs = 1;
	bool resume = false;
};

int cmd_build_corpus(const BuildArgs& a)
{
	const fs::path manifest_file = require_file(a.manifest, "clean manifest");
	const fs::path bg_dir = require_dir(a.backgrounds, "background directory");
	DegradationConfig config;
	if (!a.degradation.empty())
		config = degradation_config_from_json(read_json(require_file(a.degradation, "degradation config")));
	config.validate();

	const auto input = CorpusManifest::load(manifest_file);
	input.validate();
	const auto assets = BackgroundLibrary::load_directory(bg_dir);

	BuildOptions opts;
	opts.output_dir = a.output;
	opts.jobs = a.jobs;
	opts.resume = a.resume;
	const auto result = build_corpus(input, assets, config, a.seed, opts);
	write_run_record(a.output, "build-corpus",
					 {{"manifest", manifest_file.string()},
					  {"backgrounds", bg_dir.string()},
					  {"seed", a.seed},
					  {"degradation", to_json(config)}});

	print_summary(result.counts);
	std::cout << "manifest: " << (fs::path(a.output) / "manifest.jsonl").string() << "\n";
	for (const auto& f : result.failures)
		std::cerr << "failed " << f.id << ": " << f.message << "\n";
	return !result.failures.empty() && result.failures.size() == input.records().size() ? kExitRuntime : 0;
}

// --- train / fine-tune ----------------------------------------------------

struct TrainArgs
{
	std::vector<std::string> manifests;
	std::string config, output, resume, scenario;
	std::optional<double> lambda, beta;
	std::optional<int> batch_size, image_height, image_width;
	std::optional<std::int64_t> max_iterations, checkpoint_every;
	std::optional<std::uint64_t> seed;
	int jobs = 1;
	bool dry_run = false;
	std::string checkpoint; // fine-tune only
};

TrainingConfig effective_config(const TrainArgs& a)
{
	json j = json::object();
	if (!a.config.empty())
		j = read_json(require_file(a.config, "training config"));
	if (!j.is_object())
		throw ConfigError("training config must be a JSON object");
	if (!a.scenario.empty())
		j["scenario"] = a.scenario;
	if (a.lambda)
		j["weights"]["ctc"] = *a.lambda;
	if (a.beta)
		j["weights"]["bce"] = *a.beta;
	if (a.batch_size)
		j["batch_size"] = *a.batch_size;
	if (a.image_height)
		j["image_height"] = *a.image_height;
	if (a.image_width)
		j["image_width"] = *a.image_width;
	if (a.max_iterations)
		j["max_iterations"] = *a.max_iterations;
	if (a.checkpoint_every)
		j["checkpoint_every"] = *a.checkpoint_every;
	if (a.seed)
		j["seed"] = *a.seed;
	return training_config_from_json(j);
}

CorpusManifest open_manifest(const std::string& arg)
{
	auto m = CorpusManifest::load(require_file(arg, "manifest"));
	m.validate();
	return m;
}

int cmd_train(const TrainArgs& a)
{
	const TrainingConfig config = effective_config(a);
	const auto manifest = open_manifest(a.manifests.front());
	TrainOptions opts;
	opts.output_dir = a.output;
	opts.log = log_stream();
	if (!a.resume.empty())
		opts.resume_from = require_file(a.resume, "resume checkpoint");
	if (manifest.count(Split::Train) == 0 || manifest.count(Split::Valid) == 0)
		throw ConfigError("manifest needs non-empty train and valid splits");

	std::cout << "config hash: " << config_hash(config) << "\n";
	if (a.dry_run) {
		std::cout << to_json(config).dump(2) << "\n";
		return 0;
	}
	torch::set_num_threads(std::max(1, a.jobs));
	write_run_record(a.output, "train", {{"manifest", a.manifests.front()}, {"training", to_json(config)}});
	const auto result = train(manifest, config, opts);

	for (const auto& c : result.checkpoints)
		if (c.iteration == result.best_iteration)
			std::cout << "best iteration " << c.iteration << ": CER " << two_decimals(c.validation.cer) << "  WER "
					  << two_decimals(c.validation.wer) << "  PSNR " << two_decimals(c.validation.psnr) << "\n";
	std::cout << "best checkpoint: " << (fs::path(a.output) / "checkpoints" / "best.ckpt").string() << "\n";
	return 0;
}

int cmd_fine_tune(const TrainArgs& a)
{
	if (!a.scenario.empty())
		throw ConfigError("fine-tune trains without the recognizer; --scenario does not apply");
	const TrainingConfig config = effective_config(a);
	std::vector<CorpusManifest> manifests;
	for (const auto& m : a.manifests)
		manifests.push_back(open_manifest(m));
	auto ckpt = open_checkpoint(a.checkpoint);

	std::cout << "config hash: " << config_hash(config) << "\n";
	if (a.dry_run) {
		std::cout << to_json(config).dump(2) << "\n";
		return 0;
	}
	torch::set_num_threads(std::max(1, a.jobs));
	const fs::path out(a.output);
	write_run_record(out, "fine-tune",
					 {{"manifests", a.manifests}, {"checkpoint", a.checkpoint}, {"training", to_json(config)}});

	auto result = fine_tune(std::move(ckpt.bundle), manifests, config, log_stream());
	result.bundle.provenance.config_hash = config_hash(config);
	result.bundle.provenance.iteration = result.iterations;
	std::ofstream reports(out / "reports.jsonl");
	for (const auto& r : result.reports)
		reports << to_json(r).dump() << "\n";
	CheckpointExtras extras;
	extras.metadata["fine_tune"] = {{"source", a.checkpoint}, {"epochs", result.epochs}, {"iterations", result.iterations}};
	save_checkpoint(out / "fine_tuned.ckpt", result.bundle, extras);
	std::cout << "fine-tuned " << result.visit_order.size() << " patches in " << result.iterations
			  << " iterations (1 epoch)\n"
			  << "checkpoint: " << (out / "fine_tuned.ckpt").string() << "\n";
	return 0;
}

// --- enhance --------------------------------------------------------------

struct EnhanceArgs
{
	std::string checkpoint, input, output;
	bool no_flip = false, overlap = false, compare = false;
	float threshold = 0.5f;
	int batch_size = 4;
	int jobs = 1;
};

int cmd_enhance(const EnhanceArgs& a)
{
	const auto ckpt = open_checkpoint(a.checkpoint);
	const fs::path input = input_path(a.input);
	if (!fs::exists(input))
		throw ConfigError("input not found: " + input.string());
	if (!(a.threshold > 0.0f && a.threshold < 1.0f))
		throw ConfigError("--threshold must lie in (0, 1)");
	const auto files = png_files(input);
	if (files.empty())
		throw ConfigError("no PNG files in " + input.string());

	EnhanceOptions opts;
	opts.flip_vote = !a.no_flip;
	opts.overlap = a.overlap;
	opts.threshold = a.threshold;
	std::tie(opts.patch_h, opts.patch_w) = trained_size(ckpt);
	const fs::path out(a.output);
	write_run_record(out, "enhance",
					 {{"checkpoint", a.checkpoint},
					  {"checkpoint_config_hash", ckpt.bundle.provenance.config_hash},
					  {"input", input.string()},
					  {"flip_vote", opts.flip_vote},
					  {"overlap", opts.overlap},
					  {"threshold", opts.threshold},
					  {"patch", {opts.patch_h, opts.patch_w}}});

	torch::set_num_threads(std::max(1, a.jobs));
	const auto enhancer = make_patch_enhancer(ckpt.bundle, a.batch_size);
	std::size_t failed = 0;
	for (const auto& f : files) {
		try {
			const LineImage page = read_png(f);
			const BinaryImage result = enhance_page(enhancer, page, opts);
			write_png(out / (f.stem().string() + ".png"), result);
			if (a.compare)
				write_png(out / (f.stem().string() + "_compare.png"), side_by_side(page, to_line_image(result)));
			if (!g_quiet)
				std::cerr << f.filename().string() << "\n";
		} catch (const std::exception& e) {
			++failed;
			std::cerr << "failed " << f.string() << ": " << e.what() << "\n";
		}
	}
	std::cout << files.size() - failed << "/" << files.size() << " pages enhanced into " << out.string() << "\n";
	return failed == files.size() ? kExitRuntime : 0;
}

// --- evaluate-binarization ------------------------------------------------

struct BinEvalArgs
{
	std::string pred, input, gt, manifest, split = "test", baseline, checkpoint, report;
	int jobs = 1;
};

std::map<std::string, fs::path> pngs_by_stem(const fs::path& dir)
{
	std::map<std::string, fs::path> out;
	for (const auto& f : png_files(dir))
		out[f.stem().string()] = f;
	return out;
}

int cmd_evaluate_binarization(const BinEvalArgs& a)
{
	const int modes = !a.pred.empty() + !a.input.empty() + !a.manifest.empty();
	if (modes != 1)
		throw ConfigError("give exactly one of --pred, --input or --manifest");
	if (!a.baseline.empty() && a.baseline != "otsu" && a.baseline != "sauvola")
		throw ConfigError("unknown baseline '" + a.baseline + "' (expected otsu or sauvola)");
	if (!a.baseline.empty() && !a.checkpoint.empty())
		throw ConfigError("--baseline and --checkpoint are exclusive");

	BinarizationReport report;
	json effective{{"baseline", a.baseline}, {"checkpoint", a.checkpoint}};
	if (!a.pred.empty()) {
		if (!a.baseline.empty() || !a.checkpoint.empty())
			throw ConfigError("--pred takes finished binarizations; use --input with --baseline or --checkpoint");
		const fs::path pred = require_dir(a.pred, "prediction directory");
		const fs::path gt = require_dir(a.gt, "ground-truth directory");
		effective["pred"] = pred.string();
		effective["gt"] = gt.string();
		report = evaluate_binarization_dirs(pred, gt, a.jobs);
	} else {
		if (a.baseline.empty() && a.checkpoint.empty())
			throw ConfigError("--input and --manifest need --baseline or --checkpoint");
		std::optional<LoadedCheckpoint> ckpt;
		PatchEnhancer enhancer;
		EnhanceOptions opts;
		if (!a.checkpoint.empty()) {
			ckpt = open_checkpoint(a.checkpoint);
			enhancer = make_patch_enhancer(ckpt->bundle);
			std::tie(opts.patch_h, opts.patch_w) = trained_size(*ckpt);
		}
		auto binarize = [&](const LineImage& img) {
			if (a.baseline == "otsu")
				return otsu_binarize(img);
			if (a.baseline == "sauvola")
				return sauvola_binarize(img);
			return enhance_page(enhancer, img, opts);
		};

		// (id, input image, ground-truth image) triples.
		std::vector<std::tuple<std::string, fs::path, fs::path>> items;
		if (!a.input.empty()) {
			const fs::path input = require_dir(a.input, "input directory");
			const fs::path gt = require_dir(a.gt, "ground-truth directory");
			effective["input"] = input.string();
			effective["gt"] = gt.string();
			const auto gts = pngs_by_stem(gt);
			for (const auto& [id, path] : pngs_by_stem(input))
				if (auto it = gts.find(id); it != gts.end())
					items.emplace_back(id, path, it->second);
				else
					report.unmatched.push_back(id);
		} else {
			const auto manifest = open_manifest(a.manifest);
			const Split split = parse_split(a.split);
			effective["manifest"] = a.manifest;
			effective["split"] = a.split;
			for (const auto& r : manifest.records(split)) {
				if (!r.degraded_path)
					throw ConfigError("record '" + r.id + "' has no degraded image");
				items.emplace_back(r.id, manifest.resolve(*r.degraded_path), manifest.resolve(r.clean_path));
			}
		}
		std::vector<BinarizationRecord> records;
		for (const auto& [id, input, gt] : items) {
			try {
				records.push_back(evaluate_binarization(id, binarize(read_png(input)), threshold(read_png(gt), 0.5f)));
			} catch (const std::exception& e) {
				std::cerr << "failed " << id << ": " << e.what() << "\n";
			}
		}
		if (records.empty())
			throw std::runtime_error("no item could be evaluated");
		auto unmatched = std::move(report.unmatched);
		report = summarize(std::move(records));
		report.unmatched = std::move(unmatched);
	}
	std::cout << format_table(report);
	if (!a.report.empty()) {
		json j = to_json(report);
		j["config_hash"] = hex64(fnv1a64(effective.dump()));
		std::ofstream(a.report) << j.dump(2) << "\n";
	}
	return 0;
}

// --- evaluate-htr ---------------------------------------------------------

struct HtrEvalArgs
{
	std::string hyp, gt, manifest, split = "test", checkpoint, report, hyp_out;
	bool no_enhance = false;
	int batch_size = 16;
};

int cmd_evaluate_htr(const HtrEvalArgs& a)
{
	RecognitionReport report;
	json effective;
	if (!a.hyp.empty()) {
		if (!a.manifest.empty())
			throw ConfigError("give either --hyp with --gt or --manifest with --checkpoint");
		const fs::path hyp = require_dir(a.hyp, "hypothesis directory");
		const fs::path gt = require_dir(a.gt, "ground-truth directory");
		effective = {{"hyp", hyp.string()}, {"gt", gt.string()}};
		report = evaluate_recognition_dirs(hyp, gt);
	} else {
		if (a.manifest.empty() || a.checkpoint.empty())
			throw ConfigError("--manifest and --checkpoint are required without --hyp");
		const auto manifest = open_manifest(a.manifest);
		const auto ckpt = open_checkpoint(a.checkpoint);
		const auto [h, w] = trained_size(ckpt);
		const Split split = parse_split(a.split);
		effective = {{"manifest", a.manifest},
					 {"split", a.split},
					 {"checkpoint", a.checkpoint},
					 {"checkpoint_config_hash", ckpt.bundle.provenance.config_hash},
					 {"enhance", !a.no_enhance}};

		const auto records = manifest.records(split);
		if (records.empty())
			throw ConfigError("split '" + a.split + "' is empty");
		std::vector<RecognitionRecord> items;
		for (std::size_t start = 0; start < records.size(); start += a.batch_size) {
			const std::size_t end = std::min(records.size(), start + a.batch_size);
			std::vector<LineImage> images;
			for (std::size_t i = start; i < end; ++i) {
				const auto& r = records[i];
				if (!r.degraded_path)
					throw ConfigError("record '" + r.id + "' has no degraded image");
				images.push_back(normalize_to_model_size(read_png(manifest.resolve(*r.degraded_path)), h, w));
			}
			const auto hyps = a.no_enhance ? recognize(ckpt.bundle, images) : read_enhanced(ckpt.bundle, images);
			for (std::size_t i = start; i < end; ++i) {
				items.push_back(evaluate_recognition(records[i].id, records[i].text, hyps[i - start]));
				if (!a.hyp_out.empty()) {
					fs::create_directories(a.hyp_out);
					std::ofstream(fs::path(a.hyp_out) / (records[i].id + ".txt")) << utf8_encode(hyps[i - start]) << "\n";
				}
			}
		}
		report = summarize(std::move(items));
	}
	std::cout << format_table(report);
	if (!a.report.empty()) {
		json j = to_json(report);
		j["config_hash"] = hex64(fnv1a64(effective.dump()));
		std::ofstream(a.report) << j.dump(2) << "\n";
	}
	return 0;
}

void add_training_flags(CLI::App* cmd, TrainArgs& a)
{
	cmd->add_option("--config", a.config, "Training config (JSON); flags override its values");
	cmd->add_option("--output", a.output, "Output directory")->required();
	cmd->add_option("--lambda", a.lambda, "CTC loss weight");
	cmd->add_option("--beta", a.beta, "Pixel BCE loss weight");
	cmd->add_option("--batch-size", a.batch_size);
	cmd->add_option("--image-height", a.image_height);
	cmd->add_option("--image-width", a.image_width);
	cmd->add_option("--max-iterations", a.max_iterations);
	cmd->add_option("--checkpoint-every", a.checkpoint_every);
	cmd->add_option("--seed", a.seed);
	cmd->add_option("--jobs", a.jobs, "Worker threads")->check(CLI::PositiveNumber);
	cmd->add_flag("--dry-run", a.dry_run, "Validate inputs and print the effective config, then exit");
}

} // namespace

int main(int argc, char** argv)
{
	CLI::App app{"Handwritten document enhancement: corpora, training, inference and evaluation"};
	app.require_subcommand(1);
	app.fallthrough();
	app.add_flag("-q,--quiet", g_quiet, "Only print results");

	BuildArgs build;
	auto* build_cmd = app.add_subcommand("build-corpus", "Degrade a clean line manifest into a training corpus");
	build_cmd->add_option("--manifest", build.manifest, "Clean manifest (JSON Lines)")->required();
	build_cmd->add_option("--backgrounds", build.backgrounds, "Directory of background PNGs")->required();
	build_cmd->add_option("--output", build.output, "Output directory")->required();
	build_cmd->add_option("--degradation", build.degradation, "Degradation ranges (JSON)");
	build_cmd->add_option("--seed", build.seed);
	build_cmd->add_option("--jobs", build.jobs)->check(CLI::PositiveNumber);
	build_cmd->add_flag("--resume", build.resume, "Keep degraded images that already exist");

	TrainArgs train_args;
	auto* train_cmd = app.add_subcommand("train", "Joint generator/discriminator/recognizer training");
	train_cmd->add_option("--manifest", train_args.manifests, "Built corpus manifest")->required()->expected(1);
	train_cmd->add_option("--scenario", train_args.scenario, "S1 (recognizer sees ground truth) or S2 (generated)");
	train_cmd->add_option("--resume", train_args.resume, "Checkpoint to resume from");
	add_training_flags(train_cmd, train_args);

	TrainArgs ft_args;
	auto* ft_cmd = app.add_subcommand("fine-tune", "One epoch of generator fine-tuning on page patches");
	ft_cmd->add_option("--checkpoint", ft_args.checkpoint, "Trained checkpoint")->required();
	ft_cmd->add_option("--manifest", ft_args.manifests, "Page manifests (repeatable)")->required();
	ft_cmd->add_option("--scenario", ft_args.scenario)->group("");
	add_training_flags(ft_cmd, ft_args);

	EnhanceArgs enh;
	auto* enh_cmd = app.add_subcommand("enhance", "Binarize page images with a trained generator");
	enh_cmd->add_option("--checkpoint", enh.checkpoint)->required();
	enh_cmd->add_option("--input", enh.input, "PNG file or directory")->required();
	enh_cmd->add_option("--output", enh.output, "Output directory")->required();
	enh_cmd->add_flag("--no-flip", enh.no_flip, "Skip the upside-down pass");
	enh_cmd->add_flag("--overlap", enh.overlap, "Half-patch strides with averaged overlaps");
	enh_cmd->add_flag("--compare", enh.compare, "Also write input|output side-by-side PNGs");
	enh_cmd->add_option("--threshold", enh.threshold);
	enh_cmd->add_option("--batch-size", enh.batch_size)->check(CLI::PositiveNumber);
	enh_cmd->add_option("--jobs", enh.jobs)->check(CLI::PositiveNumber);

	BinEvalArgs be;
	auto* be_cmd = app.add_subcommand("evaluate-binarization", "PSNR, FM, Fps, DRD and Avg");
	be_cmd->add_option("--pred", be.pred, "Directory of binarized PNGs");
	be_cmd->add_option("--input", be.input, "Directory of input pages to binarize first");
	be_cmd->add_option("--gt", be.gt, "Directory of ground-truth PNGs");
	be_cmd->add_option("--manifest", be.manifest, "Corpus manifest (degraded vs clean)");
	be_cmd->add_option("--split", be.split);
	be_cmd->add_option("--baseline", be.baseline, "otsu or sauvola");
	be_cmd->add_option("--checkpoint", be.checkpoint, "Enhance inputs with this model");
	be_cmd->add_option("--report", be.report, "Write the JSON report here");
	be_cmd->add_option("--jobs", be.jobs)->check(CLI::PositiveNumber);

	HtrEvalArgs he;
	auto* he_cmd = app.add_subcommand("evaluate-htr", "CER and WER");
	he_cmd->add_option("--hyp", he.hyp, "Directory of hypothesis .txt files");
	he_cmd->add_option("--gt", he.gt, "Directory of ground-truth .txt files");
	he_cmd->add_option("--manifest", he.manifest, "Corpus manifest to recognize");
	he_cmd->add_option("--split", he.split);
	he_cmd->add_option("--checkpoint", he.checkpoint);
	he_cmd->add_flag("--no-enhance", he.no_enhance, "Recognize degraded lines directly");
	he_cmd->add_option("--batch-size", he.batch_size)->check(CLI::PositiveNumber);
	he_cmd->add_option("--hyp-out", he.hyp_out, "Write one hypothesis .txt per line here");
	he_cmd->add_option("--report", he.report, "Write the JSON report here");

	try {
		app.parse(argc, argv);
	} catch (const CLI::ParseError& e) {
		const int code = app.exit(e);
		return code == 0 ? 0 : kExitConfig;
	}

	try {
		if (*build_cmd)
			return cmd_build_corpus(build);
		if (*train_cmd)
			return cmd_train(train_args);
		if (*ft_cmd)
			return cmd_fine_tune(ft_args);
		if (*enh_cmd)
			return cmd_enhance(enh);
		if (*be_cmd) {
			if (!be.pred.empty() || !be.input.empty())
				if (be.gt.empty())
					throw ConfigError("--gt is required with --pred or --input");
			return cmd_evaluate_binarization(be);
		}
		if (*he_cmd) {
			if (!he.hyp.empty() && he.gt.empty())
				throw ConfigError("--gt is required with --hyp");
			return cmd_evaluate_htr(he);
		}
	} catch (const ConfigError& e) {
		std::cerr << "error: " << e.what() << "\n";
		return kExitConfig;
	} catch (const VocabularyError& e) {
		std::cerr << "error: " << e.what() << "\n";
		return kExitConfig;
	} catch (const LookupError& e) {
		std::cerr << "error: " << e.what() << "\n";
		return kExitConfig;
	} catch (const std::exception& e) {
		std::cerr << "error: " << e.what() << "\n";
		return kExitRuntime;
	}
	return kExitRuntime;
}

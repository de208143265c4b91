/*
 * Copyright 2026 The docenh Authors
 */
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "docenh/corpus.hpp"
#include "docenh/losses.hpp"
#include "docenh/models.hpp"

#include <torch/torch.h>

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace docenh {

/// S1: the recognizer learns from ground-truth images. S2: from the
/// generator's output of the same iteration.
enum class Scenario { S1, S2 };
enum class RecognizerSource { GroundTruth, Generated, None };
enum class SelectionMetric { Cer, Psnr };

std::string to_string(Scenario s);
std::string to_string(RecognizerSource s);
Scenario parse_scenario(const std::string& s); ///< throws ConfigError

struct AdamSettings
{
	double lr = 2e-4;
	double beta1 = 0.5;
	double beta2 = 0.999;
};

struct RmsPropSettings
{
	double lr = 1e-4;
	double decay = 0.9;
};

struct TrainingConfig
{
	Scenario scenario = Scenario::S1;
	LossWeights weights;
	AdversarialForm adversarial_form = AdversarialForm::NonSaturating;
	AdamSettings optimizer_g;
	AdamSettings optimizer_d;
	RmsPropSettings optimizer_r;
	int batch_size = 8;
	std::int64_t max_iterations = 20000;
	std::uint64_t seed = 0;
	std::int64_t checkpoint_every = 1000;
	/// Recognizer-only steps on ground truth before joint training (0 = off).
	std::int64_t recognizer_pretrain_iterations = 0;
	SelectionMetric selection = SelectionMetric::Cer;
	int image_height = kModelHeight;
	int image_width = kModelWidth;
	GeneratorSpec generator;
	DiscriminatorSpec discriminator;
	RecognizerSpec recognizer; ///< class_count is taken from the corpus charset

	void validate() const; ///< throws ConfigError
};

nlohmann::json to_json(const TrainingConfig& c);
/// Missing keys keep their defaults; unknown keys are a ConfigError.
TrainingConfig training_config_from_json(const nlohmann::json& j);
TrainingConfig load_training_config(const std::filesystem::path& file);
/// Hex FNV-1a of the canonical JSON form.
std::string config_hash(const TrainingConfig& c);

/// One text line prepared for training: both images at model size.
struct LineSample
{
	std::string id;
	LineImage degraded;
	LineImage gt;
	std::u32string text;
	std::vector<int> labels;
};

/// Loads a split of a built corpus; every record needs a degraded image.
std::vector<LineSample> load_line_samples(const CorpusManifest& manifest, Split split, const Charset& charset,
										  int height, int width);

struct Batch
{
	torch::Tensor degraded; ///< (N,1,H,W)
	torch::Tensor gt;		///< (N,1,H,W)
	std::vector<std::vector<int>> labels;
};

Batch make_batch(const std::vector<LineSample>& samples, const std::vector<std::size_t>& indices);

/// Endless sample order: epoch e visits a permutation drawn from (seed, e).
/// Position p maps to epoch p / n, so any position is reachable without
/// replaying earlier epochs.
class SampleStream
{
public:
	SampleStream(std::uint64_t seed, std::size_t count);
	std::size_t at(std::uint64_t position);
	std::size_t size() const noexcept { return count_; }

private:
	std::uint64_t seed_;
	std::size_t count_;
	std::uint64_t epoch_ = ~std::uint64_t{0};
	std::vector<std::size_t> order_;
};

struct IterationReport
{
	std::int64_t iteration = 0;
	double loss_d = 0.0;
	double loss_g_total = 0.0;
	double loss_g_adv = 0.0;
	double loss_ctc = 0.0; ///< CTC of R(G(I_d)); +infinity if no sample was feasible
	double loss_bce = 0.0;
	double loss_r = 0.0;   ///< CTC of the recognizer's own update
	RecognizerSource recognizer_source = RecognizerSource::GroundTruth;
	int ctc_skipped = 0;
};

nlohmann::json to_json(const IterationReport& r);

enum class Stage { Generate, Discriminator, Recognizer, Generator };

/// Fired after each stage of a step. `recognizer_input` is set for the
/// recognizer stage only.
struct StageEvent
{
	Stage stage;
	const ModelBundle& bundle;
	const torch::Tensor& generated;
	const torch::Tensor* recognizer_input = nullptr;
};
using StageObserver = std::function<void(const StageEvent&)>;

/// Owns the networks and their optimizers for joint training.
class Trainer
{
public:
	Trainer(ModelBundle bundle, TrainingConfig config);

	/// One D, one R, one G update, in that order.
	IterationReport train_step(const Batch& batch);
	/// Recognizer-only update on ground truth; returns its CTC loss.
	double pretrain_recognizer_step(const Batch& batch);

	void set_stage_observer(StageObserver observer) { observer_ = std::move(observer); }

	ModelBundle& bundle() noexcept { return bundle_; }
	const ModelBundle& bundle() const noexcept { return bundle_; }
	const TrainingConfig& config() const noexcept { return config_; }
	std::int64_t iteration() const noexcept { return iteration_; }

	/// Checkpoint with optimizer state, enough to resume bit-exactly.
	void save(const std::filesystem::path& file, const nlohmann::json& metadata = nlohmann::json::object()) const;
	/// Throws ConfigError when the checkpoint was written under a different
	/// configuration (max_iterations and checkpoint_every may change).
	static Trainer resume(const std::filesystem::path& file, const TrainingConfig& config,
						  nlohmann::json* metadata = nullptr);

private:
	void seed_iteration() const;
	void notify(Stage stage, const torch::Tensor& generated, const torch::Tensor* recognizer_input = nullptr) const;

	ModelBundle bundle_;
	TrainingConfig config_;
	std::unique_ptr<torch::optim::Adam> opt_g_;
	std::unique_ptr<torch::optim::Adam> opt_d_;
	std::unique_ptr<torch::optim::RMSprop> opt_r_;
	std::int64_t iteration_ = 0;
	StageObserver observer_;
};

struct ValidationResult
{
	double cer = 0.0;  ///< macro CER of R(G(I_d)) under greedy decoding
	double wer = 0.0;
	double psnr = 0.0; ///< mean PSNR of G(I_d) against the GT
};

ValidationResult evaluate_lines(const ModelBundle& bundle, const std::vector<LineSample>& samples,
								int batch_size = 8);

struct TrainOptions
{
	/// Checkpoints and reports.jsonl go here; empty keeps everything in memory.
	std::filesystem::path output_dir;
	std::optional<std::filesystem::path> resume_from;
	std::function<void(const IterationReport&)> on_report;
	/// Polled after every step; returning true ends training early (the
	/// current state is validated and checkpointed first).
	std::function<bool(const ModelBundle&, std::int64_t iteration)> stop_when;
	std::ostream* log = nullptr;
};

struct CheckpointRecord
{
	std::int64_t iteration = 0;
	std::filesystem::path path;
	ValidationResult validation;
};

struct TrainResult
{
	ModelBundle best;
	std::int64_t best_iteration = 0;
	std::vector<CheckpointRecord> checkpoints;
	std::vector<IterationReport> reports;
};

/// Runs train_step over shuffled batches until max_iterations, validating
/// every checkpoint_every iterations and keeping the best bundle.
TrainResult train(const CorpusManifest& manifest, const TrainingConfig& config, const TrainOptions& options = {});

struct FineTuneResult
{
	ModelBundle bundle;
	int epochs = 1;
	std::int64_t iterations = 0;
	/// Patch keys ("<manifest>:<id>:<patch>") in the order they were visited.
	std::vector<std::string> visit_order;
	std::vector<IterationReport> reports;
};

/// One epoch of generator/discriminator training on page patches pooled
/// from every manifest. The recognizer is not used, the generator's
/// normalization layers are frozen and fresh optimizers are created.
FineTuneResult fine_tune(ModelBundle bundle, const std::vector<CorpusManifest>& manifests,
						 const TrainingConfig& config, std::ostream* log = nullptr);

} // namespace docenh

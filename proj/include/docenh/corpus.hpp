/*
 * Copyright 2026 The docenh Authors
 */
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "docenh/image.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace docenh {

enum class Split { Train, Valid, Test };

std::string_view to_string(Split split);
Split parse_split(std::string_view name);

struct Sample
{
	std::string id;
	LineImage image; ///< ground-truth clean line
	std::u32string text;
	Split split = Split::Train;
};

struct BackgroundAsset
{
	std::string id;
	LineImage image;
};

/// Background textures keyed by id (the PNG file stem when loaded from disk).
class BackgroundLibrary
{
public:
	static BackgroundLibrary load_directory(const std::filesystem::path& dir);

	void add(BackgroundAsset asset);
	const BackgroundAsset& find(const std::string& id) const; ///< throws LookupError
	bool contains(const std::string& id) const { return assets_.contains(id); }
	std::vector<std::string> ids() const; ///< sorted
	std::size_t size() const noexcept { return assets_.size(); }

private:
	std::map<std::string, BackgroundAsset> assets_;
};

enum class BlurMode { Box, Gaussian };

/// One fully-determined set of distortions for a single line.
/// Kernel value 0 means the stage is skipped.
struct DegradationRecipe
{
	std::optional<std::string> background_id;
	float blend_alpha = 0.0f;
	int dilation_kernel = 0; ///< 0, 2 or 3
	int erosion_kernel = 0;	 ///< 0, 2, 3 or 4
	int blur_kernel = 1;	 ///< odd, 1..15
	BlurMode blur_mode = BlurMode::Box;
	std::vector<int> line_positions;
	std::vector<int> line_widths;
	float line_intensity = 0.0f;
	std::uint64_t seed = 0;

	int vertical_line_count() const noexcept { return static_cast<int>(line_positions.size()); }

	/// Throws ConfigError when a field breaks its allowed set. `image_width`
	/// bounds the vertical lines when positive.
	void validate(int image_width = 0) const;

	friend bool operator==(const DegradationRecipe&, const DegradationRecipe&) = default;
};

template <typename T>
struct Range
{
	T lo{};
	T hi{};
};

/// Sampling ranges for recipes. Defaults follow the kernel sets used for the
/// degraded line corpora; vertical-line ranges are local choices.
struct DegradationConfig
{
	double background_probability = 1.0;
	Range<float> blend_alpha{0.5f, 0.95f};
	std::vector<int> dilation_kernels{0, 2, 3};
	std::vector<int> erosion_kernels{0, 2, 3, 4};
	int blur_max = 15; ///< blur kernel drawn uniformly from odd sizes 1..blur_max
	BlurMode blur_mode = BlurMode::Box;
	Range<int> line_count{0, 4};
	Range<int> line_width{1, 5};
	Range<float> line_intensity{0.0f, 0.3f};
	/// Fraction of background assets reserved for the test split.
	double test_background_fraction = 0.3;

	/// Every stage switched off: recipes are the identity.
	static DegradationConfig disabled();

	void validate() const; ///< throws ConfigError
};

nlohmann::json to_json(const DegradationConfig& config);
DegradationConfig degradation_config_from_json(const nlohmann::json& j);
nlohmann::json to_json(const DegradationRecipe& recipe);
DegradationRecipe recipe_from_json(const nlohmann::json& j);

/// Deterministic draw: the same (seed, config, width, pool) gives the same recipe.
/// `background_pool` lists the asset ids this sample may use.
DegradationRecipe sample_recipe(std::uint64_t rng_seed, const DegradationConfig& config, int image_width,
								const std::vector<std::string>& background_pool = {});

/// Background tiled to the image size, composited by per-pixel
/// min(img, (1 - alpha) + alpha * bg).
LineImage apply_background(const LineImage& img, const LineImage& background, float alpha);

/// Grayscale dilation of ink (local minimum) followed by erosion of ink
/// (local maximum). Kernel 0 skips a stage.
LineImage apply_morphology(const LineImage& img, int dilation, int erosion);

/// Mean over a k x k window with edge replication (Gaussian when requested).
LineImage apply_blur(const LineImage& img, int k, BlurMode mode = BlurMode::Box);

/// Darkens columns [p, p + w) to min(existing, intensity) on every row.
/// Throws std::invalid_argument when a line leaves the image.
LineImage insert_vertical_lines(const LineImage& img, const std::vector<int>& positions,
								const std::vector<int>& widths, float intensity);

/// background -> morphology -> blur -> vertical lines.
LineImage degrade(const LineImage& clean, const DegradationRecipe& recipe, const BackgroundLibrary& assets);

struct ManifestRecord
{
	std::string id;
	std::filesystem::path clean_path; ///< relative to the manifest root
	std::optional<std::filesystem::path> degraded_path;
	std::u32string text;
	Split split = Split::Train;
	std::optional<DegradationRecipe> recipe;
};

/// JSON Lines dataset listing. Paths are stored relative to `root`, the
/// directory holding the manifest file.
class CorpusManifest
{
public:
	CorpusManifest() = default;
	CorpusManifest(std::filesystem::path root, std::vector<ManifestRecord> records);

	static CorpusManifest load(const std::filesystem::path& file);
	void save(const std::filesystem::path& file) const;

	const std::filesystem::path& root() const noexcept { return root_; }
	const std::vector<ManifestRecord>& records() const noexcept { return records_; }
	std::vector<ManifestRecord> records(Split split) const;
	std::size_t count(Split split) const;

	std::filesystem::path resolve(const std::filesystem::path& relative) const { return root_ / relative; }

	/// Sorted unique code points over every transcription.
	std::u32string charset() const;

	/// Throws ConfigError on duplicate ids, empty train/valid texts or paths
	/// that escape the root.
	void validate() const;

private:
	std::filesystem::path root_;
	std::vector<ManifestRecord> records_;
};

struct BuildOptions
{
	std::filesystem::path output_dir;
	int jobs = 1;
	/// Keep degraded images that already exist instead of wiping the output.
	bool resume = false;
};

struct BuildFailure
{
	std::string id;
	std::string message;
};

struct BuildResult
{
	CorpusManifest manifest; ///< written to output_dir/manifest.jsonl
	std::vector<BuildFailure> failures;
	std::map<Split, std::size_t> counts;
	std::vector<std::string> train_backgrounds;
	std::vector<std::string> test_backgrounds;
};

/// Splits the library into disjoint train/valid and test pools.
std::pair<std::vector<std::string>, std::vector<std::string>>
partition_backgrounds(const BackgroundLibrary& assets, const DegradationConfig& config, std::uint64_t master_seed);

/// Writes clean and degraded copies of every sample under output_dir and
/// returns the updated manifest. Per-sample seeds are derive_seed(master_seed, id).
BuildResult build_corpus(const CorpusManifest& input, const BackgroundLibrary& assets, const DegradationConfig& config,
						 std::uint64_t master_seed, const BuildOptions& options);

} // namespace docenh

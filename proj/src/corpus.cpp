/*
 * Copyright 2026 The docenh Authors
 */
// SPDX-License-Identifier: Apache-2.0

#include "docenh/corpus.hpp"

#include "docenh/errors.hpp"
#include "docenh/png_io.hpp"
#include "docenh/text.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <mutex>
#include <random>
#include <set>
#include <stdexcept>
#include <thread>

namespace fs = std::filesystem;
using nlohmann::json;

namespace docenh {

std::string_view to_string(Split split)
{
	switch (split) {
	case Split::Train: return "train";
	case Split::Valid: return "valid";
	case Split::Test: return "test";
	}
	return "train";
}

Split parse_split(std::string_view name)
{
	if (name == "train")
		return Split::Train;
	if (name == "valid" || name == "validation")
		return Split::Valid;
	if (name == "test")
		return Split::Test;
	throw ConfigError("unknown split '" + std::string(name) + "'");
}

// ---------------------------------------------------------------------------
// Background library

BackgroundLibrary BackgroundLibrary::load_directory(const fs::path& dir)
{
	if (!fs::is_directory(dir))
		throw ConfigError("background directory not found: " + dir.string());
	BackgroundLibrary lib;
	for (const auto& entry : fs::directory_iterator(dir)) {
		if (!entry.is_regular_file() || entry.path().extension() != ".png")
			continue;
		lib.add({entry.path().stem().string(), read_png(entry.path())});
	}
	return lib;
}

void BackgroundLibrary::add(BackgroundAsset asset)
{
	if (asset.image.empty())
		throw ContractError("background asset '" + asset.id + "' is empty");
	auto id = asset.id;
	assets_.insert_or_assign(std::move(id), std::move(asset));
}

const BackgroundAsset& BackgroundLibrary::find(const std::string& id) const
{
	auto it = assets_.find(id);
	if (it == assets_.end())
		throw LookupError("background asset not found: " + id);
	return it->second;
}

std::vector<std::string> BackgroundLibrary::ids() const
{
	std::vector<std::string> out;
	out.reserve(assets_.size());
	for (const auto& [id, _] : assets_)
		out.push_back(id);
	return out;
}

// ---------------------------------------------------------------------------
// Recipes and configuration

namespace {

bool contains(std::initializer_list<int> set, int v)
{
	return std::find(set.begin(), set.end(), v) != set.end();
}

void require(bool ok, const std::string& what)
{
	if (!ok)
		throw ConfigError(what);
}

bool valid_blur(int k)
{
	return k >= 1 && k <= 15 && k % 2 == 1;
}

} // namespace

void DegradationRecipe::validate(int image_width) const
{
	require(contains({0, 2, 3}, dilation_kernel), "dilation kernel must be none, 2 or 3");
	require(contains({0, 2, 3, 4}, erosion_kernel), "erosion kernel must be none, 2, 3 or 4");
	require(valid_blur(blur_kernel), "blur kernel must be odd in 1..15");
	require(blend_alpha >= 0.0f && blend_alpha <= 1.0f, "blend alpha must lie in [0, 1]");
	require(line_intensity >= 0.0f && line_intensity <= 1.0f, "line intensity must lie in [0, 1]");
	require(line_positions.size() == line_widths.size(), "line positions and widths differ in length");
	for (std::size_t i = 0; i < line_positions.size(); ++i) {
		require(line_positions[i] >= 0 && line_widths[i] >= 1, "vertical line out of range");
		if (image_width > 0)
			require(line_positions[i] + line_widths[i] <= image_width, "vertical line exceeds image width");
	}
}

DegradationConfig DegradationConfig::disabled()
{
	DegradationConfig c;
	c.background_probability = 0.0;
	c.blend_alpha = {0.0f, 0.0f};
	c.dilation_kernels = {0};
	c.erosion_kernels = {0};
	c.blur_max = 1;
	c.line_count = {0, 0};
	c.line_width = {1, 1};
	c.line_intensity = {0.0f, 0.0f};
	return c;
}

void DegradationConfig::validate() const
{
	require(background_probability >= 0.0 && background_probability <= 1.0, "background_probability outside [0, 1]");
	require(blend_alpha.lo >= 0.0f && blend_alpha.lo <= blend_alpha.hi && blend_alpha.hi <= 1.0f,
			"blend_alpha range must satisfy 0 <= lo <= hi <= 1");
	require(!dilation_kernels.empty() && !erosion_kernels.empty(), "kernel choice lists must not be empty");
	for (int k : dilation_kernels)
		require(contains({0, 2, 3}, k), "dilation kernel choices must be drawn from {0, 2, 3}");
	for (int k : erosion_kernels)
		require(contains({0, 2, 3, 4}, k), "erosion kernel choices must be drawn from {0, 2, 3, 4}");
	require(valid_blur(blur_max), "blur_max must be odd in 1..15");
	require(line_count.lo >= 0 && line_count.lo <= line_count.hi, "line_count range invalid");
	require(line_width.lo >= 1 && line_width.lo <= line_width.hi, "line_width range invalid");
	require(line_intensity.lo >= 0.0f && line_intensity.lo <= line_intensity.hi && line_intensity.hi <= 1.0f,
			"line_intensity range invalid");
	require(test_background_fraction >= 0.0 && test_background_fraction <= 1.0,
			"test_background_fraction outside [0, 1]");
}

namespace {

std::string blur_mode_name(BlurMode m)
{
	return m == BlurMode::Gaussian ? "gaussian" : "box";
}

BlurMode parse_blur_mode(const std::string& s)
{
	if (s == "box")
		return BlurMode::Box;
	if (s == "gaussian")
		return BlurMode::Gaussian;
	throw ConfigError("unknown blur mode '" + s + "'");
}

template <typename T>
json range_json(const Range<T>& r)
{
	return json::array({r.lo, r.hi});
}

template <typename T>
Range<T> range_from(const json& j, const char* key, Range<T> fallback)
{
	if (!j.contains(key))
		return fallback;
	const auto& v = j.at(key);
	if (!v.is_array() || v.size() != 2)
		throw ConfigError(std::string(key) + " must be a two-element [lo, hi] array");
	return {v[0].get<T>(), v[1].get<T>()};
}

} // namespace

json to_json(const DegradationConfig& c)
{
	return json{{"background_probability", c.background_probability},
				{"blend_alpha", range_json(c.blend_alpha)},
				{"dilation_kernels", c.dilation_kernels},
				{"erosion_kernels", c.erosion_kernels},
				{"blur_max", c.blur_max},
				{"blur_mode", blur_mode_name(c.blur_mode)},
				{"line_count", range_json(c.line_count)},
				{"line_width", range_json(c.line_width)},
				{"line_intensity", range_json(c.line_intensity)},
				{"test_background_fraction", c.test_background_fraction}};
}

DegradationConfig degradation_config_from_json(const json& j)
{
	DegradationConfig c;
	try {
		c.background_probability = j.value("background_probability", c.background_probability);
		c.blend_alpha = range_from(j, "blend_alpha", c.blend_alpha);
		c.dilation_kernels = j.value("dilation_kernels", c.dilation_kernels);
		c.erosion_kernels = j.value("erosion_kernels", c.erosion_kernels);
		c.blur_max = j.value("blur_max", c.blur_max);
		c.blur_mode = parse_blur_mode(j.value("blur_mode", blur_mode_name(c.blur_mode)));
		c.line_count = range_from(j, "line_count", c.line_count);
		c.line_width = range_from(j, "line_width", c.line_width);
		c.line_intensity = range_from(j, "line_intensity", c.line_intensity);
		c.test_background_fraction = j.value("test_background_fraction", c.test_background_fraction);
	} catch (const json::exception& e) {
		throw ConfigError(std::string("degradation config: ") + e.what());
	}
	c.validate();
	return c;
}

json to_json(const DegradationRecipe& r)
{
	json j{{"blend_alpha", r.blend_alpha},
		   {"dilation_kernel", r.dilation_kernel},
		   {"erosion_kernel", r.erosion_kernel},
		   {"blur_kernel", r.blur_kernel},
		   {"blur_mode", blur_mode_name(r.blur_mode)},
		   {"line_positions", r.line_positions},
		   {"line_widths", r.line_widths},
		   {"line_intensity", r.line_intensity},
		   {"seed", r.seed}};
	j["background_id"] = r.background_id ? json(*r.background_id) : json(nullptr);
	return j;
}

DegradationRecipe recipe_from_json(const json& j)
{
	DegradationRecipe r;
	if (j.contains("background_id") && !j.at("background_id").is_null())
		r.background_id = j.at("background_id").get<std::string>();
	r.blend_alpha = j.value("blend_alpha", 0.0f);
	r.dilation_kernel = j.value("dilation_kernel", 0);
	r.erosion_kernel = j.value("erosion_kernel", 0);
	r.blur_kernel = j.value("blur_kernel", 1);
	r.blur_mode = parse_blur_mode(j.value("blur_mode", std::string("box")));
	r.line_positions = j.value("line_positions", std::vector<int>{});
	r.line_widths = j.value("line_widths", std::vector<int>{});
	r.line_intensity = j.value("line_intensity", 0.0f);
	r.seed = j.value("seed", std::uint64_t{0});
	r.validate();
	return r;
}

DegradationRecipe sample_recipe(std::uint64_t rng_seed, const DegradationConfig& config, int image_width,
								const std::vector<std::string>& background_pool)
{
	config.validate();
	if (image_width < 1)
		throw ConfigError("image width must be positive");

	std::mt19937_64 rng(rng_seed);
	auto uniform_int = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
	auto uniform_real = [&](float lo, float hi) {
		return lo == hi ? lo : std::uniform_real_distribution<float>(lo, hi)(rng);
	};
	auto pick = [&](const std::vector<int>& choices) {
		return choices[static_cast<std::size_t>(uniform_int(0, static_cast<int>(choices.size()) - 1))];
	};

	DegradationRecipe r;
	r.seed = rng_seed;
	r.blur_mode = config.blur_mode;

	const double bg_draw = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
	if (!background_pool.empty() && bg_draw < config.background_probability) {
		r.background_id = background_pool[static_cast<std::size_t>(
			uniform_int(0, static_cast<int>(background_pool.size()) - 1))];
		r.blend_alpha = uniform_real(config.blend_alpha.lo, config.blend_alpha.hi);
	}

	r.dilation_kernel = pick(config.dilation_kernels);
	r.erosion_kernel = pick(config.erosion_kernels);
	r.blur_kernel = 2 * uniform_int(0, (config.blur_max - 1) / 2) + 1;

	const int lines = uniform_int(config.line_count.lo, config.line_count.hi);
	for (int i = 0; i < lines; ++i) {
		const int w = std::min(uniform_int(config.line_width.lo, config.line_width.hi), image_width);
		r.line_widths.push_back(w);
		r.line_positions.push_back(uniform_int(0, image_width - w));
	}
	if (lines > 0)
		r.line_intensity = uniform_real(config.line_intensity.lo, config.line_intensity.hi);
	return r;
}

// ---------------------------------------------------------------------------
// Distortion stages

LineImage apply_background(const LineImage& img, const LineImage& background, float alpha)
{
	if (!(alpha >= 0.0f && alpha <= 1.0f))
		throw ContractError("alpha must lie in [0, 1]");
	if (alpha == 0.0f)
		return img;
	std::vector<float> out(img.size());
	for (int r = 0; r < img.height(); ++r) {
		const auto src = img.row(r);
		const auto bg = background.row(r % background.height());
		for (int c = 0; c < img.width(); ++c) {
			const float texture = (1.0f - alpha) + alpha * bg[c % background.width()];
			out[static_cast<std::size_t>(r) * img.width() + c] = std::clamp(std::min(src[c], texture), 0.0f, 1.0f);
		}
	}
	return LineImage(img.height(), img.width(), std::move(out));
}

namespace {

// Window offsets for a k-wide kernel anchored at k / 2: k=2 -> {-1, 0},
// k=3 -> {-1, 0, 1}, k=4 -> {-2, -1, 0, 1}.
template <typename Reduce>
LineImage local_filter(const LineImage& img, int k, Reduce reduce)
{
	const int lo = -(k / 2);
	const int hi = k - 1 - k / 2;
	std::vector<float> out(img.size());
	for (int r = 0; r < img.height(); ++r) {
		for (int c = 0; c < img.width(); ++c) {
			float acc = img.at(r, c);
			for (int dr = lo; dr <= hi; ++dr) {
				const int rr = r + dr;
				if (rr < 0 || rr >= img.height())
					continue;
				for (int dc = lo; dc <= hi; ++dc) {
					const int cc = c + dc;
					if (cc >= 0 && cc < img.width())
						acc = reduce(acc, img.at(rr, cc));
				}
			}
			out[static_cast<std::size_t>(r) * img.width() + c] = acc;
		}
	}
	return LineImage(img.height(), img.width(), std::move(out));
}

std::vector<double> gaussian_taps(int k)
{
	const double sigma = 0.3 * ((k - 1) * 0.5 - 1.0) + 0.8;
	std::vector<double> taps(k);
	double sum = 0.0;
	for (int i = 0; i < k; ++i) {
		const double x = i - (k - 1) / 2.0;
		taps[i] = std::exp(-x * x / (2.0 * sigma * sigma));
		sum += taps[i];
	}
	for (auto& t : taps)
		t /= sum;
	return taps;
}

} // namespace

LineImage apply_morphology(const LineImage& img, int dilation, int erosion)
{
	if (!contains({0, 2, 3}, dilation) || !contains({0, 2, 3, 4}, erosion))
		throw ContractError("morphology kernel outside the allowed sizes");
	LineImage out = img;
	if (dilation > 0)
		out = local_filter(out, dilation, [](float a, float b) { return std::min(a, b); });
	if (erosion > 0)
		out = local_filter(out, erosion, [](float a, float b) { return std::max(a, b); });
	return out;
}

LineImage apply_blur(const LineImage& img, int k, BlurMode mode)
{
	if (!valid_blur(k))
		throw ContractError("blur kernel must be odd in 1..15");
	if (k == 1)
		return img;

	const int radius = k / 2;
	std::vector<double> taps = mode == BlurMode::Gaussian ? gaussian_taps(k) : std::vector<double>(k, 1.0 / k);
	const int h = img.height();
	const int w = img.width();

	// Separable pass: rows then columns, edge replication on both.
	std::vector<double> tmp(img.size());
	for (int r = 0; r < h; ++r) {
		const auto row = img.row(r);
		for (int c = 0; c < w; ++c) {
			double acc = 0.0;
			for (int t = 0; t < k; ++t)
				acc += taps[t] * row[std::clamp(c + t - radius, 0, w - 1)];
			tmp[static_cast<std::size_t>(r) * w + c] = acc;
		}
	}
	std::vector<float> out(img.size());
	for (int r = 0; r < h; ++r) {
		for (int c = 0; c < w; ++c) {
			double acc = 0.0;
			for (int t = 0; t < k; ++t)
				acc += taps[t] * tmp[static_cast<std::size_t>(std::clamp(r + t - radius, 0, h - 1)) * w + c];
			out[static_cast<std::size_t>(r) * w + c] = std::clamp(static_cast<float>(acc), 0.0f, 1.0f);
		}
	}
	return LineImage(h, w, std::move(out));
}

LineImage insert_vertical_lines(const LineImage& img, const std::vector<int>& positions, const std::vector<int>& widths,
								float intensity)
{
	if (positions.size() != widths.size())
		throw std::invalid_argument("vertical line positions and widths differ in length");
	for (std::size_t i = 0; i < positions.size(); ++i)
		if (positions[i] < 0 || widths[i] < 1 || positions[i] + widths[i] > img.width())
			throw std::invalid_argument("vertical line at column " + std::to_string(positions[i]) + " width " +
										std::to_string(widths[i]) + " exceeds image width " +
										std::to_string(img.width()));
	LineImage out = img;
	const float v = std::clamp(intensity, 0.0f, 1.0f);
	for (std::size_t i = 0; i < positions.size(); ++i)
		for (int r = 0; r < img.height(); ++r)
			for (int c = positions[i]; c < positions[i] + widths[i]; ++c)
				out.set(r, c, std::min(out.at(r, c), v));
	return out;
}

LineImage degrade(const LineImage& clean, const DegradationRecipe& recipe, const BackgroundLibrary& assets)
{
	recipe.validate(clean.width());
	LineImage out = clean;
	if (recipe.background_id)
		out = apply_background(out, assets.find(*recipe.background_id).image, recipe.blend_alpha);
	out = apply_morphology(out, recipe.dilation_kernel, recipe.erosion_kernel);
	out = apply_blur(out, recipe.blur_kernel, recipe.blur_mode);
	if (!recipe.line_positions.empty())
		out = insert_vertical_lines(out, recipe.line_positions, recipe.line_widths, recipe.line_intensity);
	return out;
}

// ---------------------------------------------------------------------------
// Manifest

CorpusManifest::CorpusManifest(fs::path root, std::vector<ManifestRecord> records)
	: root_(std::move(root)), records_(std::move(records))
{}

namespace {

bool escapes_root(const fs::path& p)
{
	if (p.is_absolute())
		return true;
	int depth = 0;
	for (const auto& part : p.lexically_normal()) {
		if (part == "..")
			--depth;
		else if (part != ".")
			++depth;
		if (depth < 0)
			return true;
	}
	return false;
}

} // namespace

CorpusManifest CorpusManifest::load(const fs::path& file)
{
	std::ifstream in(file);
	if (!in)
		throw ConfigError("cannot open manifest " + file.string());

	std::vector<ManifestRecord> records;
	std::string line;
	int line_no = 0;
	while (std::getline(in, line)) {
		++line_no;
		if (line.find_first_not_of(" \t\r") == std::string::npos)
			continue;
		try {
			const auto j = json::parse(line);
			ManifestRecord rec;
			rec.id = j.at("id").get<std::string>();
			rec.clean_path = j.at("clean_path").get<std::string>();
			if (j.contains("degraded_path") && !j.at("degraded_path").is_null())
				rec.degraded_path = fs::path(j.at("degraded_path").get<std::string>());
			rec.text = utf8_decode(j.value("text", std::string{}));
			rec.split = parse_split(j.value("split", std::string("train")));
			if (j.contains("recipe") && !j.at("recipe").is_null())
				rec.recipe = recipe_from_json(j.at("recipe"));
			records.push_back(std::move(rec));
		} catch (const json::exception& e) {
			throw ConfigError(file.string() + ":" + std::to_string(line_no) + ": " + e.what());
		} catch (const std::invalid_argument& e) {
			throw ConfigError(file.string() + ":" + std::to_string(line_no) + ": " + e.what());
		}
	}
	CorpusManifest m(file.parent_path(), std::move(records));
	m.validate();
	return m;
}

void CorpusManifest::save(const fs::path& file) const
{
	if (file.has_parent_path())
		fs::create_directories(file.parent_path());
	std::ofstream out(file, std::ios::binary | std::ios::trunc);
	if (!out)
		throw std::runtime_error("cannot write manifest " + file.string());
	for (const auto& rec : records_) {
		json j{{"id", rec.id},
			   {"clean_path", rec.clean_path.generic_string()},
			   {"text", utf8_encode(rec.text)},
			   {"split", std::string(to_string(rec.split))}};
		j["degraded_path"] = rec.degraded_path ? json(rec.degraded_path->generic_string()) : json(nullptr);
		if (rec.recipe)
			j["recipe"] = to_json(*rec.recipe);
		out << j.dump() << '\n';
	}
}

std::vector<ManifestRecord> CorpusManifest::records(Split split) const
{
	std::vector<ManifestRecord> out;
	for (const auto& r : records_)
		if (r.split == split)
			out.push_back(r);
	return out;
}

std::size_t CorpusManifest::count(Split split) const
{
	return static_cast<std::size_t>(
		std::count_if(records_.begin(), records_.end(), [split](const auto& r) { return r.split == split; }));
}

std::u32string CorpusManifest::charset() const
{
	std::set<char32_t> chars;
	for (const auto& r : records_)
		chars.insert(r.text.begin(), r.text.end());
	return std::u32string(chars.begin(), chars.end());
}

void CorpusManifest::validate() const
{
	std::set<std::string> ids;
	for (const auto& r : records_) {
		if (r.id.empty())
			throw ConfigError("manifest record with empty id");
		if (!ids.insert(r.id).second)
			throw ConfigError("duplicate manifest id: " + r.id);
		if (r.text.empty() && r.split != Split::Test)
			throw ConfigError("empty transcription for " + std::string(to_string(r.split)) + " sample " + r.id);
		if (escapes_root(r.clean_path) || (r.degraded_path && escapes_root(*r.degraded_path)))
			throw ConfigError("path of sample " + r.id + " escapes the manifest root");
	}
}

// ---------------------------------------------------------------------------
// Corpus build

std::pair<std::vector<std::string>, std::vector<std::string>>
partition_backgrounds(const BackgroundLibrary& assets, const DegradationConfig& config, std::uint64_t master_seed)
{
	auto ids = assets.ids();
	std::mt19937_64 rng(mix64(master_seed ^ 0x6261636b67726f75ULL));
	std::shuffle(ids.begin(), ids.end(), rng);

	std::size_t n_test = static_cast<std::size_t>(std::ceil(config.test_background_fraction * ids.size()));
	if (ids.size() >= 2)
		n_test = std::clamp<std::size_t>(n_test, 1, ids.size() - 1);
	else
		n_test = 0;

	std::vector<std::string> test(ids.begin(), ids.begin() + static_cast<std::ptrdiff_t>(n_test));
	std::vector<std::string> train(ids.begin() + static_cast<std::ptrdiff_t>(n_test), ids.end());
	std::sort(test.begin(), test.end());
	std::sort(train.begin(), train.end());
	return {train, test};
}

BuildResult build_corpus(const CorpusManifest& input, const BackgroundLibrary& assets, const DegradationConfig& config,
						 std::uint64_t master_seed, const BuildOptions& options)
{
	config.validate();
	input.validate();
	if (options.output_dir.empty())
		throw ConfigError("output directory required");

	BuildResult result;
	auto [train_pool, test_pool] = partition_backgrounds(assets, config, master_seed);
	const bool wants_backgrounds = config.background_probability > 0.0 && assets.size() > 0;
	if (wants_backgrounds && input.count(Split::Test) > 0 && input.count(Split::Train) + input.count(Split::Valid) > 0 &&
		assets.size() < 2)
		throw ConfigError("at least two background assets are needed to keep train and test pools disjoint");
	// With only one side of the split present, that side may use every asset.
	if (input.count(Split::Test) == 0) {
		train_pool.insert(train_pool.end(), test_pool.begin(), test_pool.end());
		std::sort(train_pool.begin(), train_pool.end());
		test_pool.clear();
	} else if (input.count(Split::Train) + input.count(Split::Valid) == 0) {
		test_pool.insert(test_pool.end(), train_pool.begin(), train_pool.end());
		std::sort(test_pool.begin(), test_pool.end());
		train_pool.clear();
	}
	result.train_backgrounds = train_pool;
	result.test_backgrounds = test_pool;

	const fs::path clean_dir = options.output_dir / "clean";
	const fs::path degraded_dir = options.output_dir / "degraded";
	if (!options.resume) {
		fs::remove_all(clean_dir);
		fs::remove_all(degraded_dir);
	}
	fs::create_directories(clean_dir);
	fs::create_directories(degraded_dir);

	const auto& in_records = input.records();
	std::vector<ManifestRecord> out_records(in_records.size());
	std::vector<char> ok(in_records.size(), 0);
	std::mutex failure_mutex;
	std::atomic<std::size_t> next{0};

	auto worker = [&] {
		for (std::size_t i = next++; i < in_records.size(); i = next++) {
			const auto& rec = in_records[i];
			try {
				const LineImage clean = read_png(input.resolve(rec.clean_path));
				const auto& pool = rec.split == Split::Test ? test_pool : train_pool;
				const auto recipe =
					sample_recipe(derive_seed(master_seed, rec.id), config, clean.width(), wants_backgrounds ? pool : std::vector<std::string>{});

				ManifestRecord out = rec;
				out.clean_path = fs::path("clean") / (rec.id + ".png");
				out.degraded_path = fs::path("degraded") / (rec.id + ".png");
				out.recipe = recipe;

				const fs::path degraded_file = options.output_dir / *out.degraded_path;
				write_png(options.output_dir / out.clean_path, clean);
				if (!(options.resume && fs::exists(degraded_file)))
					write_png(degraded_file, degrade(clean, recipe, assets));
				out_records[i] = std::move(out);
				ok[i] = 1;
			} catch (const std::exception& e) {
				std::lock_guard lock(failure_mutex);
				result.failures.push_back({rec.id, e.what()});
			}
		}
	};

	const int jobs = std::max(1, options.jobs);
	if (jobs == 1) {
		worker();
	} else {
		std::vector<std::jthread> threads;
		for (int t = 0; t < jobs; ++t)
			threads.emplace_back(worker);
	}

	std::vector<ManifestRecord> written;
	for (std::size_t i = 0; i < out_records.size(); ++i)
		if (ok[i]) {
			++result.counts[out_records[i].split];
			written.push_back(std::move(out_records[i]));
		}
	std::sort(result.failures.begin(), result.failures.end(),
			  [](const auto& a, const auto& b) { return a.id < b.id; });

	result.manifest = CorpusManifest(options.output_dir, std::move(written));
	result.manifest.save(options.output_dir / "manifest.jsonl");
	return result;
}

} // namespace docenh

/*
 * Copyright 2026 The docenh Authors
 */
// SPDX-License-Identifier: Apache-2.0

#include "docenh/models.hpp"

#include "docenh/errors.hpp"
#include "docenh/text.hpp"

#include <cstring>

namespace docenh {

using nlohmann::json;
namespace nn = torch::nn;

void GeneratorSpec::validate() const
{
	if (base_channels < 1)
		throw ConfigError("generator base_channels must be >= 1");
	if (dropout < 0.0 || dropout >= 1.0)
		throw ConfigError("generator dropout must lie in [0, 1)");
	if (output_channels != 1)
		throw ConfigError("generator output_channels must be 1");
	static_assert(conv_layer_count() == 23);
}

void DiscriminatorSpec::validate() const
{
	if (base_channels < 1)
		throw ConfigError("discriminator base_channels must be >= 1");
	if (input_channels != 2 || output_channels != 1)
		throw ConfigError("discriminator takes 2 input channels and emits 1");
}

void RecognizerSpec::validate() const
{
	if (conv_channels.size() != 6)
		throw ConfigError("recognizer conv_channels needs 6 entries");
	for (int c : conv_channels)
		if (c < 1)
			throw ConfigError("recognizer conv_channels must be positive");
	if (gru_hidden < 1 || gru_layers < 1)
		throw ConfigError("recognizer GRU sizes must be positive");
	if (dropout < 0.0 || dropout >= 1.0)
		throw ConfigError("recognizer dropout must lie in [0, 1)");
	if (class_count < 2)
		throw ConfigError("recognizer needs at least one character plus the blank");
}

json to_json(const GeneratorSpec& s)
{
	return json{{"levels", GeneratorSpec::kLevels},
				{"conv_layer_count", GeneratorSpec::conv_layer_count()},
				{"base_channels", s.base_channels},
				{"batch_norm", s.batch_norm},
				{"dropout", s.dropout},
				{"output_channels", s.output_channels}};
}

json to_json(const DiscriminatorSpec& s)
{
	return json{{"input_channels", s.input_channels},
				{"base_channels", s.base_channels},
				{"downsample_factor", DiscriminatorSpec::downsample_factor()},
				{"output_channels", s.output_channels}};
}

json to_json(const RecognizerSpec& s)
{
	return json{{"conv_channels", s.conv_channels},
				{"gru_hidden", s.gru_hidden},
				{"gru_layers", s.gru_layers},
				{"dropout", s.dropout},
				{"class_count", s.class_count},
				{"width_stride", RecognizerSpec::kWidthStride}};
}

GeneratorSpec generator_spec_from_json(const json& j)
{
	GeneratorSpec s;
	try {
		if (j.contains("levels") && j.at("levels").get<int>() != GeneratorSpec::kLevels)
			throw ConfigError("generator levels must be " + std::to_string(GeneratorSpec::kLevels));
		s.base_channels = j.value("base_channels", s.base_channels);
		s.batch_norm = j.value("batch_norm", s.batch_norm);
		s.dropout = j.value("dropout", s.dropout);
		s.output_channels = j.value("output_channels", s.output_channels);
	} catch (const json::exception& e) {
		throw ConfigError(std::string("generator spec: ") + e.what());
	}
	s.validate();
	return s;
}

DiscriminatorSpec discriminator_spec_from_json(const json& j)
{
	DiscriminatorSpec s;
	try {
		s.input_channels = j.value("input_channels", s.input_channels);
		s.base_channels = j.value("base_channels", s.base_channels);
		s.output_channels = j.value("output_channels", s.output_channels);
	} catch (const json::exception& e) {
		throw ConfigError(std::string("discriminator spec: ") + e.what());
	}
	s.validate();
	return s;
}

RecognizerSpec recognizer_spec_from_json(const json& j)
{
	RecognizerSpec s;
	try {
		s.conv_channels = j.value("conv_channels", s.conv_channels);
		s.gru_hidden = j.value("gru_hidden", s.gru_hidden);
		s.gru_layers = j.value("gru_layers", s.gru_layers);
		s.dropout = j.value("dropout", s.dropout);
		s.class_count = j.value("class_count", s.class_count);
	} catch (const json::exception& e) {
		throw ConfigError(std::string("recognizer spec: ") + e.what());
	}
	return s;
}

namespace {

nn::Conv2dOptions conv3(int in, int out, bool bias = true)
{
	return nn::Conv2dOptions(in, out, 3).padding(1).bias(bias);
}

void require_image_batch(const torch::Tensor& x, int multiple_h, int multiple_w, const char* who)
{
	if (x.dim() != 4 || x.size(1) != 1)
		throw ContractError(std::string(who) + ": expected an (N,1,H,W) batch");
	if (x.size(2) % multiple_h != 0 || x.size(3) % multiple_w != 0)
		throw ContractError(std::string(who) + ": height must be a multiple of " + std::to_string(multiple_h) +
							" and width a multiple of " + std::to_string(multiple_w));
}

} // namespace

DoubleConvImpl::DoubleConvImpl(int in, int out, bool batch_norm, double dropout)
{
	conv1_ = register_module("conv1", nn::Conv2d(conv3(in, out, !batch_norm)));
	conv2_ = register_module("conv2", nn::Conv2d(conv3(out, out, !batch_norm)));
	if (batch_norm) {
		bn1_ = register_module("bn1", nn::BatchNorm2d(out));
		bn2_ = register_module("bn2", nn::BatchNorm2d(out));
	}
	if (dropout > 0.0)
		drop_ = register_module("dropout", nn::Dropout2d(dropout));
}

torch::Tensor DoubleConvImpl::forward(torch::Tensor x)
{
	x = conv1_(x);
	if (bn1_)
		x = bn1_(x);
	x = conv2_(torch::relu(x));
	if (bn2_)
		x = bn2_(x);
	x = torch::relu(x);
	if (drop_)
		x = drop_(x);
	return x;
}

GeneratorImpl::GeneratorImpl(const GeneratorSpec& spec) : spec_(spec)
{
	spec_.validate();
	constexpr int L = GeneratorSpec::kLevels;
	std::vector<int> widths;
	for (int i = 0; i < L; ++i)
		widths.push_back(spec.base_channels << i);

	int in = 1;
	for (int i = 0; i < L; ++i) {
		down_->push_back(DoubleConv(in, widths[i], spec.batch_norm, i == L - 1 ? spec.dropout : 0.0));
		in = widths[i];
	}
	bottleneck_ = DoubleConv(in, widths[L - 1], spec.batch_norm, spec.dropout);
	in = widths[L - 1];
	for (int i = L - 1; i >= 0; --i) {
		up_->push_back(nn::ConvTranspose2d(nn::ConvTranspose2dOptions(in, widths[i], 2).stride(2)));
		dec_->push_back(DoubleConv(2 * widths[i], widths[i], spec.batch_norm, 0.0));
		in = widths[i];
	}
	head_ = nn::Conv2d(nn::Conv2dOptions(in, spec.output_channels, 1));

	register_module("down", down_);
	register_module("bottleneck", bottleneck_);
	register_module("up", up_);
	register_module("dec", dec_);
	register_module("head", head_);
}

torch::Tensor GeneratorImpl::forward(torch::Tensor x)
{
	constexpr int f = GeneratorSpec::downsample_factor();
	require_image_batch(x, f, f, "generator");
	std::vector<torch::Tensor> skips;
	for (const auto& level : *down_) {
		x = level->as<DoubleConvImpl>()->forward(x);
		skips.push_back(x);
		x = torch::max_pool2d(x, 2);
	}
	x = bottleneck_(x);
	for (std::size_t i = 0; i < up_->size(); ++i) {
		x = up_[i]->as<nn::ConvTranspose2dImpl>()->forward(x);
		x = torch::cat({skips[skips.size() - 1 - i], x}, 1);
		x = dec_[i]->as<DoubleConvImpl>()->forward(x);
	}
	return torch::sigmoid(head_(x));
}

int GeneratorImpl::count_conv_layers() const
{
	int n = 0;
	for (const auto& m : modules(false))
		if (m->as<nn::Conv2dImpl>() || m->as<nn::ConvTranspose2dImpl>())
			++n;
	return n;
}

DiscriminatorImpl::DiscriminatorImpl(const DiscriminatorSpec& spec) : spec_(spec)
{
	spec_.validate();
	const int b = spec.base_channels;
	const int widths[DiscriminatorSpec::kLevels] = {b, 2 * b, 4 * b, 4 * b};
	int in = spec.input_channels;
	for (int i = 0; i < DiscriminatorSpec::kLevels; ++i) {
		body_->push_back(nn::Conv2d(conv3(in, widths[i], i == 0)));
		if (i > 0)
			body_->push_back(nn::BatchNorm2d(widths[i]));
		body_->push_back(nn::LeakyReLU(nn::LeakyReLUOptions().negative_slope(0.2)));
		body_->push_back(nn::MaxPool2d(nn::MaxPool2dOptions(2)));
		in = widths[i];
	}
	body_->push_back(nn::Conv2d(conv3(in, spec.output_channels)));
	body_->push_back(nn::Sigmoid());
	register_module("body", body_);
}

torch::Tensor DiscriminatorImpl::forward(torch::Tensor degraded, torch::Tensor candidate)
{
	constexpr int f = DiscriminatorSpec::downsample_factor();
	require_image_batch(degraded, f, f, "discriminator");
	if (!degraded.sizes().equals(candidate.sizes()))
		throw ContractError("discriminator: degraded and candidate shapes differ");
	return body_->forward(torch::cat({degraded, candidate}, 1));
}

GatedConvImpl::GatedConvImpl(int channels)
{
	gate_ = register_module("gate", nn::Conv2d(conv3(channels, channels)));
}

torch::Tensor GatedConvImpl::forward(torch::Tensor x)
{
	return x * torch::sigmoid(gate_(x));
}

RecognizerImpl::RecognizerImpl(const RecognizerSpec& spec) : spec_(spec)
{
	spec_.validate();
	const auto& c = spec.conv_channels;
	// (out channels, height stride, width stride, gated, dropout)
	struct Block
	{
		int out, sh, sw;
		bool gated, drop;
	};
	const Block blocks[6] = {{c[0], 2, 2, true, false}, {c[1], 1, 1, true, false}, {c[2], 4, 2, true, true},
							 {c[3], 1, 1, true, false}, {c[4], 4, 2, true, true},	{c[5], 1, 1, false, false}};
	int in = 1;
	for (const auto& b : blocks) {
		encoder_->push_back(nn::Conv2d(conv3(in, b.out).stride({b.sh, b.sw})));
		encoder_->push_back(nn::PReLU());
		encoder_->push_back(nn::BatchNorm2d(b.out));
		if (b.gated)
			encoder_->push_back(GatedConv(b.out));
		if (b.drop && spec.dropout > 0.0)
			encoder_->push_back(nn::Dropout(spec.dropout));
		in = b.out;
	}
	register_module("encoder", encoder_);
	gru_ = register_module("gru", nn::GRU(nn::GRUOptions(in, spec.gru_hidden)
											  .num_layers(spec.gru_layers)
											  .batch_first(true)
											  .bidirectional(true)
											  .dropout(spec.gru_layers > 1 ? spec.dropout : 0.0)));
	head_ = register_module("head", nn::Linear(2 * spec.gru_hidden, spec.class_count));
}

torch::Tensor RecognizerImpl::forward(torch::Tensor x)
{
	require_image_batch(x, 1, RecognizerSpec::kWidthStride, "recognizer");
	x = encoder_->forward(x);			// (N, C, H', T)
	x = std::get<0>(x.max(2));			// (N, C, T)
	x = x.permute({0, 2, 1}).contiguous(); // (N, T, C)
	x = std::get<0>(gru_->forward(x));
	return torch::log_softmax(head_(x), -1);
}

json to_json(const TrainingProvenance& p)
{
	json j{{"config_hash", p.config_hash}, {"iteration", p.iteration}, {"scenario", p.scenario}};
	j["validation_cer"] = p.validation_cer ? json(*p.validation_cer) : json(nullptr);
	j["validation_psnr"] = p.validation_psnr ? json(*p.validation_psnr) : json(nullptr);
	return j;
}

TrainingProvenance provenance_from_json(const json& j)
{
	TrainingProvenance p;
	p.config_hash = j.value("config_hash", "");
	p.iteration = j.value("iteration", std::int64_t{0});
	p.scenario = j.value("scenario", "");
	if (j.contains("validation_cer") && !j["validation_cer"].is_null())
		p.validation_cer = j["validation_cer"].get<double>();
	if (j.contains("validation_psnr") && !j["validation_psnr"].is_null())
		p.validation_psnr = j["validation_psnr"].get<double>();
	return p;
}

ModelBundle ModelBundle::create(const GeneratorSpec& g, const DiscriminatorSpec& d, RecognizerSpec r, Charset charset,
								std::uint64_t seed)
{
	if (charset.size() == 0)
		throw ConfigError("charset is empty");
	r.class_count = charset.class_count();
	torch::manual_seed(seed);
	ModelBundle b;
	b.generator_spec = g;
	b.discriminator_spec = d;
	b.recognizer_spec = r;
	b.charset = std::move(charset);
	b.generator = Generator(g);
	b.discriminator = Discriminator(d);
	b.recognizer = Recognizer(r);
	return b;
}

namespace {

void copy_state(const nn::Module& from, nn::Module& to)
{
	torch::NoGradGuard guard;
	auto src_p = from.named_parameters(true);
	for (auto& item : to.named_parameters(true))
		item.value().copy_(src_p[item.key()]);
	auto src_b = from.named_buffers(true);
	for (auto& item : to.named_buffers(true))
		item.value().copy_(src_b[item.key()]);
}

} // namespace

ModelBundle ModelBundle::clone() const
{
	ModelBundle b;
	b.generator_spec = generator_spec;
	b.discriminator_spec = discriminator_spec;
	b.recognizer_spec = recognizer_spec;
	b.charset = charset;
	b.provenance = provenance;
	b.generator = Generator(generator_spec);
	b.discriminator = Discriminator(discriminator_spec);
	b.recognizer = Recognizer(recognizer_spec);
	copy_state(*generator, *b.generator);
	copy_state(*discriminator, *b.discriminator);
	copy_state(*recognizer, *b.recognizer);
	b.generator->train(generator->is_training());
	b.discriminator->train(discriminator->is_training());
	b.recognizer->train(recognizer->is_training());
	return b;
}

void ModelBundle::train(bool on)
{
	generator->train(on);
	discriminator->train(on);
	recognizer->train(on);
}

torch::Tensor to_tensor(const std::vector<LineImage>& images)
{
	if (images.empty())
		throw ContractError("empty image batch");
	const int h = images.front().height(), w = images.front().width();
	auto out = torch::empty({static_cast<long>(images.size()), 1, h, w}, torch::kFloat32);
	float* dst = out.data_ptr<float>();
	for (const auto& img : images) {
		if (img.height() != h || img.width() != w)
			throw ContractError("images in a batch must share one size");
		std::memcpy(dst, img.values().data(), img.size() * sizeof(float));
		dst += img.size();
	}
	return out;
}

torch::Tensor to_tensor(const LineImage& image)
{
	return to_tensor(std::vector<LineImage>{image});
}

std::vector<LineImage> to_images(const torch::Tensor& batch)
{
	if (batch.dim() != 4 || batch.size(1) != 1)
		throw ContractError("expected an (N,1,H,W) tensor");
	const auto t = batch.detach().to(torch::kCPU, torch::kFloat32).contiguous();
	const int h = static_cast<int>(t.size(2)), w = static_cast<int>(t.size(3));
	const float* src = t.data_ptr<float>();
	std::vector<LineImage> out;
	for (long i = 0; i < t.size(0); ++i) {
		std::vector<float> v(src, src + static_cast<std::size_t>(h) * w);
		for (auto& x : v)
			x = std::clamp(x, 0.0f, 1.0f);
		out.emplace_back(h, w, std::move(v));
		src += static_cast<std::size_t>(h) * w;
	}
	return out;
}

namespace {

// Restores the module's train/eval mode on scope exit.
class EvalScope
{
public:
	explicit EvalScope(nn::Module& m) : module_(m), was_training_(m.is_training()) { module_.eval(); }
	~EvalScope() { module_.train(was_training_); }
	EvalScope(const EvalScope&) = delete;
	EvalScope& operator=(const EvalScope&) = delete;

private:
	nn::Module& module_;
	bool was_training_;
};

void require_charset_match(const ModelBundle& bundle)
{
	if (bundle.recognizer_spec.class_count != bundle.charset.class_count())
		throw ContractError("recognizer has " + std::to_string(bundle.recognizer_spec.class_count) +
							" classes but the charset needs " + std::to_string(bundle.charset.class_count()));
}

} // namespace

std::vector<LineImage> generate(const ModelBundle& bundle, const std::vector<LineImage>& images)
{
	torch::NoGradGuard guard;
	const auto g = bundle.generator.ptr();
	EvalScope scope(*g);
	return to_images(g->forward(to_tensor(images)));
}

std::vector<std::vector<float>> recognizer_probabilities(const ModelBundle& bundle,
														 const std::vector<LineImage>& images)
{
	require_charset_match(bundle);
	torch::NoGradGuard guard;
	const auto r = bundle.recognizer.ptr();
	EvalScope scope(*r);
	const auto probs = r->forward(to_tensor(images)).exp().contiguous();
	std::vector<std::vector<float>> out;
	const std::size_t per = static_cast<std::size_t>(probs.size(1) * probs.size(2));
	const float* p = probs.data_ptr<float>();
	for (long i = 0; i < probs.size(0); ++i, p += per)
		out.emplace_back(p, p + per);
	return out;
}

std::vector<std::u32string> recognize(const ModelBundle& bundle, const std::vector<LineImage>& images)
{
	std::vector<std::u32string> out;
	for (const auto& frames : recognizer_probabilities(bundle, images))
		out.push_back(greedy_ctc_decode(frames, static_cast<int>(frames.size() / bundle.charset.class_count()),
										bundle.charset));
	return out;
}

std::vector<std::u32string> read_enhanced(const ModelBundle& bundle, const std::vector<LineImage>& images)
{
	return recognize(bundle, generate(bundle, images));
}

std::uint64_t hash_module(const nn::Module& module)
{
	std::uint64_t h = fnv1a64("");
	auto feed = [&h](const std::string& name, const torch::Tensor& t) {
		h = fnv1a64(name, h);
		const auto c = t.detach().contiguous();
		h = fnv1a64(std::string_view(static_cast<const char*>(c.data_ptr()), c.nbytes()), h);
	};
	for (const auto& item : module.named_parameters(true))
		feed(item.key(), item.value());
	for (const auto& item : module.named_buffers(true))
		feed(item.key(), item.value());
	return h;
}

std::vector<torch::Tensor> normalization_state(const nn::Module& module)
{
	std::vector<torch::Tensor> out;
	for (const auto& m : module.modules(true)) {
		if (auto* bn = m->as<nn::BatchNorm2dImpl>()) {
			for (const auto& t : {bn->weight, bn->bias, bn->running_mean, bn->running_var, bn->num_batches_tracked})
				if (t.defined())
					out.push_back(t.detach().clone());
		}
	}
	return out;
}

} // namespace docenh

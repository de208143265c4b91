/*
 * Copyright 2026 The docenh Authors
 */
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "docenh/charset.hpp"
#include "docenh/image.hpp"

#include <torch/torch.h>

#include <json.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace docenh {

// Tensors are NCHW float32 with one channel; 1.0 is white paper.

/// U-Net with four pooling levels: two 3x3 convolutions per encoder level
/// and in the bottleneck, a transposed convolution plus two 3x3 convolutions
/// per decoder level, and a 1x1 sigmoid head.
struct GeneratorSpec
{
	static constexpr int kLevels = 4;

	int base_channels = 64; ///< level widths are base x {1, 2, 4, 8}, bottleneck base x 8
	bool batch_norm = true;
	double dropout = 0.5; ///< applied in the deepest encoder level and the bottleneck
	int output_channels = 1;

	static constexpr int conv_layer_count() { return 2 * kLevels + 2 + 3 * kLevels + 1; }
	static constexpr int downsample_factor() { return 1 << kLevels; }
	void validate() const;
};

/// Conditional patch classifier over the channel-wise concatenation of the
/// degraded image and a candidate.
struct DiscriminatorSpec
{
	static constexpr int kLevels = 4;

	int input_channels = 2;
	int base_channels = 64; ///< widths base x {1, 2, 4, 4}
	int output_channels = 1;

	static constexpr int downsample_factor() { return 1 << kLevels; }
	void validate() const;
};

/// Gated-convolution encoder, two bidirectional GRU layers and a linear
/// head over |charset| + 1 classes.
struct RecognizerSpec
{
	std::vector<int> conv_channels{16, 32, 40, 48, 56, 64};
	int gru_hidden = 128;
	int gru_layers = 2;
	double dropout = 0.2;
	int class_count = 0; ///< |charset| + 1, filled from the charset

	static constexpr int kWidthStride = 8;
	static constexpr int kHeightStride = 32;
	void validate() const;
};

nlohmann::json to_json(const GeneratorSpec& s);
nlohmann::json to_json(const DiscriminatorSpec& s);
nlohmann::json to_json(const RecognizerSpec& s);
GeneratorSpec generator_spec_from_json(const nlohmann::json& j);
DiscriminatorSpec discriminator_spec_from_json(const nlohmann::json& j);
RecognizerSpec recognizer_spec_from_json(const nlohmann::json& j);

class DoubleConvImpl : public torch::nn::Module
{
public:
	DoubleConvImpl(int in, int out, bool batch_norm, double dropout);
	torch::Tensor forward(torch::Tensor x);

private:
	torch::nn::Conv2d conv1_{nullptr}, conv2_{nullptr};
	torch::nn::BatchNorm2d bn1_{nullptr}, bn2_{nullptr};
	torch::nn::Dropout2d drop_{nullptr};
};
TORCH_MODULE(DoubleConv);

class GeneratorImpl : public torch::nn::Module
{
public:
	explicit GeneratorImpl(const GeneratorSpec& spec);
	/// (N,1,H,W) -> (N,1,H,W) in [0, 1]; H and W must be multiples of 16.
	torch::Tensor forward(torch::Tensor x);
	const GeneratorSpec& spec() const noexcept { return spec_; }
	/// Number of Conv2d and ConvTranspose2d layers actually registered.
	int count_conv_layers() const;

private:
	GeneratorSpec spec_;
	torch::nn::ModuleList down_, up_, dec_;
	DoubleConv bottleneck_{nullptr};
	torch::nn::Conv2d head_{nullptr};
};
TORCH_MODULE(Generator);

class DiscriminatorImpl : public torch::nn::Module
{
public:
	explicit DiscriminatorImpl(const DiscriminatorSpec& spec);
	/// Degraded and candidate (N,1,H,W) -> P(real) map (N,1,H/16,W/16).
	torch::Tensor forward(torch::Tensor degraded, torch::Tensor candidate);
	const DiscriminatorSpec& spec() const noexcept { return spec_; }

private:
	DiscriminatorSpec spec_;
	torch::nn::Sequential body_;
};
TORCH_MODULE(Discriminator);

/// x * sigmoid(conv(x)), channel count preserved.
class GatedConvImpl : public torch::nn::Module
{
public:
	explicit GatedConvImpl(int channels);
	torch::Tensor forward(torch::Tensor x);

private:
	torch::nn::Conv2d gate_{nullptr};
};
TORCH_MODULE(GatedConv);

class RecognizerImpl : public torch::nn::Module
{
public:
	explicit RecognizerImpl(const RecognizerSpec& spec);
	/// (N,1,H,W) -> log-probabilities (N,T,K) with T = W/8.
	torch::Tensor forward(torch::Tensor x);
	const RecognizerSpec& spec() const noexcept { return spec_; }

private:
	RecognizerSpec spec_;
	torch::nn::Sequential encoder_;
	torch::nn::GRU gru_{nullptr};
	torch::nn::Linear head_{nullptr};
};
TORCH_MODULE(Recognizer);

struct TrainingProvenance
{
	std::string config_hash;
	std::int64_t iteration = 0;
	std::optional<double> validation_cer;
	std::optional<double> validation_psnr;
	std::string scenario;
};

nlohmann::json to_json(const TrainingProvenance& p);
TrainingProvenance provenance_from_json(const nlohmann::json& j);

/// The three networks with their charset and specs.
struct ModelBundle
{
	GeneratorSpec generator_spec;
	DiscriminatorSpec discriminator_spec;
	RecognizerSpec recognizer_spec;
	Charset charset;
	Generator generator{nullptr};
	Discriminator discriminator{nullptr};
	Recognizer recognizer{nullptr};
	TrainingProvenance provenance;

	/// Fresh weights drawn from `seed`.
	static ModelBundle create(const GeneratorSpec& g, const DiscriminatorSpec& d, RecognizerSpec r, Charset charset,
							  std::uint64_t seed);

	/// Independent copy of every parameter and buffer.
	ModelBundle clone() const;

	void train(bool on = true);
	void eval() { train(false); }
};

torch::Tensor to_tensor(const std::vector<LineImage>& images);
torch::Tensor to_tensor(const LineImage& image);
std::vector<LineImage> to_images(const torch::Tensor& batch);

/// Runs the generator in evaluation mode without gradients.
std::vector<LineImage> generate(const ModelBundle& bundle, const std::vector<LineImage>& images);

/// Per-frame class probabilities (T x K, row-major) for each image, evaluation mode.
std::vector<std::vector<float>> recognizer_probabilities(const ModelBundle& bundle,
														 const std::vector<LineImage>& images);

/// Greedy transcriptions of the recognizer applied to `images`.
std::vector<std::u32string> recognize(const ModelBundle& bundle, const std::vector<LineImage>& images);

/// Greedy transcriptions of the recognizer applied to the generator output.
std::vector<std::u32string> read_enhanced(const ModelBundle& bundle, const std::vector<LineImage>& images);

/// FNV-1a over every parameter and buffer of a module, in registration order.
std::uint64_t hash_module(const torch::nn::Module& module);

/// Normalization-layer parameters and running statistics of a module.
std::vector<torch::Tensor> normalization_state(const torch::nn::Module& module);

} // namespace docenh

/*
 * Copyright 2026 The docenh Authors
 */
// SPDX-License-Identifier: Apache-2.0

#include "docenh/checkpoint.hpp"
#include "docenh/enhancer.hpp"
#include "docenh/errors.hpp"
#include "docenh/models.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>

using namespace docenh;
namespace fs = std::filesystem;

namespace {

ModelBundle tiny_bundle(std::uint64_t seed = 1)
{
	GeneratorSpec g;
	g.base_channels = 4;
	DiscriminatorSpec d;
	d.base_channels = 4;
	RecognizerSpec r;
	r.conv_channels = {4, 4, 8, 8, 8, 8};
	r.gru_hidden = 8;
	return ModelBundle::create(g, d, r, Charset(U"abc"), seed);
}

} // namespace

TEST_CASE("generator has 23 convolution layers")
{
	CHECK(GeneratorSpec::conv_layer_count() == 23);
	CHECK(tiny_bundle().generator->count_conv_layers() == 23);
	GeneratorSpec wide;
	CHECK(Generator(wide)->count_conv_layers() == 23);
}

TEST_CASE("generator shape, range and evaluation determinism")
{
	auto b = tiny_bundle();
	b.eval();
	const auto x = torch::rand({2, 1, 32, 64});
	torch::NoGradGuard guard;
	const auto y = b.generator->forward(x);
	CHECK(y.sizes() == x.sizes());
	CHECK(y.min().item<float>() >= 0.0f);
	CHECK(y.max().item<float>() <= 1.0f);
	CHECK(torch::equal(y, b.generator->forward(x)));
	CHECK_THROWS_AS(b.generator->forward(torch::rand({1, 1, 30, 64})), ContractError);
	CHECK_THROWS_AS(b.generator->forward(torch::rand({1, 2, 32, 64})), ContractError);
}

TEST_CASE("discriminator score map")
{
	auto b = tiny_bundle();
	b.eval();
	torch::NoGradGuard guard;
	const auto d = torch::rand({1, 1, 32, 64}), c1 = torch::rand({1, 1, 32, 64}), c2 = torch::rand({1, 1, 32, 64});
	const auto s = b.discriminator->forward(d, c1);
	CHECK(s.sizes() == torch::IntArrayRef{1, 1, 2, 4});
	CHECK(s.min().item<float>() > 0.0f);
	CHECK(s.max().item<float>() < 1.0f);
	CHECK(torch::equal(b.discriminator->forward(c1, c1), b.discriminator->forward(c1, c1)));
	CHECK_FALSE(torch::equal(s, b.discriminator->forward(d, c2)));
	CHECK_THROWS_AS(b.discriminator->forward(d, torch::rand({1, 1, 32, 48})), ContractError);
}

TEST_CASE("recognizer frames are distributions over charset plus blank")
{
	auto b = tiny_bundle();
	std::mt19937_64 rng(3);
	const std::vector<LineImage> imgs{oracle::random_gray(rng, 32, 64), oracle::random_gray(rng, 32, 64)};
	const auto probs = recognizer_probabilities(b, imgs);
	REQUIRE(probs.size() == 2);
	const int K = b.charset.class_count();
	CHECK(K == 4);
	CHECK(b.charset.blank_index() == 3);
	for (const auto& frames : probs) {
		REQUIRE(frames.size() == static_cast<std::size_t>(64 / 8 * K));
		for (std::size_t t = 0; t < frames.size() / K; ++t) {
			double s = 0;
			for (int k = 0; k < K; ++k)
				s += frames[t * K + k];
			REQUIRE(std::abs(s - 1.0) <= 1e-5);
		}
	}
	CHECK(recognize(b, imgs).size() == 2);

	auto mismatched = b;
	mismatched.charset = Charset(U"abcd");
	CHECK_THROWS_AS(recognize(mismatched, imgs), ContractError);
	CHECK_THROWS_AS(b.recognizer->forward(torch::rand({1, 1, 32, 60})), ContractError);
}

TEST_CASE("bundle creation is seeded and clones are independent")
{
	auto a = tiny_bundle(9), b = tiny_bundle(9), c = tiny_bundle(10);
	CHECK(hash_module(*a.generator) == hash_module(*b.generator));
	CHECK(hash_module(*a.recognizer) == hash_module(*b.recognizer));
	CHECK(hash_module(*a.generator) != hash_module(*c.generator));

	auto copy = a.clone();
	CHECK(hash_module(*copy.discriminator) == hash_module(*a.discriminator));
	{
		torch::NoGradGuard guard;
		copy.discriminator->parameters()[0].add_(1.0);
	}
	CHECK(hash_module(*copy.discriminator) != hash_module(*a.discriminator));
}

TEST_CASE("checkpoint round trip is bit-exact")
{
	const fs::path dir = fs::temp_directory_path() / "docenh_ckpt_test";
	fs::remove_all(dir);
	auto b = tiny_bundle(4);
	{
		// Move BN running statistics away from their defaults.
		b.train();
		torch::NoGradGuard guard;
		b.generator->forward(torch::rand({2, 1, 32, 32}));
	}
	b.provenance.config_hash = "abc123";
	b.provenance.iteration = 42;
	b.provenance.validation_cer = 3.5;
	CheckpointExtras extras;
	extras.metadata["note"] = "x";
	extras.blobs["raw"] = std::string("\0\1\2", 3);
	save_checkpoint(dir / "m.ckpt", b, extras);

	const auto loaded = load_checkpoint(dir / "m.ckpt");
	CHECK(hash_module(*loaded.bundle.generator) == hash_module(*b.generator));
	CHECK(hash_module(*loaded.bundle.discriminator) == hash_module(*b.discriminator));
	CHECK(hash_module(*loaded.bundle.recognizer) == hash_module(*b.recognizer));
	CHECK(loaded.bundle.charset == b.charset);
	CHECK(loaded.bundle.generator_spec.base_channels == 4);
	CHECK(loaded.bundle.recognizer_spec.conv_channels == b.recognizer_spec.conv_channels);
	CHECK(loaded.bundle.provenance.iteration == 42);
	CHECK(loaded.bundle.provenance.validation_cer == 3.5);
	CHECK(loaded.extras.metadata["note"] == "x");
	CHECK(loaded.extras.blobs.at("raw") == std::string("\0\1\2", 3));

	// Unknown format versions are rejected.
	{
		std::fstream f(dir / "m.ckpt", std::ios::in | std::ios::out | std::ios::binary);
		f.seekp(8);
		const std::uint32_t v = kCheckpointFormatVersion + 1;
		f.write(reinterpret_cast<const char*>(&v), sizeof v);
	}
	CHECK_THROWS_AS(load_checkpoint(dir / "m.ckpt"), std::runtime_error);
	std::ofstream(dir / "junk.ckpt") << "not a checkpoint at all";
	CHECK_THROWS_AS(load_checkpoint(dir / "junk.ckpt"), std::runtime_error);
	fs::remove_all(dir);
}

TEST_CASE("patch enhancer drives the page pipeline")
{
	auto b = tiny_bundle(6);
	const auto enhancer = make_patch_enhancer(b, 3);
	std::mt19937_64 rng(8);
	const LineImage page = oracle::random_gray(rng, 50, 70);
	EnhanceOptions opts;
	opts.patch_h = 32;
	opts.patch_w = 32;
	const auto out = enhance_page(enhancer, page, opts);
	CHECK(out.height() == 50);
	CHECK(out.width() == 70);
	CHECK(out == enhance_page(enhancer, page, opts));

	opts.flip_vote = false;
	CHECK(enhance_page(enhancer, page, opts) == threshold(enhance_page_gray(enhancer, page, opts), 0.5f));
}

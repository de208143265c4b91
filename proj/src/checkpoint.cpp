/*
 * Copyright 2026 The docenh Authors
 */
// SPDX-License-Identifier: Apache-2.0

#include "docenh/checkpoint.hpp"

#include "docenh/text.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace docenh {

using nlohmann::json;
namespace fs = std::filesystem;

static_assert(std::endian::native == std::endian::little, "checkpoint IO assumes a little-endian host");

namespace {

constexpr char kMagic[8] = {'D', 'O', 'C', 'E', 'N', 'H', 'C', 'K'};

struct Collection
{
	const char* name;
	const torch::nn::Module* module;
};

std::vector<std::pair<std::string, torch::Tensor>> state_of(const torch::nn::Module& m)
{
	std::vector<std::pair<std::string, torch::Tensor>> out;
	for (const auto& item : m.named_parameters(true))
		out.emplace_back(item.key(), item.value());
	for (const auto& item : m.named_buffers(true))
		out.emplace_back(item.key(), item.value());
	return out;
}

std::string dtype_name(const torch::Tensor& t)
{
	if (t.scalar_type() == torch::kFloat32)
		return "float32";
	if (t.scalar_type() == torch::kInt64)
		return "int64";
	throw std::runtime_error("checkpoint: unsupported tensor dtype " + std::string(c10::toString(t.scalar_type())));
}

} // namespace

void save_checkpoint(const fs::path& file, const ModelBundle& bundle, const CheckpointExtras& extras)
{
	json tensors = json::array();
	std::string payload;
	const Collection collections[] = {{"generator", bundle.generator.get()},
									  {"discriminator", bundle.discriminator.get()},
									  {"recognizer", bundle.recognizer.get()}};
	for (const auto& c : collections) {
		for (const auto& [name, tensor] : state_of(*c.module)) {
			const auto t = tensor.detach().to(torch::kCPU).contiguous();
			tensors.push_back(json{{"collection", c.name},
								   {"name", name},
								   {"dtype", dtype_name(t)},
								   {"shape", t.sizes().vec()},
								   {"offset", payload.size()},
								   {"bytes", t.nbytes()}});
			payload.append(static_cast<const char*>(t.data_ptr()), t.nbytes());
		}
	}
	json blobs = json::array();
	for (const auto& [name, bytes] : extras.blobs) {
		blobs.push_back(json{{"name", name}, {"offset", payload.size()}, {"bytes", bytes.size()}});
		payload += bytes;
	}

	const json header{{"format_version", kCheckpointFormatVersion},
					  {"charset", utf8_encode(bundle.charset.chars())},
					  {"specs",
					   {{"generator", to_json(bundle.generator_spec)},
						{"discriminator", to_json(bundle.discriminator_spec)},
						{"recognizer", to_json(bundle.recognizer_spec)}}},
					  {"provenance", to_json(bundle.provenance)},
					  {"metadata", extras.metadata},
					  {"tensors", tensors},
					  {"blobs", blobs}};
	const std::string head = header.dump();

	if (file.has_parent_path())
		fs::create_directories(file.parent_path());
	const fs::path tmp = fs::path(file).concat(".tmp");
	{
		std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
		if (!out)
			throw std::runtime_error("cannot write checkpoint " + tmp.string());
		const std::uint32_t version = kCheckpointFormatVersion;
		const std::uint64_t head_len = head.size();
		out.write(kMagic, sizeof kMagic);
		out.write(reinterpret_cast<const char*>(&version), sizeof version);
		out.write(reinterpret_cast<const char*>(&head_len), sizeof head_len);
		out.write(head.data(), static_cast<std::streamsize>(head.size()));
		out.write(payload.data(), static_cast<std::streamsize>(payload.size()));
		if (!out)
			throw std::runtime_error("failed writing checkpoint " + tmp.string());
	}
	fs::rename(tmp, file);
}

LoadedCheckpoint load_checkpoint(const fs::path& file)
{
	std::ifstream in(file, std::ios::binary);
	if (!in)
		throw std::runtime_error("cannot open checkpoint " + file.string());
	char magic[8];
	std::uint32_t version = 0;
	std::uint64_t head_len = 0;
	in.read(magic, sizeof magic);
	in.read(reinterpret_cast<char*>(&version), sizeof version);
	in.read(reinterpret_cast<char*>(&head_len), sizeof head_len);
	if (!in || std::memcmp(magic, kMagic, sizeof magic) != 0)
		throw std::runtime_error(file.string() + " is not a docenh checkpoint");
	if (version != kCheckpointFormatVersion)
		throw std::runtime_error("unsupported checkpoint format version " + std::to_string(version) + " in " +
								 file.string());
	std::string head(head_len, '\0');
	in.read(head.data(), static_cast<std::streamsize>(head_len));
	const std::string payload{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
	if (!in.eof() && in.fail())
		throw std::runtime_error("truncated checkpoint " + file.string());

	LoadedCheckpoint out;
	try {
		const json header = json::parse(head);
		const auto& specs = header.at("specs");
		ModelBundle b;
		b.generator_spec = generator_spec_from_json(specs.at("generator"));
		b.discriminator_spec = discriminator_spec_from_json(specs.at("discriminator"));
		b.recognizer_spec = recognizer_spec_from_json(specs.at("recognizer"));
		b.charset = Charset(utf8_decode(header.at("charset").get<std::string>()));
		b.provenance = provenance_from_json(header.at("provenance"));
		b.generator = Generator(b.generator_spec);
		b.discriminator = Discriminator(b.discriminator_spec);
		b.recognizer = Recognizer(b.recognizer_spec);

		std::map<std::pair<std::string, std::string>, const json*> table;
		for (const auto& t : header.at("tensors"))
			table[{t.at("collection").get<std::string>(), t.at("name").get<std::string>()}] = &t;

		torch::NoGradGuard guard;
		const Collection collections[] = {{"generator", b.generator.get()},
										  {"discriminator", b.discriminator.get()},
										  {"recognizer", b.recognizer.get()}};
		std::size_t used = 0;
		for (const auto& c : collections) {
			for (auto& [name, tensor] : state_of(*c.module)) {
				const auto it = table.find({c.name, name});
				if (it == table.end())
					throw std::runtime_error(std::string("missing tensor ") + c.name + "/" + name);
				const json& entry = *it->second;
				if (entry.at("shape").get<std::vector<std::int64_t>>() != tensor.sizes().vec() ||
					entry.at("dtype").get<std::string>() != dtype_name(tensor))
					throw std::runtime_error(std::string("shape or dtype mismatch for ") + c.name + "/" + name);
				const auto offset = entry.at("offset").get<std::size_t>();
				const auto bytes = entry.at("bytes").get<std::size_t>();
				if (bytes != tensor.nbytes() || offset + bytes > payload.size())
					throw std::runtime_error(std::string("corrupt tensor record ") + c.name + "/" + name);
				std::memcpy(tensor.data_ptr(), payload.data() + offset, bytes);
				++used;
			}
		}
		if (used != table.size())
			throw std::runtime_error("checkpoint holds tensors the specs do not define");

		for (const auto& blob : header.at("blobs")) {
			const auto offset = blob.at("offset").get<std::size_t>();
			const auto bytes = blob.at("bytes").get<std::size_t>();
			if (offset + bytes > payload.size())
				throw std::runtime_error("corrupt blob record");
			out.extras.blobs[blob.at("name").get<std::string>()] = payload.substr(offset, bytes);
		}
		out.extras.metadata = header.value("metadata", json::object());
		out.bundle = std::move(b);
	} catch (const json::exception& e) {
		throw std::runtime_error("malformed checkpoint header in " + file.string() + ": " + e.what());
	}
	return out;
}

std::string serialize_optimizer(const torch::optim::Optimizer& optimizer)
{
	torch::serialize::OutputArchive archive;
	optimizer.save(archive);
	std::ostringstream out;
	archive.save_to(out);
	return out.str();
}

void deserialize_optimizer(torch::optim::Optimizer& optimizer, const std::string& bytes)
{
	std::istringstream in(bytes);
	torch::serialize::InputArchive archive;
	archive.load_from(in);
	optimizer.load(archive);
}

} // namespace docenh

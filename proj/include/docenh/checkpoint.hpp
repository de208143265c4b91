/*
 * Copyright 2026 The docenh Authors
 */
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "docenh/models.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>

namespace docenh {

// Layout: "DOCENHCK", u32 format version, u64 header length, JSON header,
// then raw little-endian tensor data followed by opaque blobs.
inline constexpr std::uint32_t kCheckpointFormatVersion = 1;

/// Optional payload stored next to the networks (trainer state, notes).
struct CheckpointExtras
{
	nlohmann::json metadata = nlohmann::json::object();
	std::map<std::string, std::string> blobs;
};

struct LoadedCheckpoint
{
	ModelBundle bundle;
	CheckpointExtras extras;
};

/// Writes to a temporary sibling and renames, so readers never see a
/// partial file.
void save_checkpoint(const std::filesystem::path& file, const ModelBundle& bundle, const CheckpointExtras& extras = {});

/// Throws std::runtime_error on a bad magic, an unknown format version or a
/// tensor table that disagrees with the stored specs.
LoadedCheckpoint load_checkpoint(const std::filesystem::path& file);

inline ModelBundle load_bundle(const std::filesystem::path& file)
{
	return load_checkpoint(file).bundle;
}

std::string serialize_optimizer(const torch::optim::Optimizer& optimizer);
void deserialize_optimizer(torch::optim::Optimizer& optimizer, const std::string& bytes);

} // namespace docenh

/*
 * Copyright 2026 The docenh Authors
 */
// SPDX-License-Identifier: Apache-2.0

#include "docenh/enhancer.hpp"

#include "docenh/errors.hpp"

#include <algorithm>

namespace docenh {

PatchEnhancer make_patch_enhancer(const ModelBundle& bundle, int batch_size)
{
	if (batch_size < 1)
		throw ConfigError("enhancer batch size must be >= 1");
	return [&bundle, batch_size](const std::vector<LineImage>& patches) {
		std::vector<LineImage> out;
		out.reserve(patches.size());
		for (std::size_t start = 0; start < patches.size(); start += static_cast<std::size_t>(batch_size)) {
			const auto end = std::min(patches.size(), start + static_cast<std::size_t>(batch_size));
			const std::vector<LineImage> chunk(patches.begin() + static_cast<std::ptrdiff_t>(start),
											   patches.begin() + static_cast<std::ptrdiff_t>(end));
			for (auto& img : generate(bundle, chunk))
				out.push_back(std::move(img));
		}
		return out;
	};
}

} // namespace docenh

/*
 * Copyright 2026 The docenh Authors
 */
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "docenh/inference.hpp"
#include "docenh/models.hpp"

namespace docenh {

/// Wraps the bundle's generator (evaluation mode, no gradients) as a
/// PatchEnhancer that processes `batch_size` patches per forward pass.
/// The bundle must outlive the returned callable.
PatchEnhancer make_patch_enhancer(const ModelBundle& bundle, int batch_size = 4);

} // namespace docenh

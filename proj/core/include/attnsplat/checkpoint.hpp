// Copyright Contributors to the attnsplat project
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "attnsplat/gaussian.hpp"

#include <string>

namespace attnsplat {

/// Binary cloud checkpoint. Little-endian; header carries a magic tag,
/// format version, Gaussian count and active SH degree, followed by one
/// 59-double record per Gaussian: position(3), log_scale(3),
/// quaternion(4), opacity_logit(1), sh(48, coefficient-major, rgb per
/// coefficient). Round-trips bit-exactly.
void save_checkpoint(const GaussianCloud& cloud, const std::string& path);
GaussianCloud load_checkpoint(const std::string& path);

/// FNV-1a over the serialized checkpoint bytes; used to assert that runs
/// share identical initializations.
std::uint64_t checkpoint_digest(const GaussianCloud& cloud);

}  // namespace attnsplat

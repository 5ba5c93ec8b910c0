// Copyright Contributors to the attnsplat project
// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "attnsplat/checkpoint.hpp"
#include "support/test_utils.hpp"

#include <cstring>
#include <filesystem>

using namespace attnsplat;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir() {
  const fs::path dir = fs::temp_directory_path() / "attnsplat_ckpt_test";
  fs::create_directories(dir);
  return dir;
}

bool clouds_bit_equal(const GaussianCloud& a, const GaussianCloud& b) {
  if (a.size() != b.size() || a.active_sh_degree != b.active_sh_degree) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const Gaussian3D& x = a.gaussians[i];
    const Gaussian3D& y = b.gaussians[i];
    if (std::memcmp(x.position.data(), y.position.data(), 3 * sizeof(double)) != 0) return false;
    if (std::memcmp(x.log_scale.data(), y.log_scale.data(), 3 * sizeof(double)) != 0) return false;
    if (std::memcmp(x.rotation.data(), y.rotation.data(), 4 * sizeof(double)) != 0) return false;
    if (std::memcmp(&x.opacity_logit, &y.opacity_logit, sizeof(double)) != 0) return false;
    if (std::memcmp(x.sh.data(), y.sh.data(), 48 * sizeof(double)) != 0) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("checkpoints round-trip bit-exactly") {
  Rng rng(21);
  GaussianCloud cloud = testing::random_cloud(rng, 17);
  cloud.active_sh_degree = 2;
  // Exercise non-trivial bit patterns.
  cloud.gaussians[3].position[0] = 1.0 / 3.0;
  cloud.gaussians[5].opacity_logit = -0.0;

  const fs::path path = temp_dir() / "roundtrip.ckpt";
  save_checkpoint(cloud, path.string());
  const GaussianCloud loaded = load_checkpoint(path.string());
  CHECK(clouds_bit_equal(cloud, loaded));
  CHECK(checkpoint_digest(cloud) == checkpoint_digest(loaded));
}

TEST_CASE("digest distinguishes different clouds") {
  Rng rng(22);
  const GaussianCloud a = testing::random_cloud(rng, 5);
  GaussianCloud b = a;
  b.gaussians[2].position[1] += 1e-12;
  CHECK(checkpoint_digest(a) != checkpoint_digest(b));
}

TEST_CASE("loading rejects missing and malformed files") {
  CHECK_THROWS_AS(load_checkpoint((temp_dir() / "missing.ckpt").string()), std::runtime_error);

  const fs::path bogus = temp_dir() / "bogus.ckpt";
  {
    std::ofstream out(bogus, std::ios::binary);
    out << "definitely not a checkpoint";
  }
  CHECK_THROWS_AS(load_checkpoint(bogus.string()), std::runtime_error);

  // Truncated payload.
  Rng rng(23);
  const GaussianCloud cloud = testing::random_cloud(rng, 4);
  const fs::path full = temp_dir() / "full.ckpt";
  save_checkpoint(cloud, full.string());
  const fs::path cut = temp_dir() / "cut.ckpt";
  {
    std::ifstream in(full, std::ios::binary);
    std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    std::ofstream out(cut, std::ios::binary);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size() / 2));
  }
  CHECK_THROWS_AS(load_checkpoint(cut.string()), std::runtime_error);
}

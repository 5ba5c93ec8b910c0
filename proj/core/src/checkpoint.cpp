// Copyright Contributors to the attnsplat project
// SPDX-License-Identifier: Apache-2.0

#include "attnsplat/checkpoint.hpp"

#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace attnsplat {

namespace {

constexpr char kMagic[8] = {'A', 'S', 'P', 'L', 'A', 'T', 'C', 'K'};
constexpr std::uint32_t kVersion = 1;
constexpr std::size_t kRecordDoubles = 3 + 3 + 4 + 1 + 48;

void serialize(const GaussianCloud& cloud, std::ostream& out) {
  out.write(kMagic, sizeof(kMagic));
  const std::uint32_t version = kVersion;
  const std::uint64_t count = cloud.size();
  const std::uint32_t degree = static_cast<std::uint32_t>(cloud.active_sh_degree);
  out.write(reinterpret_cast<const char*>(&version), sizeof(version));
  out.write(reinterpret_cast<const char*>(&count), sizeof(count));
  out.write(reinterpret_cast<const char*>(&degree), sizeof(degree));

  std::vector<double> record(kRecordDoubles);
  for (const Gaussian3D& g : cloud.gaussians) {
    double* p = record.data();
    for (int i = 0; i < 3; ++i) *p++ = g.position[i];
    for (int i = 0; i < 3; ++i) *p++ = g.log_scale[i];
    for (int i = 0; i < 4; ++i) *p++ = g.rotation[i];
    *p++ = g.opacity_logit;
    for (int i = 0; i < kShCoeffCount; ++i)
      for (int c = 0; c < 3; ++c) *p++ = g.sh(i, c);
    out.write(reinterpret_cast<const char*>(record.data()),
              static_cast<std::streamsize>(record.size() * sizeof(double)));
  }
}

}  // namespace

void save_checkpoint(const GaussianCloud& cloud, const std::string& path) {
  // Write-temp-then-rename keeps checkpoints atomic.
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + tmp + " for writing");
    serialize(cloud, out);
    if (!out) throw std::runtime_error("failed writing " + tmp);
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0) {
    throw std::runtime_error("cannot rename " + tmp + " to " + path);
  }
}

GaussianCloud load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open checkpoint " + path);

  char magic[8];
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
    throw std::runtime_error(path + ": not an attnsplat checkpoint");
  }
  std::uint32_t version = 0, degree = 0;
  std::uint64_t count = 0;
  in.read(reinterpret_cast<char*>(&version), sizeof(version));
  in.read(reinterpret_cast<char*>(&count), sizeof(count));
  in.read(reinterpret_cast<char*>(&degree), sizeof(degree));
  if (!in || version != kVersion) {
    throw std::runtime_error(path + ": unsupported checkpoint version");
  }
  if (degree > static_cast<std::uint32_t>(kMaxShDegree)) {
    throw std::runtime_error(path + ": SH degree out of range");
  }

  GaussianCloud cloud;
  cloud.active_sh_degree = static_cast<int>(degree);
  cloud.gaussians.resize(count);
  std::vector<double> record(kRecordDoubles);
  for (Gaussian3D& g : cloud.gaussians) {
    in.read(reinterpret_cast<char*>(record.data()),
            static_cast<std::streamsize>(record.size() * sizeof(double)));
    if (!in) throw std::runtime_error(path + ": truncated checkpoint");
    const double* p = record.data();
    for (int i = 0; i < 3; ++i) g.position[i] = *p++;
    for (int i = 0; i < 3; ++i) g.log_scale[i] = *p++;
    for (int i = 0; i < 4; ++i) g.rotation[i] = *p++;
    g.opacity_logit = *p++;
    for (int i = 0; i < kShCoeffCount; ++i)
      for (int c = 0; c < 3; ++c) g.sh(i, c) = *p++;
  }
  return cloud;
}

std::uint64_t checkpoint_digest(const GaussianCloud& cloud) {
  std::ostringstream buf(std::ios::binary);
  serialize(cloud, buf);
  const std::string bytes = buf.str();
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char b : bytes) {
    h ^= b;
    h *= 1099511628211ull;
  }
  return h;
}

}  // namespace attnsplat

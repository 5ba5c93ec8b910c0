// Copyright Contributors to the attnsplat project
// SPDX-License-Identifier: Apache-2.0

#include "attnsplat/image.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

namespace attnsplat {

namespace {

void write_or_throw(std::ofstream& out, const char* data, std::streamsize n, const std::string& path) {
  out.write(data, n);
  if (!out) throw std::runtime_error("failed writing " + path);
}

int read_pnm_token(std::istream& in, const std::string& path) {
  // Skips whitespace and '#' comments between header fields.
  int c = in.get();
  while (c != EOF && (std::isspace(c) || c == '#')) {
    if (c == '#') {
      while (c != EOF && c != '\n') c = in.get();
    }
    c = in.get();
  }
  if (c == EOF) throw std::runtime_error("truncated PNM header in " + path);
  int value = 0;
  bool any = false;
  while (c != EOF && std::isdigit(c)) {
    value = value * 10 + (c - '0');
    any = true;
    c = in.get();
  }
  if (!any) throw std::runtime_error("malformed PNM header in " + path);
  return value;
}

}  // namespace

ImageBuffer clamp01(ImageBuffer img) {
  for (double& v : img.data) v = std::clamp(v, 0.0, 1.0);
  return img;
}

ImageBuffer quantize(const ImageBuffer& img, int maxval) {
  ImageBuffer out = img;
  const double m = static_cast<double>(maxval);
  for (double& v : out.data) {
    v = std::round(std::clamp(v, 0.0, 1.0) * m) / m;
  }
  return out;
}

void save_ppm(const ImageBuffer& img, const std::string& path, int maxval) {
  if (maxval != 255 && maxval != 65535) {
    throw std::invalid_argument("save_ppm: maxval must be 255 or 65535");
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << "P6\n" << img.width << " " << img.height << "\n" << maxval << "\n";

  std::vector<unsigned char> bytes;
  bytes.reserve(img.count() * (maxval == 255 ? 1 : 2));
  for (double v : img.data) {
    const long q = std::lround(std::clamp(v, 0.0, 1.0) * maxval);
    if (maxval == 255) {
      bytes.push_back(static_cast<unsigned char>(q));
    } else {
      bytes.push_back(static_cast<unsigned char>(q >> 8));
      bytes.push_back(static_cast<unsigned char>(q & 0xff));
    }
  }
  write_or_throw(out, reinterpret_cast<const char*>(bytes.data()),
                 static_cast<std::streamsize>(bytes.size()), path);
}

ImageBuffer load_ppm(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open image " + path);
  char magic[2] = {0, 0};
  in.read(magic, 2);
  if (magic[0] != 'P' || magic[1] != '6') {
    throw std::runtime_error(path + ": not a binary PPM (P6) file");
  }
  const int width = read_pnm_token(in, path);
  const int height = read_pnm_token(in, path);
  const int maxval = read_pnm_token(in, path);
  if (width <= 0 || height <= 0 || maxval <= 0 || maxval > 65535) {
    throw std::runtime_error(path + ": unsupported PPM geometry or maxval");
  }

  ImageBuffer img(width, height);
  const std::size_t samples = img.count();
  const std::size_t nbytes = samples * (maxval < 256 ? 1 : 2);
  std::vector<unsigned char> bytes(nbytes);
  in.read(reinterpret_cast<char*>(bytes.data()), static_cast<std::streamsize>(nbytes));
  if (static_cast<std::size_t>(in.gcount()) != nbytes) {
    throw std::runtime_error(path + ": truncated pixel data");
  }
  for (std::size_t i = 0; i < samples; ++i) {
    unsigned value = maxval < 256 ? bytes[i]
                                  : (static_cast<unsigned>(bytes[2 * i]) << 8) | bytes[2 * i + 1];
    if (value > static_cast<unsigned>(maxval)) {
      throw std::runtime_error(path + ": sample exceeds maxval (pixel out of range)");
    }
    img.data[i] = static_cast<double>(value) / maxval;
  }
  return img;
}

void save_pgm(const Plane& plane, const std::string& path, double lo, double hi) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << "P5\n" << plane.width << " " << plane.height << "\n255\n";
  std::vector<unsigned char> bytes;
  bytes.reserve(plane.data.size());
  const double span = hi > lo ? hi - lo : 1.0;
  for (double v : plane.data) {
    const double t = std::clamp((v - lo) / span, 0.0, 1.0);
    bytes.push_back(static_cast<unsigned char>(std::lround(t * 255.0)));
  }
  write_or_throw(out, reinterpret_cast<const char*>(bytes.data()),
                 static_cast<std::streamsize>(bytes.size()), path);
}

}  // namespace attnsplat

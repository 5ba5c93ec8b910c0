// Copyright Contributors to the attnsplat project
// SPDX-License-Identifier: Apache-2.0

#include "attnsplat/synth.hpp"

#include "attnsplat/checkpoint.hpp"
#include "attnsplat/render.hpp"
#include "attnsplat/rng.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace attnsplat {

namespace fs = std::filesystem;

namespace {

constexpr char kManifestName[] = "manifest.txt";
constexpr char kManifestMagic[] = "attnsplat-scene";
constexpr int kManifestVersion = 1;

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

Vec4 random_unit_quaternion(Rng& rng) {
  Vec4 q(rng.normal(), rng.normal(), rng.normal(), rng.normal());
  while (q.norm() < 1e-9) q = Vec4(rng.normal(), rng.normal(), rng.normal(), rng.normal());
  return q / q.norm();
}

GaussianCloud random_reference_cloud(const SynthSpec& spec, const SceneExtent& extent, Rng& rng) {
  GaussianCloud cloud;
  cloud.active_sh_degree = 1;
  cloud.gaussians.resize(spec.n_gaussians);

  const int n_clusters = std::max(1, spec.n_gaussians / 12);
  std::vector<Vec3> centers(n_clusters);
  const Vec3 mid = extent.center();
  const Vec3 half = 0.5 * extent.size();
  for (Vec3& c : centers) {
    for (int k = 0; k < 3; ++k) c[k] = mid[k] + 0.6 * half[k] * rng.uniform(-1.0, 1.0);
  }

  const double diag = extent.diagonal();
  constexpr double kShC0 = 0.28209479177387814;
  for (int i = 0; i < spec.n_gaussians; ++i) {
    Gaussian3D& g = cloud.gaussians[i];
    const Vec3& c = centers[static_cast<std::size_t>(rng.next() % n_clusters)];
    for (int k = 0; k < 3; ++k) g.position[k] = c[k] + 0.08 * diag * rng.normal();
    for (int k = 0; k < 3; ++k) {
      g.log_scale[k] = std::log(diag * rng.uniform(spec.scale_frac_lo, spec.scale_frac_hi));
    }
    g.rotation = random_unit_quaternion(rng);
    g.opacity_logit = logit(rng.uniform(0.6, 0.95));
    g.sh.setZero();
    for (int ch = 0; ch < 3; ++ch) {
      g.sh(0, ch) = (rng.uniform(0.08, 0.92) - 0.5) / kShC0; // vivid DC colors
      for (int row = 1; row < 4; ++row) g.sh(row, ch) = rng.uniform(-0.15, 0.15);
    }
  }
  return cloud;
}

std::vector<Camera> build_rig(const SynthSpec& spec, const SceneExtent& extent) {
  const Vec3 target = extent.center();
  const double diag = extent.diagonal();
  const double distance = 0.9 * diag;
  const double f = 1.1 * spec.resolution;
  const double near = 0.02 * diag;
  const double far = 10.0 * diag;
  const Vec3 up(0, 1, 0);

  std::vector<Camera> rig;
  rig.reserve(spec.n_cameras);
  if (spec.rig == RigKind::kOrbit) {
    const double elevation = 0.35; // rad above the equator
    for (int i = 0; i < spec.n_cameras; ++i) {
      const double theta = 2.0 * M_PI * i / spec.n_cameras;
      const Vec3 pos = target + distance * Vec3(std::cos(theta) * std::cos(elevation),
                                                std::sin(elevation),
                                                std::sin(theta) * std::cos(elevation));
      rig.push_back(make_look_at_camera(pos, target, up, f, f, spec.resolution,
                                        spec.resolution, near, far));
    }
  } else {
    // Narrow forward-facing rig: a small planar grid of centers, all
    // aimed at the scene center (small angular spread).
    const int cols = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(spec.n_cameras))));
    const int rows = (spec.n_cameras + cols - 1) / cols;
    const double spread = 0.22 * distance;
    int placed = 0;
    for (int r = 0; r < rows && placed < spec.n_cameras; ++r) {
      for (int c = 0; c < cols && placed < spec.n_cameras; ++c, ++placed) {
        const double u = cols == 1 ? 0.0 : (2.0 * c / (cols - 1) - 1.0);
        const double v = rows == 1 ? 0.0 : (2.0 * r / (rows - 1) - 1.0);
        const Vec3 pos = target + Vec3(spread * u, spread * v, distance);
        rig.push_back(make_look_at_camera(pos, target, up, f, f, spec.resolution,
                                          spec.resolution, near, far));
      }
    }
  }
  return rig;
}

std::string view_name(int index) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "cam_%04d", index);
  return buf;
}

void write_matrix_row(std::ostream& out, const char* key, const double* values, int n) {
  out << key;
  for (int i = 0; i < n; ++i) out << " " << fmt(values[i]);
  out << "\n";
}

}  // namespace

std::vector<std::size_t> test_view_indices(std::size_t n_views) {
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < n_views; i += 8) idx.push_back(i);
  return idx;
}

std::vector<std::size_t> train_view_indices(std::size_t n_views) {
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < n_views; ++i) {
    if (i % 8 != 0) idx.push_back(i);
  }
  // Degenerate tiny scenes still need something to train on.
  if (idx.empty()) {
    for (std::size_t i = 0; i < n_views; ++i) idx.push_back(i);
  }
  return idx;
}

void save_manifest(const SceneManifest& manifest, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << kManifestMagic << " " << kManifestVersion << "\n";
  write_matrix_row(out, "extent_lo", manifest.extent.lo.data(), 3);
  write_matrix_row(out, "extent_hi", manifest.extent.hi.data(), 3);
  write_matrix_row(out, "background", manifest.background.data(), 3);
  out << "maxval " << manifest.image_maxval << "\n";
  if (!manifest.reference_checkpoint.empty()) {
    out << "reference " << manifest.reference_checkpoint << "\n";
  }
  out << "views " << manifest.views.size() << "\n";
  for (const SceneView& v : manifest.views) {
    out << "view " << v.name << "\n";
    out << "image " << v.image_path << "\n";
    out << "size " << v.camera.width << " " << v.camera.height << "\n";
    const double intr[4] = {v.camera.fx, v.camera.fy, v.camera.cx, v.camera.cy};
    write_matrix_row(out, "intrinsics", intr, 4);
    double rot[9];
    Eigen::Map<Eigen::Matrix<double, 3, 3, Eigen::RowMajor>> rot_map(rot);
    rot_map = v.camera.rotation;
    write_matrix_row(out, "rotation", rot, 9);
    write_matrix_row(out, "translation", v.camera.translation.data(), 3);
    const double clip[2] = {v.camera.near, v.camera.far};
    write_matrix_row(out, "clip", clip, 2);
  }
  if (!out) throw std::runtime_error("failed writing " + path);
}

SceneManifest load_manifest(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open manifest " + path);
  SceneManifest m;
  m.directory = fs::path(path).parent_path().string();

  std::string magic;
  int version = 0;
  if (!(in >> magic >> version) || magic != kManifestMagic || version != kManifestVersion) {
    throw std::runtime_error(path + ": not a version-" + std::to_string(kManifestVersion) +
                             " scene manifest");
  }
  std::size_t n_views = 0;
  bool have_views = false;
  std::string key;
  while (in >> key) {
    if (key == "extent_lo") {
      in >> m.extent.lo[0] >> m.extent.lo[1] >> m.extent.lo[2];
    } else if (key == "extent_hi") {
      in >> m.extent.hi[0] >> m.extent.hi[1] >> m.extent.hi[2];
    } else if (key == "background") {
      in >> m.background[0] >> m.background[1] >> m.background[2];
    } else if (key == "maxval") {
      in >> m.image_maxval;
    } else if (key == "reference") {
      in >> m.reference_checkpoint;
    } else if (key == "views") {
      in >> n_views;
      have_views = true;
      break;
    } else {
      throw std::runtime_error(path + ": unknown manifest key '" + key + "'");
    }
    if (!in) throw std::runtime_error(path + ": malformed value for key '" + key + "'");
  }
  if (!have_views) throw std::runtime_error(path + ": missing views section");

  m.views.resize(n_views);
  for (SceneView& v : m.views) {
    auto expect = [&](const char* want) {
      std::string k;
      if (!(in >> k) || k != want) {
        throw std::runtime_error(path + ": expected key '" + want + "' in view block");
      }
    };
    expect("view");
    in >> v.name;
    expect("image");
    in >> v.image_path;
    expect("size");
    in >> v.camera.width >> v.camera.height;
    expect("intrinsics");
    in >> v.camera.fx >> v.camera.fy >> v.camera.cx >> v.camera.cy;
    expect("rotation");
    for (int r = 0; r < 3; ++r)
      for (int c = 0; c < 3; ++c) in >> v.camera.rotation(r, c);
    expect("translation");
    in >> v.camera.translation[0] >> v.camera.translation[1] >> v.camera.translation[2];
    expect("clip");
    in >> v.camera.near >> v.camera.far;
    if (!in) throw std::runtime_error(path + ": truncated view block for '" + v.name + "'");
    validate_camera(v.camera);
  }
  std::string trailing;
  if (in >> trailing) {
    throw std::runtime_error(path + ": unknown manifest key '" + trailing + "'");
  }
  return m;
}

SceneManifest generate_scene(const SynthSpec& spec, const std::string& directory) {
  if (spec.n_cameras < 2) throw std::invalid_argument("generate_scene: need at least 2 cameras");
  if (spec.n_gaussians < 1) throw std::invalid_argument("generate_scene: need at least 1 gaussian");
  if (spec.resolution < 16) throw std::invalid_argument("generate_scene: resolution below 16");

  fs::create_directories(fs::path(directory) / "images");

  SceneManifest manifest;
  manifest.directory = directory;
  manifest.extent.lo = Vec3(-1, -1, -1);
  manifest.extent.hi = Vec3(1, 1, 1);
  manifest.background = spec.background;
  manifest.image_maxval = 65535;
  manifest.reference_checkpoint = "reference.ckpt";

  Rng rng(spec.seed);
  const GaussianCloud reference = random_reference_cloud(spec, manifest.extent, rng);
  save_checkpoint(reference, (fs::path(directory) / manifest.reference_checkpoint).string());

  RenderOptions ropts;
  ropts.background = spec.background;
  ropts.threads = spec.threads;

  const std::vector<Camera> rig = build_rig(spec, manifest.extent);
  for (std::size_t i = 0; i < rig.size(); ++i) {
    SceneView view;
    view.name = view_name(static_cast<int>(i));
    view.image_path = "images/" + view.name + ".ppm";
    view.camera = rig[i];

    RenderAux aux;
    const ImageBuffer img = rasterize_forward(reference, view.camera, aux, ropts);
    save_ppm(clamp01(img), (fs::path(directory) / view.image_path).string(),
             manifest.image_maxval);
    manifest.views.push_back(std::move(view));
  }

  save_manifest(manifest, (fs::path(directory) / kManifestName).string());
  return manifest;
}

LoadedScene load_scene(const std::string& directory) {
  LoadedScene scene;
  scene.manifest = load_manifest((fs::path(directory) / kManifestName).string());
  if (scene.manifest.views.size() < 2) {
    throw std::runtime_error(directory + ": scene needs at least 2 views");
  }
  if (!scene.manifest.reference_checkpoint.empty()) {
    const fs::path ref = fs::path(directory) / scene.manifest.reference_checkpoint;
    if (!fs::exists(ref)) {
      throw std::runtime_error("missing reference checkpoint " + ref.string());
    }
  }
  scene.images.reserve(scene.manifest.views.size());
  for (const SceneView& v : scene.manifest.views) {
    const fs::path img_path = fs::path(directory) / v.image_path;
    if (!fs::exists(img_path)) {
      throw std::runtime_error("missing image " + img_path.string());
    }
    ImageBuffer img = load_ppm(img_path.string());
    if (img.width != v.camera.width || img.height != v.camera.height) {
      throw std::runtime_error(img_path.string() + ": image size disagrees with the manifest");
    }
    scene.images.push_back(std::move(img));
  }
  return scene;
}

}  // namespace attnsplat

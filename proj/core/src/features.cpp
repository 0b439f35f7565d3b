#include "bovw/features.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>

#include "bovw/binary_io.hpp"
#include "bovw/error.hpp"

namespace bovw {

void GridParams::validate() const {
  if (stride < 1) throw Error("grid stride must be >= 1");
  if (patch_size < 4 || patch_size % 4 != 0) {
    throw Error("patch size must be a positive multiple of 4, got " + std::to_string(patch_size));
  }
}

std::vector<Keypoint> dense_grid(std::uint32_t width, std::uint32_t height, const GridParams& params) {
  params.validate();
  if (width < params.patch_size || height < params.patch_size) {
    throw Error("image " + std::to_string(width) + "x" + std::to_string(height) + " is smaller than one " +
                std::to_string(params.patch_size) + "-pixel patch");
  }
  const std::uint32_t half = params.patch_size / 2;
  std::vector<Keypoint> keypoints;
  for (std::uint32_t y = half; y + half <= height; y += params.stride) {
    for (std::uint32_t x = half; x + half <= width; x += params.stride) keypoints.push_back({x, y});
  }
  return keypoints;
}

namespace {

constexpr double kClampThreshold = 0.2;
constexpr double kByteScale = 512.0;

/// Per-patch-size tables shared by every keypoint of an extraction.
class SiftWindow {
 public:
  explicit SiftWindow(std::uint32_t patch) : patch_(patch), weight_(std::size_t{patch} * patch) {
    const double center = (patch - 1) / 2.0;
    const double sigma = patch / 2.0;
    const double cell = patch / static_cast<double>(kSpatialCells);
    for (std::uint32_t i = 0; i < patch; ++i) {
      for (std::uint32_t j = 0; j < patch; ++j) {
        const double dy = i - center;
        const double dx = j - center;
        weight_[std::size_t{i} * patch + j] = std::exp(-(dx * dx + dy * dy) / (2.0 * sigma * sigma));
      }
    }
    // Cell centers sit at (c + 0.5) * cell; a pixel at offset t + 0.5 splits
    // linearly between its two nearest centers.
    bins_.resize(patch);
    for (std::uint32_t t = 0; t < patch; ++t) {
      const double b = (t + 0.5) / cell - 0.5;
      const double lo = std::floor(b);
      bins_[t] = {static_cast<int>(lo), b - lo};
    }
  }

  Descriptor compute(const Image& image, Keypoint kp) const {
    const std::uint32_t half = patch_ / 2;
    if (kp.x < half || kp.y < half || kp.x + half > image.width || kp.y + half > image.height) {
      throw Error("patch at (" + std::to_string(kp.x) + ", " + std::to_string(kp.y) + ") is out of bounds");
    }
    const std::uint32_t x0 = kp.x - half;
    const std::uint32_t y0 = kp.y - half;
    const std::uint32_t last = patch_ - 1;

    std::array<double, kDescriptorDims> hist{};
    for (std::uint32_t i = 0; i < patch_; ++i) {
      const std::uint32_t up = y0 + (i == 0 ? 0 : i - 1);
      const std::uint32_t down = y0 + (i == last ? last : i + 1);
      const std::uint32_t row = y0 + i;
      for (std::uint32_t j = 0; j < patch_; ++j) {
        const std::uint32_t left = x0 + (j == 0 ? 0 : j - 1);
        const std::uint32_t right = x0 + (j == last ? last : j + 1);
        const double gx = 0.5 * (int{image.at(right, row)} - int{image.at(left, row)});
        const double gy = 0.5 * (int{image.at(x0 + j, down)} - int{image.at(x0 + j, up)});
        if (gx == 0.0 && gy == 0.0) continue;

        const double mag = std::sqrt(gx * gx + gy * gy) * weight_[std::size_t{i} * patch_ + j];
        double theta = std::atan2(gy, gx);
        if (theta < 0.0) theta += 2.0 * std::numbers::pi;
        const double bo = theta * (kOrientationBins / (2.0 * std::numbers::pi));
        const double o_floor = std::floor(bo);
        const double fo = bo - o_floor;
        const std::size_t o0 = static_cast<std::size_t>(o_floor) % kOrientationBins;
        const std::size_t o1 = (o0 + 1) % kOrientationBins;

        const auto [by0, fy] = bins_[i];
        const auto [bx0, fx] = bins_[j];
        for (int dy = 0; dy < 2; ++dy) {
          const int cy = by0 + dy;
          if (cy < 0 || cy >= static_cast<int>(kSpatialCells)) continue;
          const double wy = dy == 0 ? 1.0 - fy : fy;
          for (int dx = 0; dx < 2; ++dx) {
            const int cx = bx0 + dx;
            if (cx < 0 || cx >= static_cast<int>(kSpatialCells)) continue;
            const double w = mag * wy * (dx == 0 ? 1.0 - fx : fx);
            double* cellbins = hist.data() + (static_cast<std::size_t>(cy) * kSpatialCells + cx) * kOrientationBins;
            cellbins[o0] += w * (1.0 - fo);
            cellbins[o1] += w * fo;
          }
        }
      }
    }
    return quantize(hist);
  }

 private:
  struct Bin {
    int lower;
    double frac;
  };

  static Descriptor quantize(std::array<double, kDescriptorDims>& hist) {
    Descriptor out{};
    auto l2 = [&] {
      double s = 0.0;
      for (double v : hist) s += v * v;
      return std::sqrt(s);
    };
    const double norm = l2();
    if (norm == 0.0) return out;
    for (double& v : hist) v = std::min(v / norm, kClampThreshold);
    const double renorm = l2();
    for (std::size_t b = 0; b < kDescriptorDims; ++b) {
      const double scaled = std::round(kByteScale * hist[b] / renorm);
      out[b] = static_cast<std::uint8_t>(std::min(scaled, 255.0));
    }
    return out;
  }

  std::uint32_t patch_;
  std::vector<double> weight_;
  std::vector<Bin> bins_;
};

}  // namespace

Descriptor sift_descriptor(const Image& image, Keypoint kp, const GridParams& params) {
  params.validate();
  return SiftWindow(params.patch_size).compute(image, kp);
}

DescriptorSet extract_dense_sift(const Image& image, const GridParams& params, std::string source_image) {
  DescriptorSet set;
  set.source_image = std::move(source_image);
  set.params = params;
  set.keypoints = dense_grid(image.width, image.height, params);
  const SiftWindow window(params.patch_size);
  set.descriptors.reserve(set.keypoints.size());
  for (const Keypoint& kp : set.keypoints) set.descriptors.push_back(window.compute(image, kp));
  return set;
}

namespace {
constexpr std::string_view kCacheMagic = "BVDS";
constexpr std::uint32_t kCacheVersion = 1;
}  // namespace

void write_descriptor_cache(const DescriptorSet& set, const std::filesystem::path& path) {
  io::Writer w;
  w.magic(kCacheMagic);
  w.u32(kCacheVersion);
  w.u32(static_cast<std::uint32_t>(set.size()));
  w.u32(static_cast<std::uint32_t>(kDescriptorDims));
  w.u32(set.params.stride);
  w.u32(set.params.patch_size);
  for (std::size_t i = 0; i < set.size(); ++i) {
    w.u32(set.keypoints[i].x);
    w.u32(set.keypoints[i].y);
    w.bytes(set.descriptors[i]);
  }
  w.save(path);
}

DescriptorSet read_descriptor_cache(const std::filesystem::path& path, std::string source_image) {
  io::Reader r(path, "descriptor cache");
  r.expect_magic(kCacheMagic);
  r.expect_version(kCacheVersion);
  const std::uint32_t n = r.u32();
  if (r.u32() != kDescriptorDims) throw Error("descriptor cache: unexpected descriptor dimension");
  DescriptorSet set;
  set.source_image = std::move(source_image);
  set.params.stride = r.u32();
  set.params.patch_size = r.u32();
  set.keypoints.resize(n);
  set.descriptors.resize(n);
  for (std::uint32_t i = 0; i < n; ++i) {
    set.keypoints[i].x = r.u32();
    set.keypoints[i].y = r.u32();
    r.bytes(set.descriptors[i]);
  }
  r.expect_end();
  return set;
}

std::filesystem::path descriptor_cache_path(const std::filesystem::path& cache_dir, const std::string& image_id,
                                            const GridParams& params) {
  // FNV-1a over the key; stable across platforms, unlike std::hash.
  const std::string key = image_id + "|" + std::to_string(params.stride) + "|" + std::to_string(params.patch_size);
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : key) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char name[32];
  std::snprintf(name, sizeof name, "%016llx.dsc", static_cast<unsigned long long>(h));
  return cache_dir / name;
}

}  // namespace bovw

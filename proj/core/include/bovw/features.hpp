#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "bovw/corpus.hpp"

namespace bovw {

inline constexpr std::size_t kSpatialCells = 4;
inline constexpr std::size_t kOrientationBins = 8;
inline constexpr std::size_t kDescriptorDims = kSpatialCells * kSpatialCells * kOrientationBins;

/// Dense sampling grid. patch_size must be a positive multiple of 4.
struct GridParams {
  std::uint32_t stride = 6;
  std::uint32_t patch_size = 16;

  void validate() const;
  friend bool operator==(const GridParams&, const GridParams&) = default;
};

/// Patch center. The patch spans columns [x - patch/2, x + patch/2 - 1]
/// and the matching rows.
struct Keypoint {
  std::uint32_t x = 0;
  std::uint32_t y = 0;

  friend auto operator<=>(const Keypoint&, const Keypoint&) = default;
};

/// Byte-quantized SIFT vector. Bin (cy, cx, o) lives at (cy * 4 + cx) * 8 + o.
using Descriptor = std::array<std::uint8_t, kDescriptorDims>;

struct DescriptorSet {
  std::string source_image;
  GridParams params;
  std::vector<Keypoint> keypoints;
  std::vector<Descriptor> descriptors;

  std::size_t size() const { return descriptors.size(); }
  friend bool operator==(const DescriptorSet&, const DescriptorSet&) = default;
};

/// Row-major patch centers that fit inside a width x height image.
/// Throws if the image is smaller than one patch.
std::vector<Keypoint> dense_grid(std::uint32_t width, std::uint32_t height, const GridParams& params);

/// Upright SIFT over the patch centered at kp.
///
/// Central-difference gradients (replicating the patch border), Gaussian
/// window with sigma = patch/2, trilinear binning into 4x4 cells x 8
/// orientations, L2 normalize, clamp at 0.2, renormalize, then scale by 512
/// and round into [0, 255]. A flat patch gives the zero descriptor.
Descriptor sift_descriptor(const Image& image, Keypoint kp, const GridParams& params);

/// One descriptor per dense_grid keypoint, in grid order.
DescriptorSet extract_dense_sift(const Image& image, const GridParams& params,
                                 std::string source_image = {});

// Descriptor cache: "BVDS", version, N, dims, stride, patch, then
// N x (x:u32, y:u32, 128 x u8). The source image id is not stored; the
// cache path is keyed by it instead.
void write_descriptor_cache(const DescriptorSet& set, const std::filesystem::path& path);
DescriptorSet read_descriptor_cache(const std::filesystem::path& path, std::string source_image = {});
std::filesystem::path descriptor_cache_path(const std::filesystem::path& cache_dir,
                                            const std::string& image_id, const GridParams& params);

}  // namespace bovw

#pragma once

#include <compare>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace bovw {

/// 8-bit grayscale raster, row-major.
struct Image {
  std::uint32_t width = 0;
  std::uint32_t height = 0;
  std::vector<std::uint8_t> pixels;

  Image() = default;
  /// Throws bovw::Error unless pixels.size() == width * height.
  Image(std::uint32_t w, std::uint32_t h, std::vector<std::uint8_t> px);

  std::uint8_t at(std::uint32_t x, std::uint32_t y) const { return pixels[std::size_t{y} * width + x]; }

  friend bool operator==(const Image&, const Image&) = default;
};

/// Reads a binary PGM (P5) with maxval 255.
Image load_image(const std::filesystem::path& path);
void save_image(const Image& image, const std::filesystem::path& path);

struct ManifestEntry {
  std::string image_path;
  std::string class_label;

  friend bool operator==(const ManifestEntry&, const ManifestEntry&) = default;
};

/// Labeled list of images.
///
/// Entry order is the file order. Class labels are kept sorted
/// lexicographically, so class indices are stable for a given label set.
/// Relative image paths resolve against base_dir (the manifest's directory).
class DatasetManifest {
 public:
  DatasetManifest() = default;
  /// Throws bovw::Error on an empty entry list or duplicate image paths.
  DatasetManifest(std::string name, std::vector<ManifestEntry> entries,
                  std::filesystem::path base_dir = {});

  const std::string& name() const { return name_; }
  const std::vector<ManifestEntry>& entries() const { return entries_; }
  const std::vector<std::string>& classes() const { return classes_; }
  const std::filesystem::path& base_dir() const { return base_dir_; }
  std::size_t size() const { return entries_.size(); }

  /// Index of `label` in classes(); throws if absent.
  std::size_t class_index(const std::string& label) const;
  /// Number of entries carrying `label`.
  std::size_t class_size(const std::string& label) const;

  /// Filesystem location of an entry's image.
  std::filesystem::path resolve(const ManifestEntry& entry) const;

  /// Same name and base directory, restricted entries (order preserved).
  DatasetManifest with_entries(std::vector<ManifestEntry> entries) const;

  /// Name and entries; base_dir is location metadata and not compared.
  friend bool operator==(const DatasetManifest& a, const DatasetManifest& b) {
    return a.name_ == b.name_ && a.entries_ == b.entries_;
  }

 private:
  std::string name_;
  std::vector<ManifestEntry> entries_;
  std::vector<std::string> classes_;
  std::filesystem::path base_dir_;
};

/// Parses `path<TAB>label` lines; `#` comments and blank lines are skipped.
/// The manifest name is the file stem.
DatasetManifest load_manifest(const std::filesystem::path& path);
void write_manifest(const DatasetManifest& manifest, const std::filesystem::path& path);

/// Sorted class labels permuted by a seeded Fisher-Yates shuffle.
std::vector<std::string> class_permutation(const DatasetManifest& manifest, std::uint64_t seed);

/// Entries of the first `class_count` classes of class_permutation(seed).
/// For a fixed seed the selected class sets are nested in class_count.
DatasetManifest select_classes(const DatasetManifest& manifest, std::size_t class_count,
                               std::uint64_t seed);

}  // namespace bovw

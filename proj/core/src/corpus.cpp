#include "bovw/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <iterator>
#include <set>
#include <unordered_set>

#include "bovw/error.hpp"
#include "bovw/rng.hpp"

namespace bovw {

Image::Image(std::uint32_t w, std::uint32_t h, std::vector<std::uint8_t> px)
    : width(w), height(h), pixels(std::move(px)) {
  if (pixels.size() != std::size_t{w} * h) {
    throw Error("image pixel count " + std::to_string(pixels.size()) + " does not match " + std::to_string(w) +
                "x" + std::to_string(h));
  }
}

namespace {

class PgmHeaderParser {
 public:
  PgmHeaderParser(const std::vector<std::uint8_t>& data, const std::string& name) : data_(data), name_(name) {}

  void skip_space_and_comments() {
    while (pos_ < data_.size()) {
      if (data_[pos_] == '#') {
        while (pos_ < data_.size() && data_[pos_] != '\n') ++pos_;
      } else if (std::isspace(data_[pos_])) {
        ++pos_;
      } else {
        break;
      }
    }
  }

  std::uint64_t number(const char* field) {
    skip_space_and_comments();
    std::uint64_t value = 0;
    std::size_t digits = 0;
    while (pos_ < data_.size() && std::isdigit(data_[pos_])) {
      value = value * 10 + (data_[pos_] - '0');
      if (value > 0xFFFFFFFFull) throw Error(name_ + ": PGM " + field + " out of range");
      ++pos_;
      ++digits;
    }
    if (digits == 0) throw Error(name_ + ": malformed PGM header, expected " + field);
    return value;
  }

  std::size_t& pos() { return pos_; }

 private:
  const std::vector<std::uint8_t>& data_;
  const std::string& name_;
  std::size_t pos_ = 0;
};

}  // namespace

Image load_image(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open image: " + path.string());
  const std::vector<std::uint8_t> data{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  const std::string name = path.string();

  if (data.size() < 2 || data[0] != 'P' || data[1] != '5') {
    throw Error(name + ": unsupported format, expected binary PGM (P5)");
  }
  PgmHeaderParser parser(data, name);
  parser.pos() = 2;
  const auto width = parser.number("width");
  const auto height = parser.number("height");
  const auto maxval = parser.number("maxval");
  if (maxval != 255) throw Error(name + ": unsupported maxval " + std::to_string(maxval));
  if (width == 0 || height == 0) throw Error(name + ": empty image");
  std::size_t pos = parser.pos();
  if (pos >= data.size() || !std::isspace(data[pos])) throw Error(name + ": malformed PGM header");
  ++pos;

  const std::size_t expected = static_cast<std::size_t>(width) * height;
  if (data.size() - pos < expected) {
    throw Error(name + ": truncated payload, expected " + std::to_string(expected) + " bytes, found " +
                std::to_string(data.size() - pos));
  }
  std::vector<std::uint8_t> pixels(data.begin() + static_cast<std::ptrdiff_t>(pos),
                                   data.begin() + static_cast<std::ptrdiff_t>(pos + expected));
  return Image(static_cast<std::uint32_t>(width), static_cast<std::uint32_t>(height), std::move(pixels));
}

void save_image(const Image& image, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot open for writing: " + path.string());
  out << "P5\n" << image.width << ' ' << image.height << "\n255\n";
  out.write(reinterpret_cast<const char*>(image.pixels.data()), static_cast<std::streamsize>(image.pixels.size()));
  if (!out) throw Error("write failed: " + path.string());
}

DatasetManifest::DatasetManifest(std::string name, std::vector<ManifestEntry> entries, std::filesystem::path base_dir)
    : name_(std::move(name)), entries_(std::move(entries)), base_dir_(std::move(base_dir)) {
  if (entries_.empty()) throw Error("manifest '" + name_ + "' is empty");
  std::unordered_set<std::string> paths;
  std::set<std::string> labels;
  for (const auto& e : entries_) {
    if (!paths.insert(e.image_path).second) throw Error("duplicate image path in manifest: " + e.image_path);
    labels.insert(e.class_label);
  }
  classes_.assign(labels.begin(), labels.end());
}

std::size_t DatasetManifest::class_index(const std::string& label) const {
  const auto it = std::lower_bound(classes_.begin(), classes_.end(), label);
  if (it == classes_.end() || *it != label) throw Error("unknown class label: " + label);
  return static_cast<std::size_t>(it - classes_.begin());
}

std::size_t DatasetManifest::class_size(const std::string& label) const {
  return static_cast<std::size_t>(
      std::count_if(entries_.begin(), entries_.end(), [&](const auto& e) { return e.class_label == label; }));
}

std::filesystem::path DatasetManifest::resolve(const ManifestEntry& entry) const {
  const std::filesystem::path p(entry.image_path);
  if (p.is_absolute() || base_dir_.empty()) return p;
  return base_dir_ / p;
}

DatasetManifest DatasetManifest::with_entries(std::vector<ManifestEntry> entries) const {
  return DatasetManifest(name_, std::move(entries), base_dir_);
}

DatasetManifest load_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open manifest: " + path.string());

  std::vector<ManifestEntry> entries;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto first = line.find_first_not_of(" \t");
    if (first == std::string::npos || line[first] == '#') continue;

    const auto tab = line.find('\t');
    if (tab == std::string::npos || tab == 0 || tab + 1 == line.size() ||
        line.find('\t', tab + 1) != std::string::npos) {
      throw Error(path.string() + ":" + std::to_string(line_no) + ": malformed line, expected path<TAB>label");
    }
    entries.push_back({line.substr(0, tab), line.substr(tab + 1)});
  }
  if (entries.empty()) throw Error("manifest is empty: " + path.string());
  return DatasetManifest(path.stem().string(), std::move(entries), path.parent_path());
}

void write_manifest(const DatasetManifest& manifest, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error("cannot open for writing: " + path.string());
  for (const auto& e : manifest.entries()) out << e.image_path << '\t' << e.class_label << '\n';
  if (!out) throw Error("write failed: " + path.string());
}

std::vector<std::string> class_permutation(const DatasetManifest& manifest, std::uint64_t seed) {
  std::vector<std::string> labels = manifest.classes();
  Rng rng(seed);
  shuffle(labels, rng);
  return labels;
}

DatasetManifest select_classes(const DatasetManifest& manifest, std::size_t class_count, std::uint64_t seed) {
  const std::size_t total = manifest.classes().size();
  if (class_count < 1 || class_count > total) {
    throw Error("class_count " + std::to_string(class_count) + " out of range [1, " + std::to_string(total) + "]");
  }
  auto order = class_permutation(manifest, seed);
  order.resize(class_count);
  const std::set<std::string> keep(order.begin(), order.end());

  std::vector<ManifestEntry> entries;
  for (const auto& e : manifest.entries()) {
    if (keep.contains(e.class_label)) entries.push_back(e);
  }
  return manifest.with_entries(std::move(entries));
}

}  // namespace bovw

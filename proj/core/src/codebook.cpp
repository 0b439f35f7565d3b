#include "bovw/codebook.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

#include "bovw/binary_io.hpp"
#include "bovw/error.hpp"
#include "bovw/rng.hpp"

namespace bovw {

std::string Codebook::id() const {
  return source_name + ":c" + std::to_string(source_classes.size()) + ":k" + std::to_string(words.size()) + ":s" +
         std::to_string(seed);
}

std::vector<std::uint64_t> sample_without_replacement(std::uint64_t total, std::uint64_t k, std::uint64_t seed) {
  if (k > total) {
    throw Error("cannot sample " + std::to_string(k) + " words from a pool of " + std::to_string(total));
  }
  // Partial Fisher-Yates over a virtual identity array; only displaced
  // slots are stored.
  std::unordered_map<std::uint64_t, std::uint64_t> displaced;
  displaced.reserve(static_cast<std::size_t>(2 * k));
  auto value_at = [&](std::uint64_t i) {
    const auto it = displaced.find(i);
    return it == displaced.end() ? i : it->second;
  };
  Rng rng(seed);
  std::vector<std::uint64_t> picked;
  picked.reserve(static_cast<std::size_t>(k));
  for (std::uint64_t i = 0; i < k; ++i) {
    const std::uint64_t j = i + rng.below(total - i);
    const std::uint64_t vi = value_at(i);
    const std::uint64_t vj = value_at(j);
    picked.push_back(vj);
    displaced[j] = vi;
  }
  return picked;
}

Codebook build_random_codebook(std::span<const DescriptorSet* const> pool, std::size_t k, std::uint64_t seed,
                               std::string source_name, std::vector<std::string> source_classes) {
  if (k < 1) throw Error("codebook size k must be >= 1");
  std::vector<std::uint64_t> offsets;
  offsets.reserve(pool.size() + 1);
  std::uint64_t total = 0;
  for (const DescriptorSet* set : pool) {
    offsets.push_back(total);
    total += set->size();
  }
  if (total < k) {
    throw Error("descriptor pool has " + std::to_string(total) + " descriptors, fewer than k = " + std::to_string(k));
  }

  Codebook cb;
  cb.source_name = std::move(source_name);
  cb.source_classes = std::move(source_classes);
  cb.seed = seed;
  cb.words.reserve(k);
  for (const std::uint64_t flat : sample_without_replacement(total, k, seed)) {
    const auto it = std::upper_bound(offsets.begin(), offsets.end(), flat) - 1;
    const auto set_index = static_cast<std::size_t>(it - offsets.begin());
    cb.words.push_back(pool[set_index]->descriptors[static_cast<std::size_t>(flat - *it)]);
  }
  return cb;
}

Codebook build_random_codebook(std::span<const DescriptorSet> pool, std::size_t k, std::uint64_t seed,
                               std::string source_name, std::vector<std::string> source_classes) {
  std::vector<const DescriptorSet*> ptrs;
  ptrs.reserve(pool.size());
  for (const auto& set : pool) ptrs.push_back(&set);
  return build_random_codebook(std::span<const DescriptorSet* const>(ptrs), k, seed, std::move(source_name),
                               std::move(source_classes));
}

void squared_distances(const Codebook& cb, const Descriptor& d, std::span<std::int32_t> out) {
  if (out.size() != cb.size()) throw Error("distance buffer size does not match codebook size");
  for (std::size_t j = 0; j < cb.size(); ++j) {
    const Descriptor& w = cb.words[j];
    std::int32_t acc = 0;
    for (std::size_t c = 0; c < kDescriptorDims; ++c) {
      const std::int32_t diff = std::int32_t{d[c]} - std::int32_t{w[c]};
      acc += diff * diff;
    }
    out[j] = acc;
  }
}

std::vector<double> distances_to_words(const Codebook& cb, const Descriptor& d) {
  std::vector<std::int32_t> sq(cb.size());
  squared_distances(cb, d, sq);
  std::vector<double> dist(cb.size());
  for (std::size_t j = 0; j < sq.size(); ++j) dist[j] = std::sqrt(static_cast<double>(sq[j]));
  return dist;
}

namespace {
constexpr std::string_view kCodebookMagic = "BVCB";
constexpr std::uint32_t kCodebookVersion = 1;
}  // namespace

void write_codebook(const Codebook& cb, const std::filesystem::path& path) {
  io::Writer w;
  w.magic(kCodebookMagic);
  w.u32(kCodebookVersion);
  w.u32(static_cast<std::uint32_t>(cb.size()));
  w.u32(static_cast<std::uint32_t>(kDescriptorDims));
  w.u64(cb.seed);
  w.str(cb.source_name);
  w.u32(static_cast<std::uint32_t>(cb.source_classes.size()));
  for (const auto& label : cb.source_classes) w.str(label);
  for (const auto& word : cb.words) w.bytes(word);
  w.save(path);
}

Codebook read_codebook(const std::filesystem::path& path) {
  io::Reader r(path, "codebook");
  r.expect_magic(kCodebookMagic);
  r.expect_version(kCodebookVersion);
  const std::uint32_t k = r.u32();
  if (r.u32() != kDescriptorDims) throw Error("codebook: unexpected word dimension");
  if (k < 1) throw Error("codebook: k must be >= 1");
  Codebook cb;
  cb.seed = r.u64();
  cb.source_name = r.str();
  const std::uint32_t n_classes = r.u32();
  for (std::uint32_t i = 0; i < n_classes; ++i) cb.source_classes.push_back(r.str());
  cb.words.resize(k);
  for (auto& word : cb.words) r.bytes(word);
  r.expect_end();
  return cb;
}

}  // namespace bovw

#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "bovw/features.hpp"

namespace bovw {

/// Visual dictionary: raw sampled descriptors plus where they came from.
struct Codebook {
  std::vector<Descriptor> words;
  std::string source_name;
  std::vector<std::string> source_classes;
  std::uint64_t seed = 0;

  std::size_t size() const { return words.size(); }
  /// Stable provenance string, e.g. "scenes15:c15:k1000:s3".
  std::string id() const;

  friend bool operator==(const Codebook&, const Codebook&) = default;
};

/// k distinct indices drawn uniformly from [0, total) by a seeded partial
/// Fisher-Yates shuffle, in draw order. Uses O(k) memory.
std::vector<std::uint64_t> sample_without_replacement(std::uint64_t total, std::uint64_t k,
                                                      std::uint64_t seed);

/// k words sampled without replacement from the flattened pool
/// (sets in input order, then grid order). Throws if the pool has fewer
/// than k descriptors.
Codebook build_random_codebook(std::span<const DescriptorSet* const> pool, std::size_t k,
                               std::uint64_t seed, std::string source_name = {},
                               std::vector<std::string> source_classes = {});
Codebook build_random_codebook(std::span<const DescriptorSet> pool, std::size_t k,
                               std::uint64_t seed, std::string source_name = {},
                               std::vector<std::string> source_classes = {});

/// Euclidean distance from d to every word.
std::vector<double> distances_to_words(const Codebook& cb, const Descriptor& d);

/// Exact squared distances (integer arithmetic) written into out[0..k).
void squared_distances(const Codebook& cb, const Descriptor& d, std::span<std::int32_t> out);

// "BVCB", version, k, dims, seed:u64, source name, class count + labels,
// then k x 128 bytes.
void write_codebook(const Codebook& cb, const std::filesystem::path& path);
Codebook read_codebook(const std::filesystem::path& path);

}  // namespace bovw

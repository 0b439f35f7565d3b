#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "bovw/classifier.hpp"
#include "bovw/codebook.hpp"
#include "bovw/corpus.hpp"
#include "bovw/encoding.hpp"
#include "bovw/features.hpp"
#include "bovw/stats.hpp"

namespace bovw {

/// Everything that shapes a representation and its classifier.
struct PipelineParams {
  GridParams grid;
  std::size_t k = 1000;
  EncodingParams encoding;
  TrainConfig train;
  unsigned workers = 1;
  /// Descriptor cache directory; empty keeps descriptors in memory only.
  std::filesystem::path cache_dir;
};

/// Training size plus the seeds of the repeated runs.
struct SplitSpec {
  std::uint32_t n_train_per_class = 30;
  std::vector<std::uint64_t> run_seeds = {0, 1, 2, 3, 4};
  double alpha = 0.05;
};

/// Seeds used by one run, all derived from the run seed by fixed offsets.
struct RunSeeds {
  std::uint64_t dictionary;
  std::uint64_t split;
  std::uint64_t classes;
  std::uint64_t train;
};
RunSeeds derive_run_seeds(std::uint64_t run_seed);

struct TrialResult {
  double accuracy = 0.0;
  std::uint64_t seed = 0;
  std::uint32_t n_train = 0;
  std::string dictionary_id;

  friend bool operator==(const TrialResult&, const TrialResult&) = default;
};

struct SummaryRow {
  std::string experiment;
  std::string dict_source;
  std::size_t dict_classes = 0;
  /// Classes that fed each run's dictionary, parallel to trials.
  std::vector<std::vector<std::string>> run_dict_classes;
  std::string target;
  std::uint32_t n_train = 0;
  std::size_t k = 0;
  double sigma = 0.0;
  Assignment assignment = Assignment::soft;
  Pooling pooling = Pooling::max;
  std::size_t n_runs = 0;
  double mean_acc = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  std::vector<TrialResult> trials;
};

struct Split {
  DatasetManifest train;
  DatasetManifest test;
};

/// n_train seeded picks per class for training, the rest for testing.
/// Both halves keep manifest order.
Split split_balanced(const DatasetManifest& manifest, std::uint32_t n_train, std::uint64_t seed);

/// Dense SIFT sets for manifest images, extracted once and shared.
///
/// Thread-safe. With a cache directory, sets are read from / written to
/// per-image cache files.
class DescriptorStore {
 public:
  explicit DescriptorStore(GridParams grid, std::filesystem::path cache_dir = {});

  /// Sets for every entry of `manifest`, in entry order.
  std::vector<std::shared_ptr<const DescriptorSet>> get(const DatasetManifest& manifest, unsigned workers = 1);
  std::shared_ptr<const DescriptorSet> get(const DatasetManifest& manifest, const ManifestEntry& entry);

  const GridParams& grid() const { return grid_; }

 private:
  std::shared_ptr<const DescriptorSet> load_or_extract(const std::filesystem::path& image_path) const;

  GridParams grid_;
  std::filesystem::path cache_dir_;
  std::mutex mutex_;
  std::map<std::string, std::shared_ptr<const DescriptorSet>> sets_;
};

/// Dictionary from every image of `source` (uniform over all descriptors).
Codebook build_dictionary(const DatasetManifest& source, std::size_t k, std::uint64_t seed,
                          DescriptorStore& store, unsigned workers = 1);

/// Images of a manifest encoded with one dictionary, indexed by image path.
struct EncodedCorpus {
  std::string codebook_id;
  std::map<std::string, std::vector<double>> vectors;
};
EncodedCorpus encode_corpus(const DatasetManifest& manifest, const Codebook& dictionary,
                            const PipelineParams& params, DescriptorStore& store);

/// Splits, trains and tests on already-encoded images.
TrialResult evaluate_encoded(const EncodedCorpus& encoded, const DatasetManifest& target, std::uint32_t n_train,
                             std::uint64_t run_seed, const PipelineParams& params);

/// Encodes target with `dictionary` (any corpus), trains on a balanced
/// split and returns test accuracy.
TrialResult run_trial(const Codebook& dictionary, const DatasetManifest& target, std::uint32_t n_train,
                      std::uint64_t run_seed, const PipelineParams& params, DescriptorStore& store);

/// Per n_train, one trial per run seed with a fresh dictionary from
/// dict_source for every run. With include_native, the (target, target)
/// configuration is evaluated too, through the same code path. Rows are
/// ordered by (configuration, n_train).
std::vector<SummaryRow> cross_base_experiment(const DatasetManifest& dict_source, const DatasetManifest& target,
                                              std::span<const std::uint32_t> n_train_values, const SplitSpec& spec,
                                              const PipelineParams& params, DescriptorStore& store,
                                              bool include_native = true);

/// Dictionaries from nested class subsets of `source` (one per count),
/// evaluated on the whole of `target`. class_counts must be ascending.
std::vector<SummaryRow> diversity_sweep(const DatasetManifest& source, std::span<const std::size_t> class_counts,
                                        const DatasetManifest& target, std::uint32_t n_train, const SplitSpec& spec,
                                        const PipelineParams& params, DescriptorStore& store);

inline constexpr const char* kSummaryCsvHeader =
    "experiment,dict_source,dict_classes,target,n_train,k,sigma,assignment,pooling,n_runs,mean_acc,ci_low,ci_high";

std::string format_summary_row(const SummaryRow& row);
void write_summary_csv(std::ostream& out, std::span<const SummaryRow> rows, bool with_header = true);
/// Appends rows to `path`, writing the header only when the file is new or empty.
void append_summary_csv(const std::filesystem::path& path, std::span<const SummaryRow> rows);

}  // namespace bovw

#include "bovw/harness.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>

#include "bovw/error.hpp"
#include "bovw/parallel.hpp"
#include "bovw/rng.hpp"

namespace bovw {

RunSeeds derive_run_seeds(std::uint64_t run_seed) {
  return {run_seed, run_seed + 1000, run_seed + 2000, run_seed + 3000};
}

Split split_balanced(const DatasetManifest& manifest, std::uint32_t n_train, std::uint64_t seed) {
  if (n_train < 1) throw Error("n_train must be >= 1");
  const auto& entries = manifest.entries();
  std::vector<bool> in_train(entries.size(), false);
  Rng rng(seed);
  for (const std::string& label : manifest.classes()) {
    std::vector<std::size_t> members;
    for (std::size_t i = 0; i < entries.size(); ++i) {
      if (entries[i].class_label == label) members.push_back(i);
    }
    if (members.size() < std::size_t{n_train} + 1) {
      throw Error("class '" + label + "' has " + std::to_string(members.size()) + " images; n_train = " +
                  std::to_string(n_train) + " needs at least " + std::to_string(n_train + 1));
    }
    shuffle(members, rng);
    for (std::uint32_t t = 0; t < n_train; ++t) in_train[members[t]] = true;
  }
  std::vector<ManifestEntry> train;
  std::vector<ManifestEntry> test;
  for (std::size_t i = 0; i < entries.size(); ++i) (in_train[i] ? train : test).push_back(entries[i]);
  return {manifest.with_entries(std::move(train)), manifest.with_entries(std::move(test))};
}

DescriptorStore::DescriptorStore(GridParams grid, std::filesystem::path cache_dir)
    : grid_(grid), cache_dir_(std::move(cache_dir)) {
  grid_.validate();
  if (!cache_dir_.empty()) std::filesystem::create_directories(cache_dir_);
}

std::shared_ptr<const DescriptorSet> DescriptorStore::load_or_extract(const std::filesystem::path& image_path) const {
  const std::string id = image_path.string();
  if (!cache_dir_.empty()) {
    const auto cached = descriptor_cache_path(cache_dir_, id, grid_);
    if (std::filesystem::exists(cached)) {
      auto set = read_descriptor_cache(cached, id);
      if (set.params == grid_) return std::make_shared<const DescriptorSet>(std::move(set));
    }
    auto set = extract_dense_sift(load_image(image_path), grid_, id);
    write_descriptor_cache(set, cached);
    return std::make_shared<const DescriptorSet>(std::move(set));
  }
  return std::make_shared<const DescriptorSet>(extract_dense_sift(load_image(image_path), grid_, id));
}

std::vector<std::shared_ptr<const DescriptorSet>> DescriptorStore::get(const DatasetManifest& manifest,
                                                                       unsigned workers) {
  const auto& entries = manifest.entries();
  std::vector<std::string> keys(entries.size());
  std::vector<std::shared_ptr<const DescriptorSet>> out(entries.size());
  std::vector<std::size_t> missing;
  {
    std::lock_guard lock(mutex_);
    for (std::size_t i = 0; i < entries.size(); ++i) {
      keys[i] = manifest.resolve(entries[i]).lexically_normal().string();
      const auto it = sets_.find(keys[i]);
      if (it != sets_.end()) {
        out[i] = it->second;
      } else {
        missing.push_back(i);
      }
    }
  }
  parallel_for(missing.size(), workers, [&](std::size_t m) {
    const std::size_t i = missing[m];
    out[i] = load_or_extract(keys[i]);
  });
  std::lock_guard lock(mutex_);
  for (const std::size_t i : missing) sets_.emplace(keys[i], out[i]);
  return out;
}

std::shared_ptr<const DescriptorSet> DescriptorStore::get(const DatasetManifest& manifest,
                                                          const ManifestEntry& entry) {
  return get(manifest.with_entries({entry})).front();
}

namespace {

std::vector<const DescriptorSet*> raw(const std::vector<std::shared_ptr<const DescriptorSet>>& sets) {
  std::vector<const DescriptorSet*> ptrs;
  ptrs.reserve(sets.size());
  for (const auto& s : sets) ptrs.push_back(s.get());
  return ptrs;
}

}  // namespace

Codebook build_dictionary(const DatasetManifest& source, std::size_t k, std::uint64_t seed, DescriptorStore& store,
                          unsigned workers) {
  const auto sets = store.get(source, workers);
  const auto ptrs = raw(sets);
  return build_random_codebook(std::span<const DescriptorSet* const>(ptrs), k, seed, source.name(), source.classes());
}

EncodedCorpus encode_corpus(const DatasetManifest& manifest, const Codebook& dictionary, const PipelineParams& params,
                            DescriptorStore& store) {
  const auto sets = store.get(manifest, params.workers);
  const auto ptrs = raw(sets);
  auto bows = encode_images(std::span<const DescriptorSet* const>(ptrs), dictionary, params.encoding, params.workers);
  EncodedCorpus encoded;
  encoded.codebook_id = dictionary.id();
  for (std::size_t i = 0; i < bows.size(); ++i) {
    encoded.vectors.emplace(manifest.entries()[i].image_path, std::move(bows[i].h));
  }
  return encoded;
}

TrialResult evaluate_encoded(const EncodedCorpus& encoded, const DatasetManifest& target, std::uint32_t n_train,
                             std::uint64_t run_seed, const PipelineParams& params) {
  const RunSeeds seeds = derive_run_seeds(run_seed);
  const Split split = split_balanced(target, n_train, seeds.split);

  auto gather = [&](const DatasetManifest& part, std::vector<std::vector<double>>& vectors,
                    std::vector<std::string>& labels) {
    for (const auto& e : part.entries()) {
      const auto it = encoded.vectors.find(e.image_path);
      if (it == encoded.vectors.end()) throw Error("image was not encoded: " + e.image_path);
      vectors.push_back(it->second);
      labels.push_back(e.class_label);
    }
  };
  std::vector<std::vector<double>> train_x, test_x;
  std::vector<std::string> train_y, test_y;
  gather(split.train, train_x, train_y);
  gather(split.test, test_x, test_y);

  TrainConfig cfg = params.train;
  cfg.seed = seeds.train;
  cfg.workers = params.workers;
  const LinearModel model = train_ovr(train_x, train_y, cfg);
  return {accuracy(model, test_x, test_y), run_seed, n_train, encoded.codebook_id};
}

TrialResult run_trial(const Codebook& dictionary, const DatasetManifest& target, std::uint32_t n_train,
                      std::uint64_t run_seed, const PipelineParams& params, DescriptorStore& store) {
  const EncodedCorpus encoded = encode_corpus(target, dictionary, params, store);
  return evaluate_encoded(encoded, target, n_train, run_seed, params);
}

namespace {

SummaryRow summarize(std::string experiment, const DatasetManifest& dict_source, std::size_t dict_classes,
                     const DatasetManifest& target, std::uint32_t n_train, const SplitSpec& spec,
                     const PipelineParams& params, std::vector<TrialResult> trials,
                     std::vector<std::vector<std::string>> run_classes) {
  SummaryRow row;
  row.experiment = std::move(experiment);
  row.dict_source = dict_source.name();
  row.dict_classes = dict_classes;
  row.run_dict_classes = std::move(run_classes);
  row.target = target.name();
  row.n_train = n_train;
  row.k = params.k;
  row.sigma = params.encoding.sigma;
  row.assignment = params.encoding.assignment;
  row.pooling = params.encoding.pooling;
  row.n_runs = trials.size();
  std::vector<double> accs;
  for (const auto& t : trials) accs.push_back(t.accuracy);
  if (accs.size() >= 2) {
    const ConfidenceInterval ci = confidence_interval(accs, spec.alpha);
    row.mean_acc = ci.mean;
    row.ci_low = ci.low;
    row.ci_high = ci.high;
  } else if (accs.size() == 1) {
    row.mean_acc = row.ci_low = row.ci_high = accs.front();
  }
  row.trials = std::move(trials);
  return row;
}

}  // namespace

std::vector<SummaryRow> cross_base_experiment(const DatasetManifest& dict_source, const DatasetManifest& target,
                                              std::span<const std::uint32_t> n_train_values, const SplitSpec& spec,
                                              const PipelineParams& params, DescriptorStore& store,
                                              bool include_native) {
  if (n_train_values.empty()) throw Error("crossbase needs at least one n_train value");
  if (spec.run_seeds.empty()) throw Error("crossbase needs at least one run seed");

  std::vector<const DatasetManifest*> sources;
  if (include_native) sources.push_back(&target);
  if (!include_native || !(dict_source == target)) sources.push_back(&dict_source);

  std::vector<SummaryRow> rows;
  for (const DatasetManifest* source : sources) {
    std::vector<std::vector<TrialResult>> trials(n_train_values.size());
    std::vector<std::vector<std::string>> run_classes;
    for (const std::uint64_t run_seed : spec.run_seeds) {
      const Codebook dict =
          build_dictionary(*source, params.k, derive_run_seeds(run_seed).dictionary, store, params.workers);
      run_classes.push_back(dict.source_classes);
      const EncodedCorpus encoded = encode_corpus(target, dict, params, store);
      for (std::size_t n = 0; n < n_train_values.size(); ++n) {
        trials[n].push_back(evaluate_encoded(encoded, target, n_train_values[n], run_seed, params));
      }
    }
    for (std::size_t n = 0; n < n_train_values.size(); ++n) {
      rows.push_back(summarize("crossbase", *source, source->classes().size(), target, n_train_values[n], spec, params,
                               std::move(trials[n]), run_classes));
    }
  }
  return rows;
}

std::vector<SummaryRow> diversity_sweep(const DatasetManifest& source, std::span<const std::size_t> class_counts,
                                        const DatasetManifest& target, std::uint32_t n_train, const SplitSpec& spec,
                                        const PipelineParams& params, DescriptorStore& store) {
  if (class_counts.empty()) throw Error("sweep needs at least one class count");
  if (spec.run_seeds.empty()) throw Error("sweep needs at least one run seed");
  if (!std::is_sorted(class_counts.begin(), class_counts.end())) throw Error("class counts must be ascending");
  if (class_counts.front() < 1 || class_counts.back() > source.classes().size()) {
    throw Error("class counts must lie in [1, " + std::to_string(source.classes().size()) + "]");
  }

  std::vector<std::vector<TrialResult>> trials(class_counts.size());
  std::vector<std::vector<std::vector<std::string>>> run_classes(class_counts.size());
  for (const std::uint64_t run_seed : spec.run_seeds) {
    const RunSeeds seeds = derive_run_seeds(run_seed);
    for (std::size_t c = 0; c < class_counts.size(); ++c) {
      const DatasetManifest subset = select_classes(source, class_counts[c], seeds.classes);
      const Codebook dict = build_dictionary(subset, params.k, seeds.dictionary, store, params.workers);
      run_classes[c].push_back(dict.source_classes);
      const EncodedCorpus encoded = encode_corpus(target, dict, params, store);
      trials[c].push_back(evaluate_encoded(encoded, target, n_train, run_seed, params));
    }
  }

  std::vector<SummaryRow> rows;
  for (std::size_t c = 0; c < class_counts.size(); ++c) {
    rows.push_back(summarize("sweep", source, class_counts[c], target, n_train, spec, params, std::move(trials[c]),
                             std::move(run_classes[c])));
  }
  return rows;
}

std::string format_summary_row(const SummaryRow& row) {
  char buf[512];
  std::snprintf(buf, sizeof buf, "%s,%s,%zu,%s,%u,%zu,%g,%s,%s,%zu,%.6f,%.6f,%.6f", row.experiment.c_str(),
                row.dict_source.c_str(), row.dict_classes, row.target.c_str(), row.n_train, row.k, row.sigma,
                std::string(to_string(row.assignment)).c_str(), std::string(to_string(row.pooling)).c_str(),
                row.n_runs, row.mean_acc, row.ci_low, row.ci_high);
  return buf;
}

void write_summary_csv(std::ostream& out, std::span<const SummaryRow> rows, bool with_header) {
  if (with_header) out << kSummaryCsvHeader << '\n';
  for (const auto& row : rows) out << format_summary_row(row) << '\n';
}

void append_summary_csv(const std::filesystem::path& path, std::span<const SummaryRow> rows) {
  const bool fresh = !std::filesystem::exists(path) || std::filesystem::file_size(path) == 0;
  std::ofstream out(path, std::ios::app);
  if (!out) throw Error("cannot open for writing: " + path.string());
  write_summary_csv(out, rows, fresh);
  if (!out) throw Error("write failed: " + path.string());
}

}  // namespace bovw

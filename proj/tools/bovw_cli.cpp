// bovw: dense SIFT bag-of-visual-words pipeline and dictionary experiments.

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include "bovw/classifier.hpp"
#include "bovw/codebook.hpp"
#include "bovw/corpus.hpp"
#include "bovw/encoding.hpp"
#include "bovw/error.hpp"
#include "bovw/harness.hpp"
#include "bovw/synth.hpp"

namespace {

struct Options {
  std::uint32_t stride = 6;
  std::uint32_t patch = 16;
  std::size_t k = 1000;
  double sigma = 60.0;
  std::string assignment = "soft";
  std::string pooling = "max";
  bool l2_normalize = false;
  std::size_t runs = 5;
  std::uint64_t seed = 0;
  unsigned workers = 1;
  double alpha = 0.05;
  double c_reg = 1.0;
  std::uint32_t epochs = 50;
  std::string cache_dir;
};

void add_grid_flags(CLI::App* cmd, Options& o) {
  cmd->add_option("--stride", o.stride, "Dense grid stride in pixels")->capture_default_str();
  cmd->add_option("--patch", o.patch, "Patch size in pixels (multiple of 4)")->capture_default_str();
  cmd->add_option("--cache-dir", o.cache_dir, "Descriptor cache directory");
  cmd->add_option("--workers", o.workers, "Worker threads")->capture_default_str();
}

void add_encoding_flags(CLI::App* cmd, Options& o) {
  cmd->add_option("--sigma", o.sigma, "Soft-assignment kernel width")->capture_default_str();
  cmd->add_option("--assignment", o.assignment, "hard or soft")->capture_default_str();
  cmd->add_option("--pooling", o.pooling, "max or average")->capture_default_str();
  cmd->add_flag("--l2-normalize", o.l2_normalize, "L2-normalize pooled vectors");
}

void add_train_flags(CLI::App* cmd, Options& o) {
  cmd->add_option("--c-reg", o.c_reg, "SVM regularization constant C")->capture_default_str();
  cmd->add_option("--epochs", o.epochs, "SGD epochs")->capture_default_str();
}

void add_experiment_flags(CLI::App* cmd, Options& o) {
  add_grid_flags(cmd, o);
  add_encoding_flags(cmd, o);
  add_train_flags(cmd, o);
  cmd->add_option("--k", o.k, "Visual words per dictionary")->capture_default_str();
  cmd->add_option("--runs", o.runs, "Repeated runs (one dictionary each)")->capture_default_str();
  cmd->add_option("--seed", o.seed, "First run seed; runs use seed, seed+1, ...")->capture_default_str();
  cmd->add_option("--alpha", o.alpha, "Confidence-interval significance level")->capture_default_str();
}

bovw::PipelineParams pipeline(const Options& o) {
  bovw::PipelineParams p;
  p.grid = {o.stride, o.patch};
  p.k = o.k;
  p.encoding.sigma = o.sigma;
  p.encoding.assignment = bovw::parse_assignment(o.assignment);
  p.encoding.pooling = bovw::parse_pooling(o.pooling);
  p.encoding.l2_normalize = o.l2_normalize;
  p.train.c_reg = o.c_reg;
  p.train.epochs = o.epochs;
  p.workers = o.workers;
  p.cache_dir = o.cache_dir;
  p.grid.validate();
  p.encoding.validate();
  p.train.validate();
  return p;
}

bovw::SplitSpec split_spec(const Options& o, std::uint32_t n_train) {
  if (o.runs < 1) throw bovw::Error("--runs must be >= 1");
  bovw::SplitSpec spec;
  spec.n_train_per_class = n_train;
  spec.alpha = o.alpha;
  spec.run_seeds.clear();
  for (std::size_t r = 0; r < o.runs; ++r) spec.run_seeds.push_back(o.seed + r);
  // Validates alpha up front rather than after hours of computation.
  bovw::student_t_critical(o.alpha, 1);
  return spec;
}

void report(const std::vector<bovw::SummaryRow>& rows, const std::string& out) {
  for (const auto& row : rows) {
    std::cerr << row.experiment << " dict=" << row.dict_source << " classes=" << row.dict_classes
              << " target=" << row.target << " n_train=" << row.n_train << " mean=" << row.mean_acc << " ci=["
              << row.ci_low << ", " << row.ci_high << "]\n";
    for (std::size_t r = 0; r < row.run_dict_classes.size() && row.experiment == "sweep"; ++r) {
      std::cerr << "  run " << row.trials[r].seed << " dictionary classes:";
      for (const auto& c : row.run_dict_classes[r]) std::cerr << ' ' << c;
      std::cerr << '\n';
    }
  }
  if (out.empty() || out == "-") {
    bovw::write_summary_csv(std::cout, rows);
  } else {
    bovw::append_summary_csv(out, rows);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bag-of-visual-words pipeline: dense SIFT, random codebooks, soft assignment, linear SVM"};
  app.require_subcommand(1);
  Options o;

  std::string manifest_path, out_path, codebook_path, bow_path, model_path, csv_path;
  std::string source_path, target_path, preset = "diverse";
  std::size_t class_count = 0;
  std::vector<std::uint32_t> n_train_values;
  std::vector<std::size_t> class_counts;
  std::uint32_t n_train = 30;
  bool no_native = false;
  std::uint32_t images_per_class = 60, size = 64;

  auto* extract = app.add_subcommand("extract", "Extract dense SIFT for a manifest into a descriptor cache");
  extract->add_option("--manifest", manifest_path, "Image manifest (path<TAB>label)")->required();
  add_grid_flags(extract, o);
  extract->get_option("--cache-dir")->required();

  auto* codebook = app.add_subcommand("codebook", "Build a random codebook from a manifest");
  codebook->add_option("--manifest", manifest_path)->required();
  codebook->add_option("--out", out_path, "Codebook file")->required();
  codebook->add_option("--classes", class_count, "Use only this many seed-selected classes (0 = all)");
  codebook->add_option("--k", o.k)->capture_default_str();
  codebook->add_option("--seed", o.seed)->capture_default_str();
  add_grid_flags(codebook, o);

  auto* encode = app.add_subcommand("encode", "Encode a manifest with a codebook");
  encode->add_option("--manifest", manifest_path)->required();
  encode->add_option("--codebook", codebook_path)->required();
  encode->add_option("--out", out_path, "Bow batch file")->required();
  encode->add_option("--csv", csv_path, "Also write a CSV export");
  add_grid_flags(encode, o);
  add_encoding_flags(encode, o);

  auto* train = app.add_subcommand("train", "Train a one-vs-rest linear SVM on a bow file");
  train->add_option("--bow", bow_path)->required();
  train->add_option("--out", out_path, "Model file")->required();
  train->add_option("--seed", o.seed)->capture_default_str();
  train->add_option("--workers", o.workers)->capture_default_str();
  add_train_flags(train, o);

  auto* eval = app.add_subcommand("eval", "Report model accuracy on a bow file");
  eval->add_option("--bow", bow_path)->required();
  eval->add_option("--model", model_path)->required();

  auto* crossbase = app.add_subcommand("crossbase", "Native vs cross-corpus dictionary experiment");
  crossbase->add_option("--source", source_path, "Manifest the cross dictionaries come from")->required();
  crossbase->add_option("--target", target_path, "Manifest to classify")->required();
  crossbase->add_option("--n-train", n_train_values, "Training images per class")->delimiter(',')->required();
  crossbase->add_option("--out", out_path, "Results CSV (appended; '-' for stdout)");
  crossbase->add_flag("--no-native", no_native, "Skip the target-built dictionary configuration");
  add_experiment_flags(crossbase, o);

  auto* sweep = app.add_subcommand("sweep", "Dictionaries from nested class subsets");
  sweep->add_option("--source", source_path)->required();
  sweep->add_option("--classes", class_counts, "Ascending class counts")->delimiter(',')->required();
  sweep->add_option("--target", target_path, "Manifest to classify (defaults to --source)");
  sweep->add_option("--n-train", n_train, "Training images per class")->capture_default_str();
  sweep->add_option("--out", out_path, "Results CSV (appended; '-' for stdout)");
  add_experiment_flags(sweep, o);

  auto* synth = app.add_subcommand("synth", "Generate a synthetic texture corpus");
  synth->add_option("--preset", preset, "diverse or narrow")->capture_default_str();
  synth->add_option("--out", out_path, "Output directory")->required();
  synth->add_option("--images-per-class", images_per_class)->capture_default_str();
  synth->add_option("--size", size, "Image width and height")->capture_default_str();
  synth->add_option("--seed", o.seed, "Overrides the preset seed when given");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*extract) {
      const auto manifest = bovw::load_manifest(manifest_path);
      bovw::DescriptorStore store({o.stride, o.patch}, o.cache_dir);
      const auto sets = store.get(manifest, o.workers);
      std::size_t total = 0;
      for (const auto& s : sets) total += s->size();
      std::cout << "extracted " << total << " descriptors from " << sets.size() << " images\n";
    } else if (*codebook) {
      auto manifest = bovw::load_manifest(manifest_path);
      if (class_count > 0) manifest = bovw::select_classes(manifest, class_count, o.seed);
      bovw::DescriptorStore store({o.stride, o.patch}, o.cache_dir);
      const auto cb = bovw::build_dictionary(manifest, o.k, o.seed, store, o.workers);
      bovw::write_codebook(cb, out_path);
      std::cout << "codebook " << cb.id() << " written to " << out_path << '\n';
    } else if (*encode) {
      const auto manifest = bovw::load_manifest(manifest_path);
      const auto cb = bovw::read_codebook(codebook_path);
      auto params = pipeline(o);
      bovw::DescriptorStore store(params.grid, o.cache_dir);
      const auto sets = store.get(manifest, o.workers);
      std::vector<const bovw::DescriptorSet*> ptrs;
      for (const auto& s : sets) ptrs.push_back(s.get());
      bovw::BowBatch batch;
      batch.codebook_id = cb.id();
      batch.k = cb.size();
      batch.vectors = bovw::encode_images(ptrs, cb, params.encoding, o.workers);
      for (std::size_t i = 0; i < manifest.size(); ++i) {
        batch.vectors[i].image = manifest.entries()[i].image_path;
        batch.labels.push_back(manifest.entries()[i].class_label);
      }
      bovw::write_bow_file(batch, out_path);
      if (!csv_path.empty()) bovw::write_bow_csv(batch, csv_path);
      std::cout << "encoded " << batch.vectors.size() << " images with " << cb.id() << '\n';
    } else if (*train) {
      const auto batch = bovw::read_bow_file(bow_path);
      std::vector<std::vector<double>> x;
      for (const auto& v : batch.vectors) x.push_back(v.h);
      bovw::TrainConfig cfg{o.c_reg, o.epochs, o.seed, o.workers};
      const auto model = bovw::train_ovr(x, batch.labels, cfg);
      bovw::write_model(model, out_path);
      std::cout << "trained " << model.num_classes() << "-class model on " << x.size() << " vectors\n";
    } else if (*eval) {
      const auto batch = bovw::read_bow_file(bow_path);
      const auto model = bovw::read_model(model_path);
      std::vector<std::vector<double>> x;
      for (const auto& v : batch.vectors) x.push_back(v.h);
      std::printf("accuracy %.6f\n", bovw::accuracy(model, x, batch.labels));
    } else if (*crossbase) {
      const auto source = bovw::load_manifest(source_path);
      const auto target = bovw::load_manifest(target_path);
      const auto params = pipeline(o);
      const auto spec = split_spec(o, n_train_values.front());
      bovw::DescriptorStore store(params.grid, params.cache_dir);
      report(bovw::cross_base_experiment(source, target, n_train_values, spec, params, store, !no_native), out_path);
    } else if (*sweep) {
      const auto source = bovw::load_manifest(source_path);
      const auto target = target_path.empty() ? source : bovw::load_manifest(target_path);
      const auto params = pipeline(o);
      const auto spec = split_spec(o, n_train);
      bovw::DescriptorStore store(params.grid, params.cache_dir);
      report(bovw::diversity_sweep(source, class_counts, target, n_train, spec, params, store), out_path);
    } else if (*synth) {
      auto spec = bovw::preset_by_name(preset);
      spec.images_per_class = images_per_class;
      spec.width = spec.height = size;
      if (synth->count("--seed") > 0) spec.seed = o.seed;
      const auto manifest = bovw::generate_corpus(spec, out_path);
      std::cout << "wrote " << manifest.size() << " images in " << manifest.classes().size() << " classes; manifest "
                << (std::filesystem::path(out_path) / (spec.name + ".tsv")).string() << '\n';
    }
  } catch (const std::exception& e) {
    std::cerr << "bovw: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

#include "bovw/classifier.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "bovw/binary_io.hpp"
#include "bovw/error.hpp"
#include "bovw/parallel.hpp"
#include "bovw/rng.hpp"

namespace bovw {

void TrainConfig::validate() const {
  if (!(c_reg > 0.0) || !std::isfinite(c_reg)) throw Error("regularization C must be positive");
  if (epochs < 1) throw Error("epochs must be >= 1");
}

double LinearModel::score(std::size_t c, std::span<const double> v) const {
  const auto w = weights_of(c);
  return std::inner_product(w.begin(), w.end(), v.begin(), 0.0) + biases[c];
}

namespace {

struct BinaryModel {
  std::vector<double> w;
  double b = 0.0;
};

// Pegasos on the augmented vector (x, 1). The weight vector is kept as
// scale * v so the per-step shrink is O(1).
BinaryModel train_binary(std::span<const std::vector<double>> vectors, std::span<const int> targets,
                         std::size_t dims, double lambda, std::uint32_t epochs, std::uint64_t seed) {
  std::vector<double> v(dims, 0.0);
  double vb = 0.0;
  double scale = 1.0;

  std::vector<std::size_t> order(vectors.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(seed);
  std::uint64_t t = 0;
  for (std::uint32_t epoch = 0; epoch < epochs; ++epoch) {
    shuffle(order, rng);
    for (const std::size_t i : order) {
      ++t;
      const std::vector<double>& x = vectors[i];
      const double y = targets[i];
      const double eta = 1.0 / (lambda * static_cast<double>(t));
      const double margin = y * scale * (std::inner_product(v.begin(), v.end(), x.begin(), 0.0) + vb);

      scale *= 1.0 - eta * lambda;
      if (scale <= 0.0) {
        std::fill(v.begin(), v.end(), 0.0);
        vb = 0.0;
        scale = 1.0;
      }
      if (margin < 1.0) {
        const double step = eta * y / scale;
        for (std::size_t d = 0; d < dims; ++d) v[d] += step * x[d];
        vb += step;
      }
    }
  }

  BinaryModel m;
  m.w.resize(dims);
  for (std::size_t d = 0; d < dims; ++d) m.w[d] = scale * v[d];
  m.b = scale * vb;
  return m;
}

}  // namespace

LinearModel train_ovr(std::span<const std::vector<double>> vectors, std::span<const std::string> labels,
                      const TrainConfig& cfg) {
  cfg.validate();
  if (vectors.empty()) throw Error("cannot train on an empty set");
  if (vectors.size() != labels.size()) throw Error("vectors and labels differ in length");
  const std::size_t dims = vectors.front().size();
  for (const auto& v : vectors) {
    if (v.size() != dims) throw Error("training vectors have inconsistent dimensions");
  }
  const std::set<std::string> label_set(labels.begin(), labels.end());
  if (label_set.size() < 2) throw Error("training needs at least two distinct classes");

  LinearModel model;
  model.labels.assign(label_set.begin(), label_set.end());
  model.dims = dims;
  const std::size_t n_classes = model.labels.size();
  model.weights.assign(n_classes * dims, 0.0);
  model.biases.assign(n_classes, 0.0);

  const double lambda = 1.0 / (cfg.c_reg * static_cast<double>(vectors.size()));
  parallel_for(n_classes, cfg.workers, [&](std::size_t c) {
    std::vector<int> targets(labels.size());
    for (std::size_t i = 0; i < labels.size(); ++i) targets[i] = labels[i] == model.labels[c] ? 1 : -1;
    const BinaryModel m = train_binary(vectors, targets, dims, lambda, cfg.epochs, derive_seed(cfg.seed, c));
    std::copy(m.w.begin(), m.w.end(), model.weights.begin() + static_cast<std::ptrdiff_t>(c * dims));
    model.biases[c] = m.b;
  });
  return model;
}

const std::string& predict(const LinearModel& model, std::span<const double> v) {
  if (v.size() != model.dims) {
    throw Error("vector dimension " + std::to_string(v.size()) + " does not match model dimension " +
                std::to_string(model.dims));
  }
  std::size_t best = 0;
  double best_score = model.score(0, v);
  for (std::size_t c = 1; c < model.num_classes(); ++c) {
    const double s = model.score(c, v);
    if (s > best_score) {
      best = c;
      best_score = s;
    }
  }
  return model.labels[best];
}

double accuracy(const LinearModel& model, std::span<const std::vector<double>> vectors,
                std::span<const std::string> labels) {
  if (vectors.empty()) throw Error("cannot compute accuracy on an empty test set");
  if (vectors.size() != labels.size()) throw Error("vectors and labels differ in length");
  std::size_t correct = 0;
  for (std::size_t i = 0; i < vectors.size(); ++i) {
    if (predict(model, vectors[i]) == labels[i]) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(vectors.size());
}

double binary_objective(std::span<const double> w, double b, std::span<const std::vector<double>> vectors,
                        std::span<const int> targets, double lambda) {
  double reg = b * b;
  for (double x : w) reg += x * x;
  double loss = 0.0;
  for (std::size_t i = 0; i < vectors.size(); ++i) {
    const double s = std::inner_product(w.begin(), w.end(), vectors[i].begin(), 0.0) + b;
    loss += std::max(0.0, 1.0 - targets[i] * s);
  }
  return 0.5 * lambda * reg + loss / static_cast<double>(vectors.size());
}

namespace {
constexpr std::string_view kModelMagic = "BVLM";
constexpr std::uint32_t kModelVersion = 1;
}  // namespace

void write_model(const LinearModel& model, const std::filesystem::path& path) {
  io::Writer w;
  w.magic(kModelMagic);
  w.u32(kModelVersion);
  w.u32(static_cast<std::uint32_t>(model.num_classes()));
  w.u32(static_cast<std::uint32_t>(model.dims));
  for (const auto& label : model.labels) w.str(label);
  for (std::size_t c = 0; c < model.num_classes(); ++c) {
    for (double x : model.weights_of(c)) w.f64(x);
    w.f64(model.biases[c]);
  }
  w.save(path);
}

LinearModel read_model(const std::filesystem::path& path) {
  io::Reader r(path, "model file");
  r.expect_magic(kModelMagic);
  r.expect_version(kModelVersion);
  LinearModel model;
  const std::uint32_t n_classes = r.u32();
  model.dims = r.u32();
  if (n_classes < 2) throw Error("model file: needs at least two classes");
  for (std::uint32_t c = 0; c < n_classes; ++c) model.labels.push_back(r.str());
  model.weights.resize(std::size_t{n_classes} * model.dims);
  model.biases.resize(n_classes);
  for (std::uint32_t c = 0; c < n_classes; ++c) {
    for (std::size_t d = 0; d < model.dims; ++d) model.weights[c * model.dims + d] = r.f64();
    model.biases[c] = r.f64();
  }
  r.expect_end();
  return model;
}

}  // namespace bovw

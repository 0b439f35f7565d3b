#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace bovw {

struct TrainConfig {
  double c_reg = 1.0;
  std::uint32_t epochs = 50;
  std::uint64_t seed = 0;
  /// Binary problems trained concurrently; does not affect the result.
  unsigned workers = 1;

  void validate() const;
};

/// One-vs-rest linear scorer: score_c(v) = w_c . v + b_c.
struct LinearModel {
  std::vector<std::string> labels;  ///< sorted; index = class index
  std::size_t dims = 0;
  std::vector<double> weights;      ///< labels.size() x dims, row-major
  std::vector<double> biases;

  std::size_t num_classes() const { return labels.size(); }
  std::span<const double> weights_of(std::size_t c) const { return {weights.data() + c * dims, dims}; }
  double score(std::size_t c, std::span<const double> v) const;

  friend bool operator==(const LinearModel&, const LinearModel&) = default;
};

/// Trains one L2-regularized hinge-loss classifier per class by seeded
/// stochastic subgradient descent (Pegasos step 1/(lambda t), lambda = 1/(C n)).
/// The bias is learned as the weight of a constant unit feature.
LinearModel train_ovr(std::span<const std::vector<double>> vectors, std::span<const std::string> labels,
                      const TrainConfig& cfg);

/// Label with the highest score; ties go to the lowest class index.
const std::string& predict(const LinearModel& model, std::span<const double> v);

/// Fraction of vectors whose prediction equals the given label.
double accuracy(const LinearModel& model, std::span<const std::vector<double>> vectors,
                std::span<const std::string> labels);

/// lambda/2 (|w|^2 + b^2) + mean hinge loss, targets in {-1, +1}.
double binary_objective(std::span<const double> w, double b, std::span<const std::vector<double>> vectors,
                        std::span<const int> targets, double lambda);

// "BVLM", version, C, k, labels, then C x (k weights, bias) as f64.
void write_model(const LinearModel& model, const std::filesystem::path& path);
LinearModel read_model(const std::filesystem::path& path);

}  // namespace bovw

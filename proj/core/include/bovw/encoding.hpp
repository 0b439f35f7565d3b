#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "bovw/codebook.hpp"
#include "bovw/features.hpp"

namespace bovw {

enum class Assignment { hard, soft };
enum class Pooling { average, max };

std::string_view to_string(Assignment a);
std::string_view to_string(Pooling p);
Assignment parse_assignment(std::string_view s);
Pooling parse_pooling(std::string_view s);

struct EncodingParams {
  double sigma = 60.0;
  Assignment assignment = Assignment::soft;
  Pooling pooling = Pooling::max;
  /// L2-normalize the pooled vector. Off by default: pooled vectors are
  /// fed to the classifier as they are.
  bool l2_normalize = false;

  void validate() const;
};

/// Per-point word memberships (one alpha per word).
using AssignmentRow = std::vector<double>;

struct BowVector {
  std::vector<double> h;
  std::string image;
  std::string codebook_id;

  std::size_t size() const { return h.size(); }
  friend bool operator==(const BowVector&, const BowVector&) = default;
};

/// Gaussian-kernel soft assignment:
///   alpha_j = exp(-d_j^2 / 2s^2) / sum_l exp(-d_l^2 / 2s^2).
/// The kernel's 1/(sqrt(2 pi) s) factor cancels in the ratio and is
/// dropped; exponents are shifted by min_j d_j^2 so the largest term is 1.
AssignmentRow soft_assign(std::span<const double> distances, double sigma);

/// One-hot at argmin distance; ties go to the lowest index.
AssignmentRow hard_assign(std::span<const double> distances);

/// Same as soft_assign but from squared distances, writing into `out`.
void soft_assign_squared(std::span<const double> squared, double sigma, std::span<double> out);

/// Running pooled accumulator, fed one assignment row at a time.
class Pooler {
 public:
  Pooler(std::size_t k, Pooling pooling);

  void add(std::span<const double> row);
  /// Marks word j as the single hot entry of a one-hot row.
  void add_one_hot(std::size_t j);
  std::size_t count() const { return count_; }
  /// Throws if no rows were added.
  std::vector<double> result() const;

 private:
  Pooling pooling_;
  std::vector<double> acc_;
  std::size_t count_ = 0;
};

BowVector max_pool(std::span<const AssignmentRow> rows);
BowVector average_pool(std::span<const AssignmentRow> rows);

/// distances -> assignment -> pooling over every point of the set.
BowVector encode_image(const DescriptorSet& ds, const Codebook& cb, const EncodingParams& params);

/// encode_image over many sets; result i corresponds to sets[i].
std::vector<BowVector> encode_images(std::span<const DescriptorSet* const> sets, const Codebook& cb,
                                     const EncodingParams& params, unsigned workers = 1);

/// A batch of encoded images with their class labels.
struct BowBatch {
  std::string codebook_id;
  std::size_t k = 0;
  std::vector<BowVector> vectors;
  std::vector<std::string> labels;

  friend bool operator==(const BowBatch&, const BowBatch&) = default;
};

// "BVBW", version, count, k, codebook id, then per row: image id, label,
// k x f64.
void write_bow_file(const BowBatch& batch, const std::filesystem::path& path);
BowBatch read_bow_file(const std::filesystem::path& path);
/// One line per image: id followed by its k values.
void write_bow_csv(const BowBatch& batch, const std::filesystem::path& path);

}  // namespace bovw

#include "bovw/encoding.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "bovw/binary_io.hpp"
#include "bovw/error.hpp"
#include "bovw/parallel.hpp"

namespace bovw {

std::string_view to_string(Assignment a) { return a == Assignment::hard ? "hard" : "soft"; }
std::string_view to_string(Pooling p) { return p == Pooling::max ? "max" : "average"; }

Assignment parse_assignment(std::string_view s) {
  if (s == "hard") return Assignment::hard;
  if (s == "soft") return Assignment::soft;
  throw Error("unknown assignment '" + std::string(s) + "', expected hard or soft");
}

Pooling parse_pooling(std::string_view s) {
  if (s == "max") return Pooling::max;
  if (s == "average" || s == "avg") return Pooling::average;
  throw Error("unknown pooling '" + std::string(s) + "', expected max or average");
}

void EncodingParams::validate() const {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) throw Error("sigma must be a positive finite number");
}

void soft_assign_squared(std::span<const double> squared, double sigma, std::span<double> out) {
  if (squared.empty()) throw Error("soft assignment needs at least one word");
  if (!(sigma > 0.0)) throw Error("sigma must be positive");
  if (out.size() != squared.size()) throw Error("assignment row size mismatch");
  const double shift = *std::min_element(squared.begin(), squared.end());
  const double scale = -1.0 / (2.0 * sigma * sigma);
  double total = 0.0;
  for (std::size_t j = 0; j < squared.size(); ++j) {
    out[j] = std::exp((squared[j] - shift) * scale);
    total += out[j];
  }
  // total >= 1: the nearest word contributes exp(0).
  for (double& v : out) v /= total;
}

AssignmentRow soft_assign(std::span<const double> distances, double sigma) {
  std::vector<double> squared(distances.size());
  std::transform(distances.begin(), distances.end(), squared.begin(), [](double d) { return d * d; });
  AssignmentRow row(distances.size());
  soft_assign_squared(squared, sigma, row);
  return row;
}

AssignmentRow hard_assign(std::span<const double> distances) {
  if (distances.empty()) throw Error("hard assignment needs at least one word");
  AssignmentRow row(distances.size(), 0.0);
  row[static_cast<std::size_t>(std::min_element(distances.begin(), distances.end()) - distances.begin())] = 1.0;
  return row;
}

Pooler::Pooler(std::size_t k, Pooling pooling) : pooling_(pooling), acc_(k, 0.0) {
  if (k == 0) throw Error("pooling needs k >= 1");
}

void Pooler::add(std::span<const double> row) {
  if (row.size() != acc_.size()) throw Error("assignment row length does not match k");
  if (pooling_ == Pooling::max) {
    if (count_ == 0) {
      std::copy(row.begin(), row.end(), acc_.begin());
    } else {
      for (std::size_t j = 0; j < acc_.size(); ++j) acc_[j] = std::max(acc_[j], row[j]);
    }
  } else {
    for (std::size_t j = 0; j < acc_.size(); ++j) acc_[j] += row[j];
  }
  ++count_;
}

void Pooler::add_one_hot(std::size_t j) {
  if (j >= acc_.size()) throw Error("one-hot index out of range");
  if (pooling_ == Pooling::max) {
    acc_[j] = 1.0;
  } else {
    acc_[j] += 1.0;
  }
  ++count_;
}

std::vector<double> Pooler::result() const {
  if (count_ == 0) throw Error("cannot pool an empty set of assignment rows");
  std::vector<double> h = acc_;
  if (pooling_ == Pooling::average) {
    for (double& v : h) v /= static_cast<double>(count_);
  }
  return h;
}

namespace {

BowVector pool_rows(std::span<const AssignmentRow> rows, Pooling pooling) {
  if (rows.empty()) throw Error("cannot pool an empty set of assignment rows");
  Pooler pooler(rows.front().size(), pooling);
  for (const auto& row : rows) pooler.add(row);
  BowVector v;
  v.h = pooler.result();
  return v;
}

void l2_normalize(std::vector<double>& h) {
  double s = 0.0;
  for (double v : h) s += v * v;
  if (s == 0.0) return;
  const double inv = 1.0 / std::sqrt(s);
  for (double& v : h) v *= inv;
}

}  // namespace

BowVector max_pool(std::span<const AssignmentRow> rows) { return pool_rows(rows, Pooling::max); }
BowVector average_pool(std::span<const AssignmentRow> rows) { return pool_rows(rows, Pooling::average); }

BowVector encode_image(const DescriptorSet& ds, const Codebook& cb, const EncodingParams& params) {
  params.validate();
  if (cb.size() == 0) throw Error("cannot encode with an empty codebook");
  if (ds.size() == 0) throw Error("cannot encode an image without descriptors: " + ds.source_image);
  const std::size_t k = cb.size();

  Pooler pooler(k, params.pooling);
  std::vector<std::int32_t> sq(k);
  std::vector<double> sq_real(k);
  std::vector<double> row(k);
  for (const Descriptor& d : ds.descriptors) {
    squared_distances(cb, d, sq);
    if (params.assignment == Assignment::hard) {
      pooler.add_one_hot(static_cast<std::size_t>(std::min_element(sq.begin(), sq.end()) - sq.begin()));
    } else {
      std::copy(sq.begin(), sq.end(), sq_real.begin());
      soft_assign_squared(sq_real, params.sigma, row);
      pooler.add(row);
    }
  }

  BowVector v;
  v.h = pooler.result();
  if (params.l2_normalize) l2_normalize(v.h);
  v.image = ds.source_image;
  v.codebook_id = cb.id();
  return v;
}

std::vector<BowVector> encode_images(std::span<const DescriptorSet* const> sets, const Codebook& cb,
                                     const EncodingParams& params, unsigned workers) {
  std::vector<BowVector> out(sets.size());
  parallel_for(sets.size(), workers, [&](std::size_t i) { out[i] = encode_image(*sets[i], cb, params); });
  return out;
}

namespace {
constexpr std::string_view kBowMagic = "BVBW";
constexpr std::uint32_t kBowVersion = 1;
}  // namespace

void write_bow_file(const BowBatch& batch, const std::filesystem::path& path) {
  if (batch.labels.size() != batch.vectors.size()) throw Error("bow batch: labels and vectors differ in length");
  io::Writer w;
  w.magic(kBowMagic);
  w.u32(kBowVersion);
  w.u32(static_cast<std::uint32_t>(batch.vectors.size()));
  w.u32(static_cast<std::uint32_t>(batch.k));
  w.str(batch.codebook_id);
  for (std::size_t i = 0; i < batch.vectors.size(); ++i) {
    const BowVector& v = batch.vectors[i];
    if (v.size() != batch.k) throw Error("bow batch: vector length does not match k");
    w.str(v.image);
    w.str(batch.labels[i]);
    for (double x : v.h) w.f64(x);
  }
  w.save(path);
}

BowBatch read_bow_file(const std::filesystem::path& path) {
  io::Reader r(path, "bow file");
  r.expect_magic(kBowMagic);
  r.expect_version(kBowVersion);
  const std::uint32_t count = r.u32();
  BowBatch batch;
  batch.k = r.u32();
  batch.codebook_id = r.str();
  batch.vectors.resize(count);
  batch.labels.resize(count);
  for (std::uint32_t i = 0; i < count; ++i) {
    BowVector& v = batch.vectors[i];
    v.image = r.str();
    batch.labels[i] = r.str();
    v.codebook_id = batch.codebook_id;
    v.h.resize(batch.k);
    for (double& x : v.h) x = r.f64();
  }
  r.expect_end();
  return batch;
}

void write_bow_csv(const BowBatch& batch, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error("cannot open for writing: " + path.string());
  char buf[32];
  for (const BowVector& v : batch.vectors) {
    out << v.image;
    for (double x : v.h) {
      std::snprintf(buf, sizeof buf, ",%.17g", x);
      out << buf;
    }
    out << '\n';
  }
  if (!out) throw Error("write failed: " + path.string());
}

}  // namespace bovw

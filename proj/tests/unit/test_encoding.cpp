#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>

#include "bovw/encoding.hpp"
#include "bovw/error.hpp"
#include "oracles/encoding_oracle.hpp"
#include "support/temp_dir.hpp"

using bovw::AssignmentRow;
using bovw::Descriptor;

namespace {

std::vector<double> random_profile(std::mt19937& gen, std::size_t k, double scale) {
  std::uniform_real_distribution<double> u(0.0, scale);
  std::vector<double> d(k);
  for (auto& v : d) v = u(gen);
  return d;
}

Descriptor random_descriptor(std::mt19937& gen) {
  std::uniform_int_distribution<int> byte(0, 255);
  Descriptor d;
  for (auto& v : d) v = static_cast<std::uint8_t>(byte(gen));
  return d;
}

// Descriptor near `base`, so distances are comparable to sigma = 60.
Descriptor perturbed(const Descriptor& base, std::mt19937& gen, int spread) {
  std::uniform_int_distribution<int> delta(-spread, spread);
  Descriptor d;
  for (std::size_t c = 0; c < d.size(); ++c) d[c] = static_cast<std::uint8_t>(std::clamp(base[c] + delta(gen), 0, 255));
  return d;
}

double sum(const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0); }

}  // namespace

TEST_CASE("EncodingParams validation and names") {
  bovw::EncodingParams p;
  CHECK(p.sigma == 60.0);
  CHECK(p.assignment == bovw::Assignment::soft);
  CHECK(p.pooling == bovw::Pooling::max);
  p.sigma = 0.0;
  CHECK_THROWS_AS(p.validate(), bovw::Error);
  CHECK(bovw::parse_assignment(bovw::to_string(bovw::Assignment::hard)) == bovw::Assignment::hard);
  CHECK(bovw::parse_pooling(bovw::to_string(bovw::Pooling::average)) == bovw::Pooling::average);
  CHECK_THROWS_AS(bovw::parse_pooling("median"), bovw::Error);
}

TEST_CASE("soft_assign examples") {
  CHECK(bovw::soft_assign(std::vector<double>{123.0}, 60.0) == AssignmentRow{1.0});
  const auto equal = bovw::soft_assign(std::vector<double>{7.0, 7.0}, 60.0);
  CHECK(equal[0] == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(equal[1] == doctest::Approx(0.5).epsilon(1e-15));
  // 1 / (1 + e^-1/2) and its complement, evaluated to 12 digits offline.
  const auto row = bovw::soft_assign(std::vector<double>{0.0, 60.0}, 60.0);
  CHECK(std::abs(row[0] - 0.622459331202) < 1e-11);
  CHECK(std::abs(row[1] - 0.377540668798) < 1e-11);
  CHECK_THROWS_AS(bovw::soft_assign(std::vector<double>{}, 60.0), bovw::Error);
  CHECK_THROWS_AS(bovw::soft_assign(std::vector<double>{1.0}, -1.0), bovw::Error);
}

TEST_CASE("soft_assign properties") {
  std::mt19937 gen(1);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t k = std::uniform_int_distribution<std::size_t>(1, 200)(gen);
    const double sigma = std::uniform_real_distribution<double>(1.0, 200.0)(gen);
    const auto d = random_profile(gen, k, 30.0 * sigma);
    const auto row = bovw::soft_assign(d, sigma);

    CHECK(std::abs(sum(row) - 1.0) < 1e-9);
    const auto full = oracle::soft_assign_full_kernel(d, sigma);
    for (std::size_t j = 0; j < k; ++j) {
      CHECK(std::abs(row[j] - full[j]) < 1e-12);
      CHECK(row[j] >= 0.0);
      CHECK(row[j] <= 1.0);
    }
    // Monotone in distance within a row.
    std::vector<std::size_t> order(k);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return d[a] < d[b]; });
    for (std::size_t i = 1; i < k; ++i) CHECK(row[order[i - 1]] >= row[order[i]]);
  }
}

TEST_CASE("soft_assign is strictly monotone where the kernel resolves the gap") {
  const auto row = bovw::soft_assign(std::vector<double>{10.0, 20.0, 30.0, 40.0}, 25.0);
  CHECK(row[0] > row[1]);
  CHECK(row[1] > row[2]);
  CHECK(row[2] > row[3]);
}

TEST_CASE("soft_assign limits") {
  std::mt19937 gen(2);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t k = std::uniform_int_distribution<std::size_t>(2, 50)(gen);
    auto d = random_profile(gen, k, 500.0);
    std::sort(d.begin(), d.end());
    d.erase(std::unique(d.begin(), d.end()), d.end());
    std::shuffle(d.begin(), d.end(), gen);
    if (d.size() < 2) continue;
    // Distinct distances at least ~1e-3 apart make sigma = 1e-3 one-hot.
    bool separated = true;
    auto s = d;
    std::sort(s.begin(), s.end());
    for (std::size_t i = 1; i < s.size(); ++i) separated = separated && s[i] - s[i - 1] > 0.05;
    if (separated) {
      const auto sharp = bovw::soft_assign(d, 1e-3);
      const auto hard = bovw::hard_assign(d);
      for (std::size_t j = 0; j < d.size(); ++j) CHECK(std::abs(sharp[j] - hard[j]) < 1e-9);
    }
    const auto flat = bovw::soft_assign(d, 1e9);
    for (double a : flat) CHECK(std::abs(a - 1.0 / static_cast<double>(d.size())) < 1e-6);
  }
}

TEST_CASE("hard_assign") {
  CHECK(bovw::hard_assign(std::vector<double>{3.0, 1.0, 2.0}) == AssignmentRow{0.0, 1.0, 0.0});
  CHECK(bovw::hard_assign(std::vector<double>{1.0, 1.0}) == AssignmentRow{1.0, 0.0});
  CHECK_THROWS_AS(bovw::hard_assign(std::vector<double>{}), bovw::Error);

  std::mt19937 gen(3);
  std::uniform_int_distribution<int> small(0, 20);
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t k = std::uniform_int_distribution<std::size_t>(1, 64)(gen);
    std::vector<double> d(k);
    for (auto& v : d) v = small(gen);  // frequent ties
    std::size_t best = 0;
    for (std::size_t j = 0; j < k; ++j) {
      if (d[j] < d[best]) best = j;
    }
    const auto row = bovw::hard_assign(d);
    CHECK(row[best] == 1.0);
    CHECK(sum(row) == 1.0);
  }
}

TEST_CASE("pooling") {
  const std::vector<AssignmentRow> one{{0.25, 0.75}};
  CHECK(bovw::max_pool(one).h == one[0]);
  CHECK(bovw::average_pool(one).h == one[0]);

  const std::vector<AssignmentRow> two{{0.2, 0.8}, {0.7, 0.3}};
  CHECK(bovw::max_pool(two).h == std::vector<double>{0.7, 0.8});

  const std::vector<AssignmentRow> same(5, AssignmentRow{0.1, 0.6, 0.3});
  CHECK(bovw::max_pool(same).h == same[0]);

  const std::vector<AssignmentRow> onehots{{1.0, 0.0}, {0.0, 1.0}};
  CHECK(bovw::average_pool(onehots).h == std::vector<double>{0.5, 0.5});

  CHECK_THROWS_AS(bovw::max_pool(std::vector<AssignmentRow>{}), bovw::Error);
  CHECK_THROWS_AS(bovw::average_pool(std::vector<AssignmentRow>{}), bovw::Error);

  std::mt19937 gen(5);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t k = std::uniform_int_distribution<std::size_t>(1, 30)(gen);
    const std::size_t n = std::uniform_int_distribution<std::size_t>(1, 30)(gen);
    std::vector<AssignmentRow> rows;
    for (std::size_t i = 0; i < n; ++i) rows.push_back(bovw::soft_assign(random_profile(gen, k, 200.0), 60.0));
    const auto mx = bovw::max_pool(rows).h;
    const auto avg = bovw::average_pool(rows).h;
    CHECK(std::abs(sum(avg) - 1.0) < 1e-9);
    CHECK(*std::max_element(mx.begin(), mx.end()) >= 1.0 / static_cast<double>(k));
    for (std::size_t j = 0; j < k; ++j) {
      CHECK(mx[j] >= avg[j]);
      CHECK(mx[j] <= 1.0);
    }
  }
}

TEST_CASE("encode_image examples") {
  std::mt19937 gen(7);
  SUBCASE("one point, one word, soft + max") {
    bovw::DescriptorSet ds;
    ds.descriptors = {random_descriptor(gen)};
    ds.keypoints = {{8, 8}};
    bovw::Codebook cb;
    cb.words = {random_descriptor(gen)};
    CHECK(bovw::encode_image(ds, cb, {}).h == std::vector<double>{1.0});
  }
  SUBCASE("hard + average over exact words is the occurrence histogram") {
    bovw::Codebook cb;
    for (int j = 0; j < 4; ++j) cb.words.push_back(random_descriptor(gen));
    bovw::DescriptorSet ds;
    const std::vector<int> picks{0, 2, 2, 3, 2, 0, 0, 2};
    for (int p : picks) {
      ds.descriptors.push_back(cb.words[static_cast<std::size_t>(p)]);
      ds.keypoints.push_back({0, 0});
    }
    bovw::EncodingParams params;
    params.assignment = bovw::Assignment::hard;
    params.pooling = bovw::Pooling::average;
    CHECK(bovw::encode_image(ds, cb, params).h == std::vector<double>{3.0 / 8, 0.0, 4.0 / 8, 1.0 / 8});
  }
  SUBCASE("3 points, 2 words, soft(60) + max against the straight-line equations") {
    const Descriptor base = random_descriptor(gen);
    bovw::Codebook cb;
    cb.words = {perturbed(base, gen, 8), perturbed(base, gen, 8)};
    bovw::DescriptorSet ds;
    for (int i = 0; i < 3; ++i) {
      ds.descriptors.push_back(perturbed(base, gen, 8));
      ds.keypoints.push_back({0, 0});
    }
    const auto h = bovw::encode_image(ds, cb, {}).h;
    const auto ref = oracle::encode(ds.descriptors, cb.words, oracle::Mode::soft_max, 60.0);
    REQUIRE(h.size() == 2);
    CHECK(std::abs(h[0] - ref[0]) < 1e-12);
    CHECK(std::abs(h[1] - ref[1]) < 1e-12);
    CHECK(h[0] < 1.0);  // genuinely soft
  }
  SUBCASE("empty inputs") {
    bovw::Codebook cb;
    cb.words = {Descriptor{}};
    CHECK_THROWS_AS(bovw::encode_image(bovw::DescriptorSet{}, cb, {}), bovw::Error);
  }
}

TEST_CASE("encode_image invariants") {
  std::mt19937 gen(9);
  for (int trial = 0; trial < 30; ++trial) {
    const Descriptor base = random_descriptor(gen);
    bovw::Codebook cb;
    cb.seed = 1;
    const std::size_t k = std::uniform_int_distribution<std::size_t>(2, 24)(gen);
    for (std::size_t j = 0; j < k; ++j) cb.words.push_back(perturbed(base, gen, 12));
    bovw::DescriptorSet ds;
    const std::size_t n = std::uniform_int_distribution<std::size_t>(1, 40)(gen);
    for (std::size_t i = 0; i < n; ++i) {
      ds.descriptors.push_back(perturbed(base, gen, 12));
      ds.keypoints.push_back({0, 0});
    }

    for (const auto pooling : {bovw::Pooling::max, bovw::Pooling::average}) {
      for (const auto assignment : {bovw::Assignment::soft, bovw::Assignment::hard}) {
        bovw::EncodingParams params;
        params.pooling = pooling;
        params.assignment = assignment;
        const auto h = bovw::encode_image(ds, cb, params).h;

        // Permuting the words permutes the coordinates.
        std::vector<std::size_t> perm(k);
        std::iota(perm.begin(), perm.end(), std::size_t{0});
        std::shuffle(perm.begin(), perm.end(), gen);
        bovw::Codebook permuted = cb;
        for (std::size_t j = 0; j < k; ++j) permuted.words[j] = cb.words[perm[j]];
        const auto hp = bovw::encode_image(ds, permuted, params).h;
        bool ties = false;
        for (std::size_t a = 0; a < k && assignment == bovw::Assignment::hard; ++a) {
          for (std::size_t b = a + 1; b < k; ++b) ties = ties || cb.words[a] == cb.words[b];
        }
        if (!ties) {
          for (std::size_t j = 0; j < k; ++j) CHECK(std::abs(hp[j] - h[perm[j]]) < 1e-12);
        }

        // Point order does not matter.
        bovw::DescriptorSet shuffled = ds;
        std::shuffle(shuffled.descriptors.begin(), shuffled.descriptors.end(), gen);
        const auto hs = bovw::encode_image(shuffled, cb, params).h;
        for (std::size_t j = 0; j < k; ++j) {
          if (pooling == bovw::Pooling::max) {
            CHECK(hs[j] == h[j]);
          } else {
            CHECK(std::abs(hs[j] - h[j]) < 1e-12);
          }
        }
      }
    }
  }
}

TEST_CASE("optional L2 normalization") {
  std::mt19937 gen(12);
  bovw::Codebook cb;
  for (int j = 0; j < 6; ++j) cb.words.push_back(random_descriptor(gen));
  bovw::DescriptorSet ds;
  for (int i = 0; i < 5; ++i) {
    ds.descriptors.push_back(random_descriptor(gen));
    ds.keypoints.push_back({0, 0});
  }
  bovw::EncodingParams params;
  params.l2_normalize = true;
  const auto h = bovw::encode_image(ds, cb, params).h;
  double norm = 0.0;
  for (double v : h) norm += v * v;
  CHECK(std::sqrt(norm) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("encode_images matches per-image encoding for any worker count") {
  std::mt19937 gen(13);
  bovw::Codebook cb;
  for (int j = 0; j < 10; ++j) cb.words.push_back(random_descriptor(gen));
  std::vector<bovw::DescriptorSet> sets(9);
  for (auto& s : sets) {
    for (int i = 0; i < 7; ++i) {
      s.descriptors.push_back(random_descriptor(gen));
      s.keypoints.push_back({0, 0});
    }
  }
  std::vector<const bovw::DescriptorSet*> ptrs;
  for (const auto& s : sets) ptrs.push_back(&s);
  const auto serial = bovw::encode_images(ptrs, cb, {}, 1);
  const auto threaded = bovw::encode_images(ptrs, cb, {}, 4);
  CHECK(serial == threaded);
  for (std::size_t i = 0; i < sets.size(); ++i) CHECK(serial[i] == bovw::encode_image(sets[i], cb, {}));
}

TEST_CASE("bow batch file and CSV export") {
  testing::TempDir dir;
  bovw::BowBatch batch;
  batch.codebook_id = "src:c2:k3:s0";
  batch.k = 3;
  batch.vectors = {{{0.1, 0.2, 0.7}, "a.pgm", batch.codebook_id}, {{1.0 / 3, 0.0, 1e-300}, "b.pgm", batch.codebook_id}};
  batch.labels = {"x", "y"};
  bovw::write_bow_file(batch, dir / "b.bow");
  CHECK(bovw::read_bow_file(dir / "b.bow") == batch);

  bovw::write_bow_csv(batch, dir / "b.csv");
  std::ifstream in(dir / "b.csv");
  std::string line;
  std::getline(in, line);
  CHECK(line.rfind("a.pgm,0.1", 0) == 0);

  batch.labels.pop_back();
  CHECK_THROWS_AS(bovw::write_bow_file(batch, dir / "c.bow"), bovw::Error);
}

#include <benchmark/benchmark.h>

#include <random>

#include "bovw/codebook.hpp"
#include "bovw/encoding.hpp"
#include "bovw/features.hpp"

namespace {

bovw::Image noise_image(std::uint32_t size, std::uint32_t seed) {
  std::mt19937 gen(seed);
  std::vector<std::uint8_t> px(static_cast<std::size_t>(size) * size);
  for (auto& v : px) v = static_cast<std::uint8_t>(gen() & 0xff);
  return bovw::Image(size, size, std::move(px));
}

bovw::Codebook random_codebook(std::size_t k) {
  std::mt19937 gen(7);
  bovw::Codebook cb;
  cb.words.resize(k);
  for (auto& w : cb.words) {
    for (auto& v : w) v = static_cast<std::uint8_t>(gen() & 0xff);
  }
  return cb;
}

void BM_SiftDescriptor(benchmark::State& state) {
  const auto img = noise_image(16, 1);
  for (auto _ : state) benchmark::DoNotOptimize(bovw::sift_descriptor(img, {8, 8}, {6, 16}));
}
BENCHMARK(BM_SiftDescriptor);

void BM_ExtractDenseSift(benchmark::State& state) {
  const auto img = noise_image(static_cast<std::uint32_t>(state.range(0)), 2);
  std::size_t n = 0;
  for (auto _ : state) {
    const auto set = bovw::extract_dense_sift(img, {6, 16});
    n = set.size();
    benchmark::DoNotOptimize(set.descriptors.data());
  }
  state.counters["descriptors"] = static_cast<double>(n);
}
BENCHMARK(BM_ExtractDenseSift)->Arg(64)->Arg(256);

void BM_SquaredDistances(benchmark::State& state) {
  const auto cb = random_codebook(static_cast<std::size_t>(state.range(0)));
  const auto d = cb.words.front();
  std::vector<std::int32_t> out(cb.size());
  for (auto _ : state) {
    bovw::squared_distances(cb, d, out);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_SquaredDistances)->Arg(200)->Arg(1000);

void BM_EncodeImage(benchmark::State& state) {
  const auto set = bovw::extract_dense_sift(noise_image(128, 3), {6, 16});
  const auto cb = random_codebook(static_cast<std::size_t>(state.range(0)));
  bovw::EncodingParams params;
  params.assignment = state.range(1) ? bovw::Assignment::soft : bovw::Assignment::hard;
  for (auto _ : state) benchmark::DoNotOptimize(bovw::encode_image(set, cb, params));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(set.size()));
}
BENCHMARK(BM_EncodeImage)->Args({200, 1})->Args({1000, 1})->Args({1000, 0});

}  // namespace

BENCHMARK_MAIN();

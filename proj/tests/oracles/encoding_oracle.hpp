#pragma once

// Straight-line evaluation of the soft-assignment and pooling equations in
// long double, with the full Gaussian kernel (prefactor included) and no
// exponent shift. The extended exponent range of long double keeps every
// kernel value representable for byte-scaled SIFT distances.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "bovw/features.hpp"

namespace oracle {

inline long double gaussian_kernel(long double x, long double sigma) {
  const long double pi = std::numbers::pi_v<long double>;
  return 1.0L / (std::sqrt(2.0L * pi) * sigma) * std::exp(-0.5L * x * x / (sigma * sigma));
}

inline std::vector<double> soft_assign_full_kernel(const std::vector<double>& distances, double sigma) {
  std::vector<long double> k(distances.size());
  long double total = 0.0L;
  for (std::size_t j = 0; j < distances.size(); ++j) {
    k[j] = gaussian_kernel(distances[j], sigma);
    total += k[j];
  }
  std::vector<double> alpha(distances.size());
  for (std::size_t j = 0; j < distances.size(); ++j) alpha[j] = static_cast<double>(k[j] / total);
  return alpha;
}

inline long double euclidean(const bovw::Descriptor& a, const bovw::Descriptor& b) {
  long double s = 0.0L;
  for (std::size_t c = 0; c < a.size(); ++c) {
    const long double d = static_cast<long double>(a[c]) - static_cast<long double>(b[c]);
    s += d * d;
  }
  return std::sqrt(s);
}

enum class Mode { soft_max, hard_average };

inline std::vector<double> encode(const std::vector<bovw::Descriptor>& points, const std::vector<bovw::Descriptor>& words,
                                  Mode mode, double sigma) {
  const std::size_t n = points.size();
  const std::size_t k = words.size();
  std::vector<std::vector<long double>> alpha(n, std::vector<long double>(k, 0.0L));
  for (std::size_t i = 0; i < n; ++i) {
    if (mode == Mode::soft_max) {
      long double total = 0.0L;
      for (std::size_t j = 0; j < k; ++j) {
        alpha[i][j] = gaussian_kernel(euclidean(points[i], words[j]), sigma);
        total += alpha[i][j];
      }
      for (std::size_t j = 0; j < k; ++j) alpha[i][j] /= total;
    } else {
      std::size_t best = 0;
      for (std::size_t j = 1; j < k; ++j) {
        if (euclidean(points[i], words[j]) < euclidean(points[i], words[best])) best = j;
      }
      alpha[i][best] = 1.0L;
    }
  }
  std::vector<double> h(k);
  for (std::size_t j = 0; j < k; ++j) {
    long double acc = 0.0L;
    for (std::size_t i = 0; i < n; ++i) {
      acc = mode == Mode::soft_max ? std::max(acc, alpha[i][j]) : acc + alpha[i][j];
    }
    h[j] = static_cast<double>(mode == Mode::soft_max ? acc : acc / static_cast<long double>(n));
  }
  return h;
}

}  // namespace oracle

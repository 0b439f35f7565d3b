#pragma once

#include <span>

namespace bovw {

struct ConfidenceInterval {
  double mean = 0.0;
  double low = 0.0;
  double high = 0.0;
};

/// Two-sided Student-t quantile t_{1 - alpha/2, df}.
///
/// Exact table values for alpha in {0.2, 0.1, 0.05, 0.02, 0.01, 0.001} and
/// df in [1, 30]; larger df use a Cornish-Fisher expansion around the
/// normal quantile. Other alphas throw.
double student_t_critical(double alpha, unsigned df);

/// mean +/- t_{1-alpha/2, n-1} * s / sqrt(n), s the sample standard deviation.
/// Needs at least two values.
ConfidenceInterval confidence_interval(std::span<const double> values, double alpha = 0.05);

}  // namespace bovw

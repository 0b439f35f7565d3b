#include "bovw/stats.hpp"

#include <array>
#include <cmath>
#include <string>

#include "bovw/error.hpp"

namespace bovw {

namespace {

constexpr std::array<double, 6> kAlphas = {0.2, 0.1, 0.05, 0.02, 0.01, 0.001};

// Normal quantiles z_{1 - alpha/2} for kAlphas.
constexpr std::array<double, 6> kNormal = {1.2815515655, 1.6448536270, 1.9599639845,
                                           2.3263478740, 2.5758293035, 3.2905267315};

// t_{1 - alpha/2, df} for df = 1..30, one row per entry of kAlphas.
constexpr std::array<std::array<double, 30>, 6> kStudentT = {{
    {3.077684, 1.885618, 1.637744, 1.533206, 1.475884, 1.439756, 1.414924, 1.396815, 1.383029, 1.372184,
     1.363430, 1.356217, 1.350171, 1.345030, 1.340606, 1.336757, 1.333379, 1.330391, 1.327728, 1.325341,
     1.323188, 1.321237, 1.319460, 1.317836, 1.316345, 1.314972, 1.313703, 1.312527, 1.311434, 1.310415},
    {6.313752, 2.919986, 2.353363, 2.131847, 2.015048, 1.943180, 1.894579, 1.859548, 1.833113, 1.812461,
     1.795885, 1.782288, 1.770933, 1.761310, 1.753050, 1.745884, 1.739607, 1.734064, 1.729133, 1.724718,
     1.720743, 1.717144, 1.713872, 1.710882, 1.708141, 1.705618, 1.703288, 1.701131, 1.699127, 1.697261},
    {12.706205, 4.302653, 3.182446, 2.776445, 2.570582, 2.446912, 2.364624, 2.306004, 2.262157, 2.228139,
     2.200985, 2.178813, 2.160369, 2.144787, 2.131450, 2.119905, 2.109816, 2.100922, 2.093024, 2.085963,
     2.079614, 2.073873, 2.068658, 2.063899, 2.059539, 2.055529, 2.051831, 2.048407, 2.045230, 2.042272},
    {31.820516, 6.964557, 4.540703, 3.746947, 3.364930, 3.142668, 2.997952, 2.896459, 2.821438, 2.763769,
     2.718079, 2.680998, 2.650309, 2.624494, 2.602480, 2.583487, 2.566934, 2.552380, 2.539483, 2.527977,
     2.517648, 2.508325, 2.499867, 2.492159, 2.485107, 2.478630, 2.472660, 2.467140, 2.462021, 2.457262},
    {63.656741, 9.924843, 5.840909, 4.604095, 4.032143, 3.707428, 3.499483, 3.355387, 3.249836, 3.169273,
     3.105807, 3.054540, 3.012276, 2.976843, 2.946713, 2.920782, 2.898231, 2.878440, 2.860935, 2.845340,
     2.831360, 2.818756, 2.807336, 2.796940, 2.787436, 2.778715, 2.770683, 2.763262, 2.756386, 2.749996},
    {636.619249, 31.599055, 12.923979, 8.610302, 6.868827, 5.958816, 5.407883, 5.041305, 4.780913, 4.586894,
     4.436979, 4.317791, 4.220832, 4.140454, 4.072765, 4.014996, 3.965126, 3.921646, 3.883406, 3.849516,
     3.819277, 3.792131, 3.767627, 3.745399, 3.725144, 3.706612, 3.689592, 3.673906, 3.659405, 3.645959},
}};

std::size_t alpha_row(double alpha) {
  for (std::size_t i = 0; i < kAlphas.size(); ++i) {
    if (std::abs(alpha - kAlphas[i]) < 1e-12) return i;
  }
  throw Error("unsupported alpha " + std::to_string(alpha) + "; supported: 0.2, 0.1, 0.05, 0.02, 0.01, 0.001");
}

}  // namespace

double student_t_critical(double alpha, unsigned df) {
  if (df < 1) throw Error("Student-t quantile needs df >= 1");
  const std::size_t row = alpha_row(alpha);
  if (df <= 30) return kStudentT[row][df - 1];

  // Cornish-Fisher expansion in 1/df; error is below 1e-5 for df > 30.
  const double z = kNormal[row];
  const double z2 = z * z;
  const double nu = df;
  const double g1 = z * (z2 + 1.0) / 4.0;
  const double g2 = z * ((5.0 * z2 + 16.0) * z2 + 3.0) / 96.0;
  const double g3 = z * (((3.0 * z2 + 19.0) * z2 + 17.0) * z2 - 15.0) / 384.0;
  const double g4 = z * ((((79.0 * z2 + 776.0) * z2 + 1482.0) * z2 - 1920.0) * z2 - 945.0) / 92160.0;
  return z + g1 / nu + g2 / (nu * nu) + g3 / (nu * nu * nu) + g4 / (nu * nu * nu * nu);
}

ConfidenceInterval confidence_interval(std::span<const double> values, double alpha) {
  if (values.size() < 2) throw Error("confidence interval needs at least two values");
  const double n = static_cast<double>(values.size());
  double sum = 0.0;
  for (double v : values) sum += v;
  const double mean = sum / n;
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  const double sd = std::sqrt(ss / (n - 1.0));
  const double half = student_t_critical(alpha, static_cast<unsigned>(values.size() - 1)) * sd / std::sqrt(n);
  return {mean, mean - half, mean + half};
}

}  // namespace bovw

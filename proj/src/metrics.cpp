#include "gsi/metrics.hpp"

#include <cmath>

#include "gsi/error.hpp"

namespace gsi {

namespace {
void check_sizes(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size() || a.empty()) {
    fail(ErrorKind::InvalidArgument, "metric inputs must be non-empty and equal length");
  }
}
}  // namespace

double mae(std::span<const double> estimate, std::span<const double> truth) {
  check_sizes(estimate, truth);
  double s = 0.0;
  for (std::size_t d = 0; d < truth.size(); ++d) s += std::abs(estimate[d] - truth[d]);
  return s / static_cast<double>(truth.size());
}

double nrmse(std::span<const double> estimate, std::span<const double> truth) {
  check_sizes(estimate, truth);
  const auto n = static_cast<double>(truth.size());
  double mean = 0.0;
  for (double t : truth) mean += t;
  mean /= n;
  double var = 0.0, sq = 0.0;
  for (std::size_t d = 0; d < truth.size(); ++d) {
    var += (truth[d] - mean) * (truth[d] - mean);
    sq += (estimate[d] - truth[d]) * (estimate[d] - truth[d]);
  }
  const double sd = std::sqrt(var / n);
  if (sd == 0.0) fail(ErrorKind::DegenerateTruth, "truth vector has zero spread");
  return std::sqrt(sq / n) / sd;
}

}  // namespace gsi

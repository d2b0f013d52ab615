#include "gsi/synthgen.hpp"

#include <cmath>
#include <numeric>
#include <string>

#include "gsi/error.hpp"
#include "gsi/rng.hpp"

namespace gsi {

namespace {

enum Stream : std::uint64_t { kU = 1, kV = 2, kNoise = 3, kMask = 4 };

bool covers_all(const std::vector<std::uint8_t>& mask, Index n_a, Index n_b) {
  for (Index i = 0; i < n_a; ++i) {
    bool any = false;
    for (Index j = 0; j < n_b && !any; ++j) any = mask[i * n_b + j];
    if (!any) return false;
  }
  for (Index j = 0; j < n_b; ++j) {
    bool any = false;
    for (Index i = 0; i < n_a && !any; ++i) any = mask[i * n_b + j];
    if (!any) return false;
  }
  return true;
}

}  // namespace

void SyntheticSpec::validate() const {
  if (n_a < 1 || n_b < 1 || dim < 1 || rank < 1) {
    fail(ErrorKind::InvalidArgument, "synthetic extents and rank must be positive");
  }
  if (!(noise_std >= 0.0) || !std::isfinite(noise_std)) {
    fail(ErrorKind::InvalidArgument, "noise_std must be finite and non-negative");
  }
  if (!(missing_fraction >= 0.0 && missing_fraction < 1.0)) {
    fail(ErrorKind::InvalidArgument, "missing_fraction must lie in [0, 1)");
  }
}

std::vector<double> SyntheticInstance::ground_truth(Index i, Index j) const {
  if (i >= spec.n_a || j >= spec.n_b) {
    fail(ErrorKind::InvalidArgument, "ground_truth index out of range");
  }
  const auto first = clean.begin() + static_cast<std::ptrdiff_t>((i * spec.n_b + j) * spec.dim);
  return {first, first + static_cast<std::ptrdiff_t>(spec.dim)};
}

std::vector<double> contract_factors(Index n_a, Index n_b, Index dim, Index rank,
                                     const std::vector<double>& u,
                                     const std::vector<double>& v) {
  std::vector<double> clean(n_a * n_b * dim, 0.0);
  for (Index i = 0; i < n_a; ++i) {
    for (Index j = 0; j < n_b; ++j) {
      for (Index d = 0; d < dim; ++d) {
        double s = 0.0;
        for (Index r = 0; r < rank; ++r) {
          s += u[(i * dim + d) * rank + r] * v[(j * dim + d) * rank + r];
        }
        clean[(i * n_b + j) * dim + d] = s;
      }
    }
  }
  return clean;
}

std::vector<std::uint8_t> draw_mask(Index n_a, Index n_b, double missing_fraction,
                                    std::uint64_t seed) {
  const Index cells = n_a * n_b;
  const auto hide = static_cast<Index>(std::llround(missing_fraction * static_cast<double>(cells)));
  for (std::uint64_t attempt = 0; attempt < 1000; ++attempt) {
    CounterRng rng(seed, kMask + (attempt << 8));
    std::vector<Index> order(cells);
    std::iota(order.begin(), order.end(), Index{0});
    // Partial Fisher-Yates: the first `hide` slots become missing.
    for (Index s = 0; s < hide; ++s) {
      const Index pick = s + static_cast<Index>(rng.below(cells - s));
      std::swap(order[s], order[pick]);
    }
    std::vector<std::uint8_t> mask(cells, 1);
    for (Index s = 0; s < hide; ++s) mask[order[s]] = 0;
    if (covers_all(mask, n_a, n_b)) return mask;
  }
  fail(ErrorKind::InfeasibleMask,
       "no mask covering every row and column after 1000 draws");
}

SyntheticInstance generate(const SyntheticSpec& spec) {
  spec.validate();
  const Index n_a = spec.n_a, n_b = spec.n_b, dim = spec.dim, rank = spec.rank;

  SyntheticInstance inst;
  inst.spec = spec;
  inst.u_factors.resize(n_a * dim * rank);
  CounterRng urng(spec.seed, kU);
  for (double& x : inst.u_factors) x = urng.normal();

  inst.v_factors.resize(n_b * dim * rank);
  CounterRng vrng(spec.seed, kV);
  if (spec.model == LatentModel::MultiLatent) {
    for (double& x : inst.v_factors) x = vrng.normal();
  } else {
    for (Index j = 0; j < n_b; ++j) {
      for (Index r = 0; r < rank; ++r) {
        const double x = vrng.normal();
        for (Index d = 0; d < dim; ++d) inst.v_factors[(j * dim + d) * rank + r] = x;
      }
    }
  }
  inst.clean = contract_factors(n_a, n_b, dim, rank, inst.u_factors, inst.v_factors);

  std::vector<std::uint8_t> mask = draw_mask(n_a, n_b, spec.missing_fraction, spec.seed);
  std::vector<double> values = inst.clean;
  CounterRng nrng(spec.seed, kNoise);
  for (Index c = 0; c < n_a * n_b; ++c) {
    for (Index d = 0; d < dim; ++d) {
      double& v = values[c * dim + d];
      if (!mask[c]) {
        v = 0.0;
      } else if (spec.noise_std > 0.0) {
        v += spec.noise_std * nrng.normal();
      }
    }
  }
  inst.observed_tensor =
      IncompleteTensor(n_a, n_b, dim, std::move(values), std::move(mask));
  return inst;
}

}  // namespace gsi
